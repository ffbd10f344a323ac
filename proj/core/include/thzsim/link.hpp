// SPDX-License-Identifier: Apache-2.0
//
// thzsim: link-level simulator for indoor wireless networks above 100 GHz
// Copyright (C) 2026 The thzsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef THZSIM_LINK_HPP
#define THZSIM_LINK_HPP

#include "thzsim/antenna.hpp"
#include "thzsim/channel.hpp"

#include <cstdint>
#include <stdexcept>

namespace thz
{
    struct PhyConfig
    {
        double tx_power_dbm = 0.0;
        double noise_floor_dbm = -160.0;
        double max_phy_rate_bps = 64e9;
        double decode_threshold_db = 0.0;
        double alignment_dwell_s = 2e-6; // beam must hold on a direction this long to align

        void validate() const;
        bool operator==(const PhyConfig &) const = default;
    };

    struct LinkBudget
    {
        double tx_power_dbm = 0.0;
        double noise_floor_dbm = 0.0;
        double rx_power_dbm = 0.0;
        double snr_db = 0.0;
        double rate_bps = 0.0;
    };

    // Thrown when a packet is scheduled on a link whose rate is zero.
    class LinkDownError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Strongest-path received power with antenna gains evaluated at time t.
    double rx_power(const Cir &cir, const AntennaState &tx_ant, const AntennaState &rx_ant, double tx_power_dbm,
                    double t);

    // Shannon capacity capped at max_rate_bps; zero below the decode threshold.
    double achievable_rate(double snr_db, double bandwidth_hz, double max_rate_bps = 64e9,
                           double decode_threshold_db = 0.0);

    double airtime(std::uint64_t bytes, double rate_bps);

    LinkBudget link_budget(const Cir &cir, const AntennaState &tx_ant, const AntennaState &rx_ant,
                           const PhyConfig &phy, double t);
}

#endif
