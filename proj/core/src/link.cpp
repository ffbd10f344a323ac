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

#include "thzsim/link.hpp"

#include <cmath>
#include <limits>

namespace thz
{
    void PhyConfig::validate() const
    {
        if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_floor_dbm))
            throw std::invalid_argument("phy: tx power and noise floor must be finite");
        if (!(max_phy_rate_bps > 0.0))
            throw std::invalid_argument("phy: max PHY rate must be > 0");
        if (!std::isfinite(decode_threshold_db))
            throw std::invalid_argument("phy: decode threshold must be finite");
        if (!(alignment_dwell_s >= 0.0))
            throw std::invalid_argument("phy: alignment dwell must be >= 0");
    }

    double rx_power(const Cir &cir, const AntennaState &tx_ant, const AntennaState &rx_ant, double tx_power_dbm,
                    double t)
    {
        return strongest_path(cir, tx_ant, rx_ant, tx_power_dbm, t).rx_power_dbm;
    }

    double achievable_rate(double snr_db, double bandwidth_hz, double max_rate_bps, double decode_threshold_db)
    {
        if (!(bandwidth_hz > 0.0))
            throw std::invalid_argument("achievable_rate: bandwidth must be > 0");
        if (std::isnan(snr_db) || snr_db < decode_threshold_db)
            return 0.0;
        const double snr = std::pow(10.0, snr_db / 10.0);
        return std::min(bandwidth_hz * std::log2(1.0 + snr), max_rate_bps);
    }

    double airtime(std::uint64_t bytes, double rate_bps)
    {
        if (!(rate_bps > 0.0))
            throw LinkDownError("airtime: link is down (rate 0)");
        return 8.0 * static_cast<double>(bytes) / rate_bps;
    }

    LinkBudget link_budget(const Cir &cir, const AntennaState &tx_ant, const AntennaState &rx_ant,
                           const PhyConfig &phy, double t)
    {
        LinkBudget b;
        b.tx_power_dbm = phy.tx_power_dbm;
        b.noise_floor_dbm = phy.noise_floor_dbm;
        b.rx_power_dbm = rx_power(cir, tx_ant, rx_ant, phy.tx_power_dbm, t);
        b.snr_db = b.rx_power_dbm - phy.noise_floor_dbm;
        b.rate_bps = achievable_rate(b.snr_db, cir.grid.bandwidth_hz, phy.max_phy_rate_bps, phy.decode_threshold_db);
        return b;
    }
}
