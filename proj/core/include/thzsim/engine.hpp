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

#ifndef THZSIM_ENGINE_HPP
#define THZSIM_ENGINE_HPP

#include "thzsim/antenna.hpp"
#include "thzsim/channel.hpp"
#include "thzsim/geometry.hpp"
#include "thzsim/link.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace thz
{
    enum class ChannelType
    {
        LosBaseline,
        Fsc,
        Hbc
    };
    const char *to_string(ChannelType t);
    std::optional<ChannelType> parse_channel_type(const std::string &s);

    struct ScenarioConfig
    {
        // [room]
        Room room;
        std::map<std::string, Material> materials; // library the surfaces refer to
        Polarization polarization = Polarization::TE;
        double penetration_loss_db = 30.0; // default for obstacles without their own value

        // [mobility]
        std::vector<Vec3> tx_waypoints;
        std::vector<Vec3> rx_waypoints;
        double speed_mps = 1.0;

        // [channel]
        ChannelType channel_type = ChannelType::Hbc;
        FrequencyGrid grid;
        AbsorptionTable absorption = AbsorptionTable::defaults();
        int max_reflection_order = 2;
        std::string ray_file; // optional pre-computed rays, one timestep per channel update
        HbcParams hbc;
        FscParams fsc;

        // [antenna.tx] / [antenna.rx]
        AntennaState tx_antenna;
        AntennaState rx_antenna;

        // [phy]
        PhyConfig phy;

        // [traffic]
        double source_rate_bps = 4e9;
        std::uint32_t packet_bytes = 12500;

        // [sim]
        double duration_s = 2.0;
        double channel_update_interval_s = 1e-3;
        std::uint64_t seed = 1;
        double throughput_window_s = 0.1;
        double link_down_timeout_s = 0.0; // 0 disables head-of-line drops

        // Throws ConfigError (config_error.hpp) listing every violated constraint.
        void validate() const;
        std::size_t channel_updates() const;
        bool operator==(const ScenarioConfig &) const = default;
    };

    // Room with the scenario's default penetration loss applied to obstacles
    // that do not carry their own.
    Room effective_room(const ScenarioConfig &cfg);

    // Piecewise-linear motion along the waypoints at constant speed; the node
    // parks at the last waypoint.
    Vec3 position_at(const std::vector<Vec3> &waypoints, double speed_mps, double t);

    struct PacketRecord
    {
        double send_t;
        double recv_t;
        double latency() const { return recv_t - send_t; }
    };

    struct PowerSample
    {
        double t;
        double rx_dbm;
        double aoa_deg; // strongest-path AoA at the RX, relative to the LOS bearing
        bool los;
        double distance_m;
    };

    struct FlowStats
    {
        double duration_s = 0.0;
        std::uint32_t packet_bytes = 0;
        std::vector<PacketRecord> packets; // delivered packets, in delivery order
        std::vector<PowerSample> power_trace; // one row per channel update
        std::uint64_t generated = 0;
        std::uint64_t dropped = 0;
        std::uint64_t queued_at_end = 0;
        std::uint64_t in_flight_at_end = 0;
        double link_up_time_s = 0.0;

        std::uint64_t delivered() const { return packets.size(); }
        double delivered_bits() const { return 8.0 * static_cast<double>(packet_bytes) * static_cast<double>(packets.size()); }
        double mean_throughput_bps() const { return duration_s > 0.0 ? delivered_bits() / duration_s : 0.0; }
        std::vector<double> latencies() const;
    };

    // Channel realisation for one update: what the MAC sees between two updates.
    struct ChannelSnapshot
    {
        double t = 0.0;
        Vec3 tx, rx;
        bool los = false;
        std::optional<Cir> cir; // empty when the generator produced no components
    };

    // Generates the channel of update `index` at time t for the configured model.
    ChannelSnapshot make_channel(const ScenarioConfig &cfg, std::size_t index, double t,
                                 const std::vector<RayPath> *rays = nullptr);

    // Instantaneous link test: SNR of the strongest path at time t meets the
    // decode threshold.
    bool mac_link_up(const AntennaState &tx_ant, const AntennaState &rx_ant, const Cir &cir, double t,
                     const PhyConfig &phy);

    // Bearing interval around one component's AoA inside which the RX beam
    // closes the link on that component alone.
    struct AlignmentWindow
    {
        double center_deg;
        double half_width_deg; // 180 means every bearing
        std::size_t mpc;
        double margin_db; // SNR margin over the threshold with the beam on the component
    };

    std::vector<AlignmentWindow> alignment_windows(const Cir &cir, const AntennaState &tx_ant,
                                                   const AntennaState &rx_ant, const PhyConfig &phy, double t);

    // Fraction of one rotation period during which a rotating RX closes the link.
    double rotating_up_fraction(const std::vector<AlignmentWindow> &windows);

    struct AlignmentHit
    {
        double sweep_deg;   // angle swept until the dwell completes
        double bearing_deg; // refined bearing the beam holds afterwards
    };

    // First bearing reached by a sweep starting at start_deg (direction =
    // sign(speed)) where the beam can stay inside the up-region for
    // dwell_deg, within max_sweep_deg of rotation.
    std::optional<AlignmentHit> find_alignment(const std::vector<AlignmentWindow> &windows, double start_deg,
                                               double direction, double dwell_deg, double max_sweep_deg);

    FlowStats run(const ScenarioConfig &cfg);

    // Delivered bits per window divided by the window length. Window k covers
    // [k w, (k+1) w); the last window may be partial.
    struct ThroughputSample
    {
        double window_start;
        double bps;
    };
    std::vector<ThroughputSample> windowed_throughput(const FlowStats &stats, double window_s);
}

#endif
