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

#include "thzsim/engine.hpp"
#include "thzsim/config_error.hpp"
#include "thzsim/constants.hpp"
#include "thzsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

namespace thz
{
    const char *to_string(ChannelType t)
    {
        switch (t)
        {
        case ChannelType::LosBaseline: return "LOS_BASELINE";
        case ChannelType::Fsc: return "FSC";
        case ChannelType::Hbc: return "HBC";
        }
        return "?";
    }

    std::optional<ChannelType> parse_channel_type(const std::string &s)
    {
        if (s == "LOS_BASELINE")
            return ChannelType::LosBaseline;
        if (s == "FSC")
            return ChannelType::Fsc;
        if (s == "HBC")
            return ChannelType::Hbc;
        return std::nullopt;
    }

    namespace
    {
        template <typename F>
        void collect(std::vector<ConfigIssue> &issues, const std::string &key, F &&check)
        {
            try
            {
                check();
            }
            catch (const std::invalid_argument &e)
            {
                issues.push_back({key, 0, e.what()});
            }
        }

        constexpr std::uint64_t kChannelStream = 0x43484e4cull; // "CHNL"
    }

    Room effective_room(const ScenarioConfig &cfg)
    {
        Room room = cfg.room;
        for (auto &o : room.obstacles)
            if (!o.penetration_loss_db)
                o.penetration_loss_db = cfg.penetration_loss_db;
        return room;
    }

    void ScenarioConfig::validate() const
    {
        std::vector<ConfigIssue> issues;
        collect(issues, "room", [&] { room.validate(); });
        if (!(penetration_loss_db >= 0.0))
            issues.push_back({"room.penetration_loss_db", 0, "must be >= 0 dB"});

        auto check_waypoints = [&](const std::vector<Vec3> &wps, const std::string &key) {
            if (wps.empty())
                issues.push_back({key, 0, "at least one waypoint is required"});
            for (std::size_t i = 0; i < wps.size(); ++i)
                if (!room.contains(wps[i]))
                    issues.push_back({key + "[" + std::to_string(i) + "]", 0, "waypoint lies outside the room"});
        };
        check_waypoints(tx_waypoints, "mobility.tx_waypoints");
        check_waypoints(rx_waypoints, "mobility.rx_waypoints");
        if (!(speed_mps >= 0.0))
            issues.push_back({"mobility.speed_mps", 0, "must be >= 0"});
        if (!tx_waypoints.empty() && !rx_waypoints.empty() && tx_waypoints.front() == rx_waypoints.front())
            issues.push_back({"mobility.rx_waypoints[0]", 0, "TX and RX start at the same point"});

        collect(issues, "channel", [&] { grid.validate(); });
        collect(issues, "channel.absorption", [&] { absorption.validate(); });
        if (max_reflection_order < 0 || max_reflection_order > 2)
            issues.push_back({"channel.max_reflection_order", 0, "must be 0, 1 or 2"});
        collect(issues, "channel.hbc", [&] { hbc.validate(); });
        collect(issues, "channel.fsc", [&] { fsc.validate(); });
        collect(issues, "antenna.tx", [&] { tx_antenna.validate(); });
        collect(issues, "antenna.rx", [&] { rx_antenna.validate(); });
        collect(issues, "phy", [&] { phy.validate(); });

        if (!(source_rate_bps > 0.0))
            issues.push_back({"traffic.source_rate_bps", 0, "must be > 0"});
        if (packet_bytes == 0)
            issues.push_back({"traffic.packet_bytes", 0, "must be > 0"});
        if (!(duration_s > 0.0))
            issues.push_back({"sim.duration_s", 0, "must be > 0"});
        if (!(channel_update_interval_s > 0.0))
            issues.push_back({"sim.channel_update_interval_s", 0, "must be > 0"});
        if (!(throughput_window_s > 0.0))
            issues.push_back({"sim.throughput_window_s", 0, "must be > 0"});
        if (!(link_down_timeout_s >= 0.0))
            issues.push_back({"sim.link_down_timeout_s", 0, "must be >= 0"});
        if (!issues.empty())
            throw ConfigError(std::move(issues));
    }

    std::size_t ScenarioConfig::channel_updates() const
    {
        return static_cast<std::size_t>(std::ceil(duration_s / channel_update_interval_s - 1e-9));
    }

    Vec3 position_at(const std::vector<Vec3> &waypoints, double speed_mps, double t)
    {
        if (waypoints.empty())
            throw std::invalid_argument("position_at: no waypoints");
        double remaining = speed_mps * t;
        for (std::size_t i = 0; i + 1 < waypoints.size(); ++i)
        {
            const Vec3 seg = waypoints[i + 1] - waypoints[i];
            const double len = seg.norm();
            if (remaining <= len)
                return len > 0.0 ? waypoints[i] + seg * (remaining / len) : waypoints[i];
            remaining -= len;
        }
        return waypoints.back();
    }

    std::vector<double> FlowStats::latencies() const
    {
        std::vector<double> out;
        out.reserve(packets.size());
        for (const auto &p : packets)
            out.push_back(p.latency());
        return out;
    }

    ChannelSnapshot make_channel(const ScenarioConfig &cfg, std::size_t index, double t,
                                 const std::vector<RayPath> *rays)
    {
        ChannelSnapshot snap;
        snap.t = t;
        snap.tx = position_at(cfg.tx_waypoints, cfg.speed_mps, t);
        snap.rx = position_at(cfg.rx_waypoints, cfg.speed_mps, t);
        const Room room = effective_room(cfg);
        snap.los = is_los(room, snap.tx, snap.rx);
        Rng rng(derive_seed(cfg.seed, kChannelStream, index));

        switch (cfg.channel_type)
        {
        case ChannelType::LosBaseline:
            snap.cir = gen_los_baseline(cfg.grid, snap.tx, snap.rx, cfg.absorption);
            break;
        case ChannelType::Fsc:
            snap.cir = gen_fsc(snap.los, snap.tx, snap.rx, cfg.fsc, cfg.grid, cfg.absorption, rng);
            break;
        case ChannelType::Hbc: {
            std::vector<RayPath> traced;
            if (!rays)
            {
                traced = trace(room, snap.tx, snap.rx, {cfg.max_reflection_order, cfg.polarization});
                rays = &traced;
            }
            Cir cir;
            cir.los = snap.los;
            cir.tx_pos = snap.tx;
            cir.rx_pos = snap.rx;
            cir.grid = cfg.grid;
            cir.mpcs = hbc_rt_component(*rays, snap.tx, snap.rx, cfg.grid, cfg.absorption, cfg.tx_antenna);
            auto stochastic = hbc_stochastic_component(cir.mpcs, snap.tx, snap.rx, cfg.hbc, cfg.grid,
                                                       cfg.absorption, cfg.tx_antenna, rng);
            cir.mpcs.insert(cir.mpcs.end(), stochastic.begin(), stochastic.end());
            if (!cir.mpcs.empty())
                snap.cir = std::move(cir);
            break;
        }
        }
        return snap;
    }

    bool mac_link_up(const AntennaState &tx_ant, const AntennaState &rx_ant, const Cir &cir, double t,
                     const PhyConfig &phy)
    {
        if (cir.mpcs.empty())
            return false;
        const double snr = rx_power(cir, tx_ant, rx_ant, phy.tx_power_dbm, t) - phy.noise_floor_dbm;
        return snr >= phy.decode_threshold_db;
    }

    std::vector<AlignmentWindow> alignment_windows(const Cir &cir, const AntennaState &tx_ant,
                                                   const AntennaState &rx_ant, const PhyConfig &phy, double t)
    {
        std::vector<AlignmentWindow> out;
        for (std::size_t i = 0; i < cir.mpcs.size(); ++i)
        {
            const Mpc &m = cir.mpcs[i];
            double p = phy.tx_power_dbm + m.path_gain_db();
            if (!m.tx_gain_embedded)
                p += gain_db(tx_ant, m.aod_az, t);
            const double margin = p + rx_ant.max_gain_dbi - phy.noise_floor_dbm - phy.decode_threshold_db;
            const double half = half_width_for_drop(rx_ant, margin);
            if (half < 0.0)
                continue;
            out.push_back({m.aoa_az, half, i, margin});
        }
        return out;
    }

    namespace
    {
        struct Arc
        {
            double lo, hi;
            std::size_t window;
        };

        // Arcs of the windows unrolled over two turns of a sweep that starts at
        // start_deg and moves in `direction`; coordinates are swept angle.
        std::vector<Arc> unrolled_arcs(const std::vector<AlignmentWindow> &windows, double start_deg, double direction)
        {
            std::vector<Arc> arcs;
            for (std::size_t w = 0; w < windows.size(); ++w)
            {
                const auto &win = windows[w];
                if (win.half_width_deg >= 180.0)
                {
                    arcs.push_back({0.0, 720.0, w});
                    continue;
                }
                const double centre = wrap_deg(direction * (win.center_deg - start_deg));
                for (int turn = -1; turn <= 1; ++turn)
                {
                    const double lo = centre + 360.0 * turn - win.half_width_deg;
                    const double hi = centre + 360.0 * turn + win.half_width_deg;
                    if (hi <= 0.0 || lo >= 720.0)
                        continue;
                    arcs.push_back({std::max(lo, 0.0), std::min(hi, 720.0), w});
                }
            }
            std::sort(arcs.begin(), arcs.end(), [](const Arc &a, const Arc &b) {
                return a.lo != b.lo ? a.lo < b.lo : a.window < b.window;
            });
            return arcs;
        }
    }

    double rotating_up_fraction(const std::vector<AlignmentWindow> &windows)
    {
        const auto arcs = unrolled_arcs(windows, 0.0, 1.0);
        // Measure the union over the first turn only.
        double covered = 0.0, cur_lo = 0.0, cur_hi = -1.0;
        for (const auto &a : arcs)
        {
            const double lo = std::min(a.lo, 360.0), hi = std::min(a.hi, 360.0);
            if (hi <= lo)
                continue;
            if (lo > cur_hi)
            {
                if (cur_hi > cur_lo)
                    covered += cur_hi - cur_lo;
                cur_lo = lo;
                cur_hi = hi;
            }
            else
                cur_hi = std::max(cur_hi, hi);
        }
        if (cur_hi > cur_lo)
            covered += cur_hi - cur_lo;
        return std::min(covered / 360.0, 1.0);
    }

    std::optional<AlignmentHit> find_alignment(const std::vector<AlignmentWindow> &windows, double start_deg,
                                               double direction, double dwell_deg, double max_sweep_deg)
    {
        const double dir = direction < 0.0 ? -1.0 : 1.0;
        const auto arcs = unrolled_arcs(windows, start_deg, dir);
        std::size_t i = 0;
        while (i < arcs.size())
        {
            // Merge overlapping arcs into one contiguous up-region.
            double lo = arcs[i].lo, hi = arcs[i].hi;
            std::size_t best = arcs[i].window;
            std::size_t j = i + 1;
            for (; j < arcs.size() && arcs[j].lo <= hi; ++j)
            {
                hi = std::max(hi, arcs[j].hi);
                if (windows[arcs[j].window].margin_db > windows[best].margin_db)
                    best = arcs[j].window;
            }
            const double lock = lo + dwell_deg;
            if (lock > max_sweep_deg)
                return std::nullopt;
            if (hi - lo >= dwell_deg)
                return AlignmentHit{lock, wrap_deg(windows[best].center_deg)};
            i = j;
        }
        return std::nullopt;
    }

    namespace
    {
        enum class EventType : int
        {
            ChannelUpdate = 0,
            Lock = 1,
            TxDone = 2,
            Arrival = 3
        };

        struct Event
        {
            double t;
            EventType type;
            std::uint64_t seq;
            std::size_t payload;
            double bearing = 0.0;

            bool operator>(const Event &o) const
            {
                if (t != o.t)
                    return t > o.t;
                if (type != o.type)
                    return static_cast<int>(type) > static_cast<int>(o.type);
                return seq > o.seq;
            }
        };

        class Simulation
        {
        public:
            explicit Simulation(const ScenarioConfig &cfg) : cfg_(cfg)
            {
                if (cfg.channel_type == ChannelType::Hbc && !cfg.ray_file.empty())
                    rays_ = load_rays(cfg.ray_file);
                packet_bits_ = 8.0 * cfg.packet_bytes;
                interarrival_ = packet_bits_ / cfg.source_rate_bps;
                sweep_speed_ = std::abs(cfg.rx_antenna.rotation_speed_deg_per_s);
                sweep_dir_ = cfg.rx_antenna.rotation_speed_deg_per_s < 0.0 ? -1.0 : 1.0;
                can_sweep_ = cfg.rx_antenna.mode == AntennaMode::Rotating && sweep_speed_ > 0.0;
                home_ = wrap_deg(cfg.rx_antenna.initial_phase_deg);
                bearing_ = home_;
                stats_.duration_s = cfg.duration_s;
                stats_.packet_bytes = cfg.packet_bytes;
            }

            FlowStats run()
            {
                push(0.0, EventType::ChannelUpdate, 0);
                push(0.0, EventType::Arrival, 0);
                while (!events_.empty())
                {
                    const Event ev = events_.top();
                    events_.pop();
                    if (ev.t >= cfg_.duration_s)
                        break;
                    now_ = ev.t;
                    switch (ev.type)
                    {
                    case EventType::ChannelUpdate: on_update(ev.payload); break;
                    case EventType::Lock: on_lock(ev.payload, ev.bearing); break;
                    case EventType::TxDone: busy_ = false; break;
                    case EventType::Arrival: on_arrival(ev.payload); break;
                    }
                    try_transmit();
                }
                now_ = cfg_.duration_s;
                set_link(false);
                stats_.queued_at_end = queue_.size();
                return std::move(stats_);
            }

        private:
            void push(double t, EventType type, std::size_t payload, double bearing = 0.0)
            {
                events_.push(Event{t, type, seq_++, payload, bearing});
            }

            void set_link(bool up)
            {
                if (link_up_ && !up)
                    stats_.link_up_time_s += now_ - up_since_;
                if (!link_up_ && up)
                    up_since_ = now_;
                link_up_ = up;
            }

            AntennaState tx_now() const
            {
                return cfg_.tx_antenna.pointed_at(boresight_at(cfg_.tx_antenna, now_));
            }

            LinkBudget budget_at(double bearing) const
            {
                return link_budget(*snap_.cir, tx_now(), cfg_.rx_antenna.pointed_at(bearing), cfg_.phy, now_);
            }

            void hold(double bearing, const LinkBudget &b)
            {
                bearing_ = bearing;
                searching_ = false;
                rate_ = b.rate_bps;
                const auto sp = strongest_path(*snap_.cir, tx_now(), cfg_.rx_antenna.pointed_at(bearing),
                                               cfg_.phy.tx_power_dbm, now_);
                prop_delay_ = sp.mpc.delay;
                set_link(rate_ > 0.0);
                auto &row = stats_.power_trace.back();
                row.rx_dbm = sp.rx_power_dbm;
                row.aoa_deg = sp.mpc.aoa_az;
            }

            void on_update(std::size_t index)
            {
                const double t = now_;
                const double next = static_cast<double>(index + 1) * cfg_.channel_update_interval_s;
                if (next < cfg_.duration_s)
                    push(next, EventType::ChannelUpdate, index + 1);
                update_index_ = index;

                const std::vector<RayPath> *rays = nullptr;
                if (rays_)
                {
                    auto it = rays_->find(index);
                    if (it == rays_->end())
                        throw std::runtime_error("ray file has no records for timestep " + std::to_string(index));
                    rays = &it->second;
                }
                // Sweep position reached before this update.
                const double sweep_bearing =
                    searching_ ? wrap_deg(search_start_bearing_ + sweep_dir_ * sweep_speed_ * (t - search_start_t_))
                               : bearing_;
                snap_ = make_channel(cfg_, index, t, rays);
                stats_.power_trace.push_back(
                    {t, -std::numeric_limits<double>::infinity(), 0.0, snap_.los, (snap_.rx - snap_.tx).norm()});

                if (!snap_.cir)
                {
                    rate_ = 0.0;
                    set_link(false);
                    return;
                }

                if (!searching_)
                {
                    const auto b = budget_at(bearing_);
                    if (b.rate_bps > 0.0)
                        return hold(bearing_, b);
                }
                const auto home = budget_at(home_);
                if (home.rate_bps > 0.0 || !can_sweep_)
                    return hold(home_, home);

                // Out of alignment: sweep, starting from the peer bearing after a
                // lost lock or continuing an ongoing sweep.
                const double start = searching_ ? sweep_bearing : home_;
                hold(home_, home); // records the misaligned power; link stays down
                searching_ = true;
                search_start_t_ = t;
                search_start_bearing_ = start;

                const auto windows =
                    alignment_windows(*snap_.cir, tx_now(), cfg_.rx_antenna, cfg_.phy, t);
                const double dwell = sweep_speed_ * cfg_.phy.alignment_dwell_s;
                const double budget = sweep_speed_ * (std::min(next, cfg_.duration_s) - t);
                if (auto hit = find_alignment(windows, start, sweep_dir_, dwell, budget))
                    push(t + hit->sweep_deg / sweep_speed_, EventType::Lock, index, hit->bearing_deg);
            }

            void on_lock(std::size_t index, double bearing)
            {
                if (index != update_index_ || !searching_)
                    return;
                const auto b = budget_at(bearing);
                hold(bearing, b);
            }

            void on_arrival(std::size_t k)
            {
                ++stats_.generated;
                queue_.push_back(now_);
                const double next = static_cast<double>(k + 1) * interarrival_;
                if (next < cfg_.duration_s)
                    push(next, EventType::Arrival, k + 1);
            }

            void try_transmit()
            {
                if (busy_ || !link_up_)
                    return;
                while (!queue_.empty())
                {
                    const double sent = queue_.front();
                    queue_.pop_front();
                    if (cfg_.link_down_timeout_s > 0.0 && now_ - sent > cfg_.link_down_timeout_s)
                    {
                        ++stats_.dropped;
                        continue;
                    }
                    const double air = airtime(cfg_.packet_bytes, rate_);
                    const double recv = now_ + air + prop_delay_;
                    if (recv <= cfg_.duration_s)
                        stats_.packets.push_back({sent, recv});
                    else
                        ++stats_.in_flight_at_end;
                    busy_ = true;
                    push(now_ + air, EventType::TxDone, 0);
                    return;
                }
            }

            const ScenarioConfig &cfg_;
            std::optional<std::map<std::size_t, std::vector<RayPath>>> rays_;
            std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
            std::uint64_t seq_ = 0;
            double now_ = 0.0;

            ChannelSnapshot snap_;
            std::size_t update_index_ = 0;

            double packet_bits_ = 0.0, interarrival_ = 0.0;
            std::deque<double> queue_;
            bool busy_ = false;

            bool link_up_ = false;
            double up_since_ = 0.0;
            double rate_ = 0.0, prop_delay_ = 0.0;

            bool can_sweep_ = false, searching_ = false;
            double sweep_speed_ = 0.0, sweep_dir_ = 1.0;
            double home_ = 0.0, bearing_ = 0.0;
            double search_start_t_ = 0.0, search_start_bearing_ = 0.0;

            FlowStats stats_;
        };
    }

    FlowStats run(const ScenarioConfig &cfg)
    {
        cfg.validate();
        Simulation sim(cfg);
        return sim.run();
    }

    std::vector<ThroughputSample> windowed_throughput(const FlowStats &stats, double window_s)
    {
        if (!(window_s > 0.0))
            throw std::invalid_argument("windowed_throughput: window must be > 0");
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(stats.duration_s / window_s - 1e-9)));
        std::vector<double> bits(n, 0.0);
        const double packet_bits = 8.0 * stats.packet_bytes;
        for (const auto &p : stats.packets)
        {
            auto k = static_cast<std::size_t>(std::floor(p.recv_t / window_s));
            bits[std::min(k, n - 1)] += packet_bits;
        }
        std::vector<ThroughputSample> out(n);
        for (std::size_t k = 0; k < n; ++k)
            out[k] = {static_cast<double>(k) * window_s, bits[k] / window_s};
        return out;
    }
}
