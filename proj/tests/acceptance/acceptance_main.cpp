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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.

#include "thzsim/constants.hpp"
#include "thzsim/io.hpp"
#include "thzsim/stats.hpp"
#include "thzsim_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace thz;

namespace
{
    const fs::path kPreset = fs::path(THZSIM_PRESET_DIR) / "meeting_room.ini";

    struct Verdict
    {
        bool pass;
        std::string detail;
    };

    std::string fmt(const char *f, double a)
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, f, a);
        return buf;
    }

    double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    ScenarioConfig preset(ChannelType type, double rate_bps, double hpbw_deg, std::uint64_t seed = 1)
    {
        ScenarioConfig cfg = load_scenario(kPreset);
        cfg.channel_type = type;
        cfg.source_rate_bps = rate_bps;
        cfg.rx_antenna.hpbw_deg = hpbw_deg;
        cfg.seed = seed;
        return cfg;
    }

    constexpr int kReplicas = 3;

    struct Agg
    {
        double throughput_bps = 0.0;
        double latency_s = 0.0;
    };

    Agg replicated(ChannelType type, double rate_bps, double hpbw_deg)
    {
        std::vector<double> thr, lat;
        for (int r = 0; r < kReplicas; ++r)
        {
            const FlowStats st = run(preset(type, rate_bps, hpbw_deg, 1 + static_cast<std::uint64_t>(r)));
            thr.push_back(st.mean_throughput_bps());
            const auto l = st.latencies();
            lat.push_back(l.empty() ? HUGE_VAL : mean(l));
        }
        return {mean(thr), mean(lat)};
    }

    Verdict offered_load()
    {
        std::string detail;
        bool ok = true;
        for (auto type : {ChannelType::LosBaseline, ChannelType::Fsc, ChannelType::Hbc})
            for (double rate : {4e9, 12e9})
            {
                const auto t0 = std::chrono::steady_clock::now();
                const FlowStats st = run(preset(type, rate, 8.0));
                const double secs = seconds_since(t0);
                const double rel = std::abs(st.mean_throughput_bps() - rate) / rate;
                ok = ok && rel <= 0.05 && secs < 60.0;
                detail += std::string(to_string(type)) + "@" + fmt("%.0f", rate / 1e9) + "G=" +
                          fmt("%.3f", st.mean_throughput_bps() / 1e9) + "G(" + fmt("%.1fs", secs) + ") ";
            }
        return {ok, detail};
    }

    Verdict beamwidth_trend()
    {
        const Agg hbc2 = replicated(ChannelType::Hbc, 60e9, 2.0), fsc2 = replicated(ChannelType::Fsc, 60e9, 2.0);
        const Agg hbc10 = replicated(ChannelType::Hbc, 60e9, 10.0), fsc10 = replicated(ChannelType::Fsc, 60e9, 10.0);
        const bool narrow = hbc2.throughput_bps >= 2.0 * fsc2.throughput_bps;
        const bool wide = std::abs(hbc10.throughput_bps - fsc10.throughput_bps) <=
                          0.10 * std::max(hbc10.throughput_bps, fsc10.throughput_bps);
        return {narrow && wide, "2deg HBC/FSC=" + fmt("%.2f", hbc2.throughput_bps / 1e9) + "/" +
                                    fmt("%.2f", fsc2.throughput_bps / 1e9) + " Gbit/s, 10deg HBC/FSC=" +
                                    fmt("%.2f", hbc10.throughput_bps / 1e9) + "/" +
                                    fmt("%.2f", fsc10.throughput_bps / 1e9) + " Gbit/s"};
    }

    Verdict latency_floor()
    {
        const ScenarioConfig cfg = preset(ChannelType::Hbc, 12e9, 10.0);
        const double distance = (cfg.rx_waypoints.front() - cfg.tx_waypoints.front()).norm();
        const double floor = airtime(cfg.packet_bytes, cfg.phy.max_phy_rate_bps) + distance / kSpeedOfLight;
        const Agg hbc10 = replicated(ChannelType::Hbc, 12e9, 10.0), fsc10 = replicated(ChannelType::Fsc, 12e9, 10.0);
        const Agg hbc2 = replicated(ChannelType::Hbc, 12e9, 2.0), fsc2 = replicated(ChannelType::Fsc, 12e9, 2.0);
        const bool agree = std::abs(hbc10.latency_s - fsc10.latency_s) <= 0.10 * hbc10.latency_s;
        const bool at_floor = std::abs(hbc10.latency_s - floor) <= 0.10 * floor &&
                              std::abs(fsc10.latency_s - floor) <= 0.10 * floor;
        const bool narrow = fsc2.latency_s > hbc2.latency_s;
        return {agree && at_floor && narrow,
                "10deg HBC/FSC/floor=" + fmt("%.4g", hbc10.latency_s * 1e6) + "/" + fmt("%.4g", fsc10.latency_s * 1e6) +
                    "/" + fmt("%.4g", floor * 1e6) + " us, 2deg HBC/FSC=" + fmt("%.4g", hbc2.latency_s * 1e6) + "/" +
                    fmt("%.4g", fsc2.latency_s * 1e6) + " us"};
    }

    // Strongest-path powers over the channel updates of the preset trajectory
    // with the given LOS state, RX beam pointed at the peer.
    std::vector<StrongestPath> strongest_paths(ChannelType type, bool los, double hpbw_deg, std::size_t want,
                                                bool isotropic_rx)
    {
        std::vector<StrongestPath> out;
        for (std::uint64_t seed = 1; out.size() < want; ++seed)
        {
            ScenarioConfig cfg = preset(type, 4e9, hpbw_deg, seed);
            const AntennaState rx = isotropic_rx ? isotropic() : cfg.rx_antenna.pointed_at(0.0);
            const AntennaState tx = cfg.tx_antenna.pointed_at(0.0);
            for (std::size_t i = 0; i < cfg.channel_updates() && out.size() < want; ++i)
            {
                const auto snap = make_channel(cfg, i, static_cast<double>(i) * cfg.channel_update_interval_s);
                if (snap.los != los || !snap.cir)
                    continue;
                out.push_back(strongest_path(*snap.cir, tx, rx, cfg.phy.tx_power_dbm, snap.t));
            }
        }
        return out;
    }

    Verdict los_power_offset()
    {
        auto median_power = [](ChannelType type) {
            std::vector<double> p;
            for (const auto &s : strongest_paths(type, true, 8.0, 2000, false))
                p.push_back(s.rx_power_dbm);
            return percentile(p, 50.0);
        };
        const double hbc = median_power(ChannelType::Hbc), fsc = median_power(ChannelType::Fsc);
        const double offset = hbc - fsc;
        return {hbc >= fsc && offset < 5.0, "median HBC/FSC=" + fmt("%.2f", hbc) + "/" + fmt("%.2f", fsc) +
                                                " dBm, offset " + fmt("%.2f", offset) + " dB"};
    }

    Verdict aoa_concentration()
    {
        auto fraction = [](ChannelType type) {
            const auto paths = strongest_paths(type, false, 8.0, 2000, true);
            std::size_t near = 0;
            for (const auto &s : paths)
                if (std::abs(angle_diff_deg(s.mpc.aoa_az, 0.0)) <= 10.0)
                    ++near;
            return static_cast<double>(near) / static_cast<double>(paths.size());
        };
        const double hbc = fraction(ChannelType::Hbc), fsc = fraction(ChannelType::Fsc);
        return {hbc > fsc, "fraction within 10deg of LOS over 2000 NLOS drops HBC/FSC=" + fmt("%.3f", hbc) + "/" +
                               fmt("%.3f", fsc)};
    }

    // Reflection point on a wall by nested ternary search over the face,
    // minimising the TX-wall-RX length.
    double brute_force_reflection(const Room &room, Surface s, const Vec3 &tx, const Vec3 &rx)
    {
        const int axis = room.surface_axis(s);
        const int u_axis = (axis + 1) % 3, v_axis = (axis + 2) % 3;
        const double ext[3] = {room.width, room.depth, room.height};
        auto length = [&](double u, double v) {
            Vec3 p;
            p[axis] = room.surface_coordinate(s);
            p[u_axis] = u;
            p[v_axis] = v;
            return (p - tx).norm() + (rx - p).norm();
        };
        auto best_over_v = [&](double u) {
            double lo = 0.0, hi = ext[v_axis];
            for (int it = 0; it < 200; ++it)
            {
                const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                if (length(u, m1) < length(u, m2))
                    hi = m2;
                else
                    lo = m1;
            }
            return length(u, 0.5 * (lo + hi));
        };
        double lo = 0.0, hi = ext[u_axis];
        for (int it = 0; it < 200; ++it)
        {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (best_over_v(m1) < best_over_v(m2))
                hi = m2;
            else
                lo = m1;
        }
        return best_over_v(0.5 * (lo + hi));
    }

    Verdict ray_tracer_oracle()
    {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 gen(20260101);
        std::uniform_real_distribution<double> size(2.0, 12.0), unit(0.02, 0.98);
        double worst = 0.0;
        bool counts = true;
        for (int room_i = 0; room_i < 100; ++room_i)
        {
            const Room room = make_box_room(size(gen), size(gen), 2.0 + unit(gen) * 3.0, plaster());
            const Vec3 tx{unit(gen) * room.width, unit(gen) * room.depth, unit(gen) * room.height};
            const Vec3 rx{unit(gen) * room.width, unit(gen) * room.depth, unit(gen) * room.height};
            const auto paths = trace(room, tx, rx, {1, Polarization::TE});
            counts = counts && paths.size() == 7;
            std::vector<double> traced(kSurfaceCount, -1.0);
            for (const auto &p : paths)
                if (p.order == 1)
                    traced[static_cast<std::size_t>(p.surfaces.front())] = p.path_length;
            for (int s = 0; s < kSurfaceCount; ++s)
            {
                const double brute = brute_force_reflection(room, static_cast<Surface>(s), tx, rx);
                worst = std::max(worst, traced[static_cast<std::size_t>(s)] < 0 ? HUGE_VAL
                                                                               : std::abs(brute - traced[static_cast<std::size_t>(s)]));
            }
        }
        const double secs = seconds_since(t0);
        return {counts && worst <= 1e-9 && secs < 30.0,
                "max |image - brute force| = " + fmt("%.3g", worst) + " m, 7 paths per room: " +
                    (counts ? "yes" : "no") + ", " + fmt("%.2f", secs) + " s"};
    }

    Verdict closed_forms()
    {
        const double fspl = fspl_db(1.0, 140e9);
        const double gamma = fresnel_reflection(0.0, Material{"eps4", 4.0, 0.0}, Polarization::TE).real();
        AntennaState ant;
        ant.max_gain_dbi = 25.0;
        ant.hpbw_deg = 8.0;
        const double half = gain_off_axis_db(ant, 4.0);
        const bool ok = std::abs(fspl - 75.36) <= 0.01 && std::abs(gamma + 1.0 / 3.0) <= 1e-12 &&
                        std::abs(half - (25.0 - 3.0)) <= 1e-9;
        return {ok, "FSPL=" + fmt("%.5f", fspl) + " dB, Gamma=" + fmt("%.15f", gamma) + ", G(hpbw/2)=" +
                        fmt("%.12f", half) + " dBi"};
    }

    std::string slurp_dir(const fs::path &dir)
    {
        std::vector<fs::path> files;
        for (const auto &e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file())
                files.push_back(e.path());
        std::sort(files.begin(), files.end());
        std::string all;
        for (const auto &f : files)
            all += fs::relative(f, dir).string() + "\n" + read_text(f);
        return all;
    }

    Verdict determinism()
    {
        const fs::path root = fs::temp_directory_path() / "thzsim_acceptance_determinism";
        fs::remove_all(root);
        fs::create_directories(root);
        ScenarioConfig cfg = load_scenario(kPreset);
        cfg.duration_s = 0.05;
        cfg.channel_type = ChannelType::Fsc;
        const fs::path scenario = root / "short.ini";
        save_scenario(cfg, scenario);

        std::ostringstream sink;
        auto twice = [&](const std::string &name, std::vector<std::string> args) {
            std::string out[2];
            for (int k = 0; k < 2; ++k)
            {
                const fs::path dir = root / (name + std::to_string(k));
                auto a = args;
                if (name != "stats")
                    a.insert(a.end(), {"--scenario", scenario.string(), "--out-dir", dir.string()});
                else
                    a.insert(a.end(), {"--out", (dir / "cdf.tsv").string()});
                if (cli::main(a, sink, sink) != 0)
                    return false;
                out[k] = slurp_dir(dir);
            }
            return !out[0].empty() && out[0] == out[1];
        };
        bool ok = twice("run", {"run", "--channel", "HBC", "--seed", "7"});
        ok = twice("raytrace", {"raytrace"}) && ok;
        ok = twice("sweep", {"sweep", "--axis", "beamwidth", "--values", "2,10", "--replicas", "2"}) && ok;
        ok = twice("stats", {"stats", "--input", (root / "run0").string(), "--kind", "cdf"}) && ok;
        fs::remove_all(root);
        return {ok, "run, raytrace, sweep and stats repeated with identical inputs"};
    }

    double max_bin_diff_db(const Mpc &a, const Mpc &b)
    {
        double worst = 0.0;
        for (std::size_t k = 0; k < a.amplitude.size(); ++k)
            worst = std::max(worst, std::abs(20.0 * std::log10(std::abs(a.amplitude[k])) -
                                             20.0 * std::log10(std::abs(b.amplitude[k]))));
        return worst;
    }

    Verdict degenerate_collapse()
    {
        const ScenarioConfig cfg = load_scenario(kPreset);
        const Room room = effective_room(cfg);
        std::mt19937_64 gen(99);
        std::uniform_real_distribution<double> ux(0.2, 6.8), uy(2.7, 4.8), uz(0.2, 2.8);

        HbcParams zero = cfg.hbc;
        zero.n_nonrt_clusters_mean = 0.0;
        zero.subpaths_pre_mean = 0.0;
        zero.subpaths_post_mean = 0.0;
        FscParams single = cfg.fsc;
        single.n_clusters = {CountLaw::Kind::Fixed, 1.0};
        single.subpaths = {CountLaw::Kind::Fixed, 1.0};
        single.n_lobes = {CountLaw::Kind::Fixed, 1.0};
        single.intra_cluster_delay_s = 0.0;
        single.cluster_interarrival_s = 0.0;
        single.lobe_angle_spread_deg = 0.0;

        bool hbc_ok = true;
        double fsc_worst = 0.0;
        bool fsc_shape = true;
        for (int i = 0; i < 200; ++i)
        {
            const Vec3 tx{ux(gen), uy(gen), uz(gen)}, rx{ux(gen), uy(gen), uz(gen)};
            Rng rng(static_cast<std::uint64_t>(i));
            const auto rays = trace(room, tx, rx, {cfg.max_reflection_order, cfg.polarization});
            const auto rt = hbc_rt_component(rays, tx, rx, cfg.grid, cfg.absorption, cfg.tx_antenna);
            const Cir hbc = gen_hbc(rays, tx, rx, is_los(room, tx, rx), zero, cfg.grid, cfg.absorption,
                                    cfg.tx_antenna, rng);
            hbc_ok = hbc_ok && hbc.mpcs.size() == rt.size();
            for (std::size_t k = 0; hbc_ok && k < rt.size(); ++k)
                hbc_ok = hbc.mpcs[k].amplitude == rt[k].amplitude && hbc.mpcs[k].delay == rt[k].delay &&
                         hbc.mpcs[k].aoa_az == rt[k].aoa_az && hbc.mpcs[k].aod_az == rt[k].aod_az;

            const Cir fsc = gen_fsc(true, tx, rx, single, cfg.grid, cfg.absorption, rng);
            const Cir base = gen_los_baseline(cfg.grid, tx, rx, cfg.absorption);
            fsc_shape = fsc_shape && fsc.mpcs.size() == 1 && base.mpcs.size() == 1 &&
                        fsc.mpcs[0].delay == base.mpcs[0].delay;
            if (fsc_shape)
                fsc_worst = std::max(fsc_worst, max_bin_diff_db(fsc.mpcs[0], base.mpcs[0]));
        }
        return {hbc_ok && fsc_shape && fsc_worst <= 1e-9,
                std::string("HBC zero means == RT only: ") + (hbc_ok ? "yes" : "no") +
                    ", FSC single path vs LOS baseline max bin diff " + fmt("%.3g", fsc_worst) + " dB"};
    }

    Verdict ecdf_histogram_invariants()
    {
        std::mt19937_64 gen(4242);
        std::uniform_int_distribution<int> count(1, 200), bins(4, 72);
        std::normal_distribution<double> value(0.0, 50.0);
        int violations = 0;
        for (int set = 0; set < 1000; ++set)
        {
            std::vector<double> samples(static_cast<std::size_t>(count(gen)));
            for (auto &s : samples)
                s = value(gen);
            if (set % 5 == 0 && samples.size() > 1)
                samples[1] = samples[0]; // ties
            const auto pts = ecdf(samples);
            if (pts.size() != samples.size() || std::abs(pts.back().probability - 1.0) > 1e-15)
                ++violations;
            for (std::size_t k = 1; k < pts.size(); ++k)
                if (pts[k].value < pts[k - 1].value || pts[k].probability <= pts[k - 1].probability)
                {
                    ++violations;
                    break;
                }
            const auto h = angle_histogram(samples, bins(gen));
            double sum = 0.0;
            for (double f : h.fraction)
            {
                sum += f;
                if (f < 0.0)
                    ++violations;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                ++violations;
        }
        return {violations == 0, std::to_string(violations) + " violations over 1000 sample sets"};
    }
}

int main()
{
    const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria = {
        {"offered load delivered at 4 and 12 Gbit/s", offered_load},
        {"beamwidth trend at 60 Gbit/s", beamwidth_trend},
        {"latency floor and narrow-beam latency", latency_floor},
        {"LOS strongest-path power offset", los_power_offset},
        {"NLOS strongest-path AoA concentration", aoa_concentration},
        {"image method vs brute-force reflections", ray_tracer_oracle},
        {"closed-form FSPL, Fresnel and antenna gain", closed_forms},
        {"byte-identical repeated commands", determinism},
        {"degenerate channel collapse", degenerate_collapse},
        {"ECDF and histogram invariants", ecdf_histogram_invariants},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        Verdict v{false, ""};
        try
        {
            v = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] AC%zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%zu/%zu acceptance criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
                criteria.size());
    return failed == 0 ? 0 : 1;
}
