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

#include "thzsim_cli/commands.hpp"

#include "thzsim/io.hpp"
#include "thzsim/stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace thz::cli
{
    namespace
    {
        struct UsageError : std::runtime_error
        {
            using std::runtime_error::runtime_error;
        };

        fs::path default_out(const std::string &command)
        {
            const char *root = std::getenv("THZSIM_OUT_ROOT");
            return fs::path(root && *root ? root : "thzsim-out") / command;
        }

        struct Overrides
        {
            std::string scenario;
            std::string channel;
            std::optional<double> rate;
            std::optional<double> beamwidth;
            std::optional<std::uint64_t> seed;
            std::string out_dir;

            void add_to(CLI::App &app, bool with_overrides = true)
            {
                app.add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
                if (with_overrides)
                {
                    app.add_option("--channel", channel, "Channel type: LOS_BASELINE, FSC or HBC");
                    app.add_option("--rate", rate, "Source rate [bit/s]");
                    app.add_option("--beamwidth", beamwidth, "RX half-power beamwidth [deg]");
                }
                app.add_option("--seed", seed, "Base random seed");
                app.add_option("--out-dir", out_dir, "Output directory (default $THZSIM_OUT_ROOT/<command>)");
            }

            ScenarioConfig load() const
            {
                ScenarioConfig cfg = load_scenario(scenario);
                if (!channel.empty())
                {
                    auto t = parse_channel_type(channel);
                    if (!t)
                        throw UsageError("--channel: expected LOS_BASELINE, FSC or HBC, got '" + channel + "'");
                    cfg.channel_type = *t;
                }
                if (rate)
                    cfg.source_rate_bps = *rate;
                if (beamwidth)
                    cfg.rx_antenna.hpbw_deg = *beamwidth;
                if (seed)
                    cfg.seed = *seed;
                cfg.validate();
                return cfg;
            }

            fs::path out(const std::string &command) const
            {
                return out_dir.empty() ? default_out(command) : fs::path(out_dir);
            }
        };

        template <typename F>
        void write_file(const fs::path &path, F &&body)
        {
            std::ostringstream os;
            body(os);
            write_text(path, os.str());
        }

        std::vector<ChannelSnapshot> snapshots(const ScenarioConfig &cfg)
        {
            std::optional<std::map<std::size_t, std::vector<RayPath>>> rays;
            if (cfg.channel_type == ChannelType::Hbc && !cfg.ray_file.empty())
                rays = load_rays(cfg.ray_file);
            std::vector<ChannelSnapshot> out;
            const std::size_t n = cfg.channel_updates();
            out.reserve(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                const std::vector<RayPath> *r = nullptr;
                if (rays)
                {
                    auto it = rays->find(i);
                    if (it == rays->end())
                        throw std::runtime_error("ray file has no records for timestep " + std::to_string(i));
                    r = &it->second;
                }
                out.push_back(make_channel(cfg, i, static_cast<double>(i) * cfg.channel_update_interval_s, r));
            }
            return out;
        }

        void write_run(const fs::path &dir, const ScenarioConfig &cfg, const FlowStats &stats, bool full)
        {
            fs::create_directories(dir);
            write_file(dir / "summary.txt", [&](std::ostream &os) { write_summary(os, cfg, stats); });
            write_file(dir / "throughput.tsv", [&](std::ostream &os) {
                write_throughput(os, windowed_throughput(stats, cfg.throughput_window_s));
            });
            if (!full)
                return;
            save_scenario(cfg, dir / "scenario.ini");
            write_file(dir / "packets.tsv", [&](std::ostream &os) { write_packets(os, stats); });
            write_file(dir / "power_trace.tsv", [&](std::ostream &os) { write_power_trace(os, stats); });
            write_file(dir / "mpcs.tsv", [&](std::ostream &os) { write_mpcs(os, snapshots(cfg)); });
        }

        int cmd_run(const Overrides &o, std::ostream &out)
        {
            const ScenarioConfig cfg = o.load();
            const FlowStats stats = run(cfg);
            const fs::path dir = o.out("run");
            write_run(dir, cfg, stats, true);
            out << "mean_throughput_bps = " << format_number(stats.mean_throughput_bps()) << "\n";
            out << "wrote " << dir.string() << "\n";
            return kOk;
        }

        int cmd_raytrace(const Overrides &o, std::ostream &out)
        {
            const ScenarioConfig cfg = o.load();
            const Room room = effective_room(cfg);
            const TraceOptions opts{cfg.max_reflection_order, cfg.polarization};
            std::vector<std::vector<RayPath>> per_step;
            for (std::size_t i = 0; i < cfg.channel_updates(); ++i)
            {
                const double t = static_cast<double>(i) * cfg.channel_update_interval_s;
                per_step.push_back(trace(room, position_at(cfg.tx_waypoints, cfg.speed_mps, t),
                                         position_at(cfg.rx_waypoints, cfg.speed_mps, t), opts));
            }
            const fs::path dir = o.out("raytrace");
            fs::create_directories(dir);
            export_rays(dir / "rays.txt", per_step);
            out << "wrote " << (dir / "rays.txt").string() << "\n";
            return kOk;
        }

        struct SweepOptions
        {
            std::string axis;
            std::vector<std::string> values;
            int replicas = 20;
            int jobs = 0;
        };

        int cmd_sweep(const Overrides &o, const SweepOptions &s, std::ostream &out)
        {
            if (s.axis != "beamwidth" && s.axis != "source_rate" && s.axis != "channel")
                throw UsageError("--axis: expected beamwidth, source_rate or channel, got '" + s.axis + "'");
            if (s.values.empty())
                throw UsageError("--values: at least one value is required");
            if (s.replicas < 1)
                throw UsageError("--replicas must be >= 1");
            const ScenarioConfig base = o.load();

            std::vector<ScenarioConfig> per_value;
            for (const auto &v : s.values)
            {
                ScenarioConfig cfg = base;
                if (s.axis == "channel")
                {
                    auto t = parse_channel_type(v);
                    if (!t)
                        throw UsageError("--values: unknown channel type '" + v + "'");
                    cfg.channel_type = *t;
                }
                else
                {
                    double x = 0.0;
                    std::istringstream is(v);
                    if (!(is >> x) || !is.eof())
                        throw UsageError("--values: not a number: '" + v + "'");
                    (s.axis == "beamwidth" ? cfg.rx_antenna.hpbw_deg : cfg.source_rate_bps) = x;
                }
                cfg.validate();
                per_value.push_back(cfg);
            }

            // Every (value, replica) pair is independent; results land in a
            // pre-sized slot so aggregation order never depends on scheduling.
            const std::size_t reps = static_cast<std::size_t>(s.replicas);
            const std::size_t n = per_value.size() * reps;
            std::vector<FlowStats> results(n);
            std::vector<std::string> errors(n);
            const fs::path dir = o.out("sweep");
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t k; (k = next++) < n;)
                {
                    ScenarioConfig cfg = per_value[k / reps];
                    cfg.seed = base.seed + k % reps;
                    try
                    {
                        results[k] = run(cfg);
                        write_run(dir / (s.axis + "=" + s.values[k / reps]) / ("rep" + std::to_string(k % reps)),
                                  cfg, results[k], false);
                    }
                    catch (const std::exception &e)
                    {
                        errors[k] = e.what();
                    }
                }
            };
            unsigned jobs = s.jobs > 0 ? static_cast<unsigned>(s.jobs) : std::max(1u, std::thread::hardware_concurrency());
            jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
            {
                std::vector<std::jthread> pool;
                for (unsigned j = 0; j < jobs; ++j)
                    pool.emplace_back(worker);
            }
            for (const auto &e : errors)
                if (!e.empty())
                    throw std::runtime_error(e);

            std::ostringstream table;
            table << "value\treplicas\tmean_throughput_bps\tthroughput_ci95_bps\tlatency_mean_s\tlatency_ci95_s"
                     "\tlatency_p50_s\tlatency_p90_s\tlatency_p99_s\n";
            for (std::size_t v = 0; v < per_value.size(); ++v)
            {
                std::vector<double> thr, lat_means, pooled;
                for (std::size_t r = 0; r < reps; ++r)
                {
                    const auto &st = results[v * reps + r];
                    thr.push_back(st.mean_throughput_bps());
                    const auto lat = st.latencies();
                    if (!lat.empty())
                        lat_means.push_back(mean(lat));
                    pooled.insert(pooled.end(), lat.begin(), lat.end());
                }
                auto num = [](bool ok, double x) { return ok ? format_number(x) : std::string("nan"); };
                table << s.values[v] << '\t' << reps << '\t' << format_number(mean(thr)) << '\t'
                      << format_number(ci95_half_width(thr)) << '\t' << num(!lat_means.empty(), lat_means.empty() ? 0 : mean(lat_means))
                      << '\t' << num(!lat_means.empty(), lat_means.empty() ? 0 : ci95_half_width(lat_means)) << '\t'
                      << num(!pooled.empty(), pooled.empty() ? 0 : percentile(pooled, 50.0)) << '\t'
                      << num(!pooled.empty(), pooled.empty() ? 0 : percentile(pooled, 90.0)) << '\t'
                      << num(!pooled.empty(), pooled.empty() ? 0 : percentile(pooled, 99.0)) << '\n';
            }
            fs::create_directories(dir);
            write_text(dir / "sweep.tsv", table.str());
            out << table.str();
            return kOk;
        }

        struct StatsOptions
        {
            std::vector<std::string> inputs;
            std::string kind;
            int bins = 36;
            std::string aoa = "all";
            std::string los = "any";
            std::string out;
        };

        bool keep_los(const std::string &filter, double los_flag)
        {
            if (filter == "los")
                return los_flag != 0.0;
            if (filter == "nlos")
                return los_flag == 0.0;
            return true;
        }

        int cmd_stats(const StatsOptions &s, std::ostream &out)
        {
            if (s.kind != "cdf" && s.kind != "aoa_hist" && s.kind != "power_trace")
                throw UsageError("--kind: expected cdf, aoa_hist or power_trace, got '" + s.kind + "'");
            if (s.aoa != "all" && s.aoa != "strongest")
                throw UsageError("--aoa: expected all or strongest");
            if (s.los != "any" && s.los != "los" && s.los != "nlos")
                throw UsageError("--los: expected any, los or nlos");
            if (s.kind == "power_trace" && s.inputs.size() != 1)
                throw UsageError("power_trace takes exactly one --input");

            std::ostringstream table;
            if (s.kind == "cdf")
            {
                std::vector<double> samples;
                for (const auto &in : s.inputs)
                {
                    const Table t = read_table(fs::path(in) / "power_trace.tsv");
                    const auto p = t.numbers("rx_dbm"), los = t.numbers("los");
                    for (std::size_t i = 0; i < p.size(); ++i)
                        if (std::isfinite(p[i]) && keep_los(s.los, los[i]))
                            samples.push_back(p[i]);
                }
                if (samples.empty())
                    throw std::runtime_error("cdf: no finite received-power samples in the inputs");
                table << "rx_dbm\tprobability\n";
                for (const auto &pt : ecdf(samples))
                    table << format_number(pt.value) << '\t' << format_number(pt.probability) << '\n';
            }
            else if (s.kind == "aoa_hist")
            {
                std::vector<double> angles;
                const char *file = s.aoa == "all" ? "mpcs.tsv" : "power_trace.tsv";
                for (const auto &in : s.inputs)
                {
                    const Table t = read_table(fs::path(in) / file);
                    const auto a = t.numbers("aoa_deg"), los = t.numbers("los");
                    for (std::size_t i = 0; i < a.size(); ++i)
                        if (keep_los(s.los, los[i]))
                            angles.push_back(a[i]);
                }
                if (angles.empty())
                    throw std::runtime_error("aoa_hist: no angles in the inputs");
                const auto h = angle_histogram(angles, s.bins);
                table << "bin_center_deg\tfraction\n";
                for (std::size_t k = 0; k < h.fraction.size(); ++k)
                    table << format_number(h.bin_center_deg[k]) << '\t' << format_number(h.fraction[k]) << '\n';
            }
            else
            {
                const Table t = read_table(fs::path(s.inputs.front()) / "power_trace.tsv");
                const std::size_t ct = t.column("t"), cp = t.column("rx_dbm"), cl = t.column("los");
                table << "t\trx_dbm\tlos\n";
                for (const auto &r : t.rows)
                    table << r.at(ct) << '\t' << r.at(cp) << '\t' << r.at(cl) << '\n';
            }
            const fs::path dest = s.out.empty() ? fs::path(s.inputs.front()) / (s.kind + ".tsv") : fs::path(s.out);
            if (dest.has_parent_path())
                fs::create_directories(dest.parent_path());
            write_text(dest, table.str());
            out << "wrote " << dest.string() << "\n";
            return kOk;
        }
    }

    int main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"thzsim: indoor link simulator above 100 GHz"};
        app.require_subcommand(1);

        Overrides run_o, trace_o, sweep_o;
        auto *run_cmd = app.add_subcommand("run", "Simulate one scenario and write its result tables");
        run_o.add_to(*run_cmd);
        auto *trace_cmd = app.add_subcommand("raytrace", "Trace the scenario trajectory and export a ray file");
        trace_o.add_to(*trace_cmd, false);

        SweepOptions sweep;
        auto *sweep_cmd = app.add_subcommand("sweep", "Run replicated simulations over one parameter axis");
        sweep_o.add_to(*sweep_cmd);
        sweep_cmd->add_option("--axis", sweep.axis, "beamwidth, source_rate or channel")->required();
        sweep_cmd->add_option("--values", sweep.values, "Axis values")->delimiter(',');
        sweep_cmd->add_option("--replicas", sweep.replicas, "Replications per value (seeds seed..seed+n-1)");
        sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads (0 = all cores)");

        StatsOptions stats;
        auto *stats_cmd = app.add_subcommand("stats", "Build figure tables from run outputs");
        stats_cmd->add_option("--input", stats.inputs, "Run output directory (repeatable)")
            ->required()
            ->check(CLI::ExistingDirectory);
        stats_cmd->add_option("--kind", stats.kind, "cdf, aoa_hist or power_trace")->required();
        stats_cmd->add_option("--bins", stats.bins, "Histogram bins");
        stats_cmd->add_option("--aoa", stats.aoa, "aoa_hist source: all MPCs or strongest path");
        stats_cmd->add_option("--los", stats.los, "Filter samples: any, los or nlos");
        stats_cmd->add_option("--out", stats.out, "Output file (default <input>/<kind>.tsv)");

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try
        {
            app.parse(reversed);
        }
        catch (const CLI::CallForHelp &)
        {
            out << app.help();
            return kOk;
        }
        catch (const CLI::CallForAllHelp &)
        {
            out << app.help("", CLI::AppFormatMode::All);
            return kOk;
        }
        catch (const CLI::ParseError &e)
        {
            err << "thzsim: " << e.what() << "\n";
            return kUsageError;
        }

        try
        {
            if (run_cmd->parsed())
                return cmd_run(run_o, out);
            if (trace_cmd->parsed())
                return cmd_raytrace(trace_o, out);
            if (sweep_cmd->parsed())
                return cmd_sweep(sweep_o, sweep, out);
            return cmd_stats(stats, out);
        }
        catch (const UsageError &e)
        {
            err << "thzsim: " << e.what() << "\n";
            return kUsageError;
        }
        catch (const ConfigError &e)
        {
            err << "thzsim: " << e.what() << "\n";
            return kUsageError;
        }
        catch (const std::exception &e)
        {
            err << "thzsim: " << e.what() << "\n";
            return kRuntimeError;
        }
    }
}
