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

#include "thzsim/io.hpp"
#include "thzsim/constants.hpp"
#include "thzsim/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace thz
{
    namespace
    {
        std::string summarize(const std::vector<ConfigIssue> &issues)
        {
            std::string msg = "invalid scenario:";
            for (const auto &i : issues)
            {
                msg += "\n  " + i.key;
                if (i.line > 0)
                    msg += " (line " + std::to_string(i.line) + ")";
                msg += ": " + i.reason;
            }
            return msg;
        }

        std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return std::string(s.substr(b, e - b + 1));
        }

        std::vector<std::string> split(const std::string &s, char sep)
        {
            std::vector<std::string> out;
            std::string cur;
            std::istringstream is(s);
            while (std::getline(is, cur, sep))
                out.push_back(trim(cur));
            return out;
        }

        std::vector<std::string> words(const std::string &s)
        {
            std::vector<std::string> out;
            std::istringstream is(s);
            std::string w;
            while (is >> w)
                out.push_back(w);
            return out;
        }

        bool parse_double(const std::string &s, double &out)
        {
            const char *b = s.data(), *e = s.data() + s.size();
            auto [p, ec] = std::from_chars(b, e, out);
            return ec == std::errc() && p == e && std::isfinite(out);
        }

        std::string shortest(double v)
        {
            char buf[64];
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, p);
        }

        std::string full(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        struct Entry
        {
            std::string value;
            int line;
            bool used = false;
        };

        struct Ini
        {
            std::map<std::string, int> section_lines;
            std::map<std::string, std::map<std::string, Entry>> sections;
        };

        const std::set<std::string> kSections = {"room", "materials", "mobility", "channel", "channel.hbc",
                                                 "channel.fsc", "antenna.tx", "antenna.rx", "phy", "traffic",
                                                 "sim"};

        Ini parse_ini(const std::string &text, std::vector<ConfigIssue> &issues)
        {
            Ini ini;
            std::string section;
            std::istringstream is(text);
            std::string raw;
            int line = 0;
            while (std::getline(is, raw))
            {
                ++line;
                std::string s = raw;
                if (auto h = s.find('#'); h != std::string::npos)
                    s.erase(h);
                s = trim(s);
                if (s.empty())
                    continue;
                if (s.front() == '[')
                {
                    if (s.back() != ']')
                    {
                        issues.push_back({"", line, "malformed section header"});
                        continue;
                    }
                    section = trim(s.substr(1, s.size() - 2));
                    if (!kSections.count(section))
                        issues.push_back({section, line, "unknown section"});
                    else if (ini.section_lines.count(section))
                        issues.push_back({section, line, "duplicate section"});
                    ini.section_lines.emplace(section, line);
                    ini.sections[section];
                    continue;
                }
                const auto eq = s.find('=');
                if (eq == std::string::npos)
                {
                    issues.push_back({section, line, "expected key = value"});
                    continue;
                }
                const std::string key = trim(s.substr(0, eq));
                if (section.empty())
                {
                    issues.push_back({key, line, "key outside any section"});
                    continue;
                }
                auto &sec = ini.sections[section];
                if (sec.count(key))
                {
                    issues.push_back({section + "." + key, line, "duplicate key"});
                    continue;
                }
                sec.emplace(key, Entry{trim(s.substr(eq + 1)), line});
            }
            return ini;
        }

        // Typed access to one section; records issues instead of throwing.
        class Reader
        {
        public:
            Reader(Ini &ini, std::string section, std::vector<ConfigIssue> &issues)
                : section_(std::move(section)), issues_(issues)
            {
                auto it = ini.sections.find(section_);
                if (it != ini.sections.end())
                    entries_ = &it->second;
            }

            const Entry *find(const std::string &key)
            {
                if (!entries_)
                    return nullptr;
                auto it = entries_->find(key);
                if (it == entries_->end())
                    return nullptr;
                it->second.used = true;
                return &it->second;
            }

            void fail(const std::string &key, int line, const std::string &reason)
            {
                issues_.push_back({section_ + "." + key, line, reason});
            }

            void missing(const std::string &key) { fail(key, 0, "missing required key"); }

            void number(const std::string &key, double &out, bool required = false)
            {
                const Entry *e = find(key);
                if (!e)
                {
                    if (required)
                        missing(key);
                    return;
                }
                if (!parse_double(e->value, out))
                    fail(key, e->line, "not a finite number: '" + e->value + "'");
            }

            template <typename Int>
            void integer(const std::string &key, Int &out)
            {
                const Entry *e = find(key);
                if (!e)
                    return;
                Int v{};
                auto [p, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
                if (ec != std::errc() || p != e->value.data() + e->value.size())
                    fail(key, e->line, "not an integer in range: '" + e->value + "'");
                else
                    out = v;
            }

            void text(const std::string &key, std::string &out, bool required = false)
            {
                const Entry *e = find(key);
                if (!e)
                {
                    if (required)
                        missing(key);
                    return;
                }
                out = e->value;
            }

            void vectors(const std::string &key, std::vector<Vec3> &out, bool required)
            {
                const Entry *e = find(key);
                if (!e)
                {
                    if (required)
                        missing(key);
                    return;
                }
                out.clear();
                for (const auto &item : split(e->value, ';'))
                {
                    const auto w = words(item);
                    Vec3 v;
                    if (w.size() != 3 || !parse_double(w[0], v.x) || !parse_double(w[1], v.y) ||
                        !parse_double(w[2], v.z))
                    {
                        fail(key, e->line, "expected 'x y z' points separated by ';'");
                        return;
                    }
                    out.push_back(v);
                }
            }

            void count_law(const std::string &key, CountLaw &out)
            {
                const Entry *e = find(key);
                if (!e)
                    return;
                const auto w = words(e->value);
                double mean = 0.0;
                if (w.size() != 2 || !parse_double(w[1], mean) || (w[0] != "fixed" && w[0] != "poisson+1"))
                {
                    fail(key, e->line, "expected 'fixed <n>' or 'poisson+1 <mean>'");
                    return;
                }
                out.kind = w[0] == "fixed" ? CountLaw::Kind::Fixed : CountLaw::Kind::PoissonPlusOne;
                out.mean = mean;
            }

            void unused()
            {
                if (!entries_)
                    return;
                for (const auto &[k, e] : *entries_)
                    if (!e.used)
                        fail(k, e.line, "unknown key");
            }

            int line_of(const std::string &key) const
            {
                if (!entries_)
                    return 0;
                auto it = entries_->find(key);
                return it == entries_->end() ? 0 : it->second.line;
            }

        private:
            std::string section_;
            std::vector<ConfigIssue> &issues_;
            std::map<std::string, Entry> *entries_ = nullptr;
        };

        const std::array<const char *, kSurfaceCount> kSurfaceKeys = {"wall_x_min", "wall_x_max", "wall_y_min",
                                                                     "wall_y_max", "floor",      "ceiling"};

        void read_antenna(Reader &r, AntennaState &a)
        {
            r.number("max_gain_dbi", a.max_gain_dbi);
            r.number("hpbw_deg", a.hpbw_deg);
            r.number("rotation_speed_deg_per_s", a.rotation_speed_deg_per_s);
            r.number("initial_phase_deg", a.initial_phase_deg);
            r.number("side_lobe_floor_db", a.side_lobe_floor_db);
            if (const Entry *e = r.find("mode"))
            {
                if (e->value == "static")
                    a.mode = AntennaMode::Static;
                else if (e->value == "rotating")
                    a.mode = AntennaMode::Rotating;
                else
                    r.fail("mode", e->line, "expected 'static' or 'rotating'");
            }
        }

        // Line for an issue key such as "mobility.tx_waypoints[2]".
        int locate(const Ini &ini, const std::string &key)
        {
            std::string k = key.substr(0, key.find('['));
            for (const auto &[name, entries] : ini.sections)
            {
                if (k == name)
                    return ini.section_lines.at(name);
                if (k.rfind(name + ".", 0) == 0)
                {
                    auto it = entries.find(k.substr(name.size() + 1));
                    if (it != entries.end())
                        return it->second.line;
                }
            }
            return 0;
        }
    }

    ConfigError::ConfigError(std::vector<ConfigIssue> issues)
        : std::runtime_error(summarize(issues)), issues_(std::move(issues))
    {
    }

    ScenarioConfig parse_scenario(const std::string &text, const std::filesystem::path &base_dir)
    {
        std::vector<ConfigIssue> issues;
        Ini ini = parse_ini(text, issues);
        ScenarioConfig cfg;

        {
            Reader r(ini, "materials", issues);
            auto it = ini.sections.find("materials");
            if (it != ini.sections.end())
                for (auto &[name, e] : it->second)
                {
                    e.used = true;
                    const auto w = words(e.value);
                    Material m{name, 1.0, 0.0};
                    if (w.empty() || w.size() > 2 || !parse_double(w[0], m.relative_permittivity) ||
                        (w.size() == 2 && !parse_double(w[1], m.roughness_loss_db)))
                    {
                        r.fail(name, e.line, "expected '<permittivity> [roughness_loss_db]'");
                        continue;
                    }
                    try
                    {
                        m.validate();
                    }
                    catch (const std::invalid_argument &ex)
                    {
                        r.fail(name, e.line, ex.what());
                    }
                    cfg.materials[name] = m;
                }
        }

        {
            Reader r(ini, "room", issues);
            r.number("width", cfg.room.width, true);
            r.number("depth", cfg.room.depth, true);
            r.number("height", cfg.room.height, true);
            for (int s = 0; s < kSurfaceCount; ++s)
            {
                std::string name = "plaster";
                r.text(kSurfaceKeys[s], name);
                if (auto it = cfg.materials.find(name); it != cfg.materials.end())
                    cfg.room.surfaces[s] = it->second;
                else if (name == "plaster")
                    cfg.room.surfaces[s] = plaster();
                else if (name == "glass")
                    cfg.room.surfaces[s] = glass();
                else if (name == "wood")
                    cfg.room.surfaces[s] = wood();
                else
                    r.fail(kSurfaceKeys[s], r.line_of(kSurfaceKeys[s]), "unknown material '" + name + "'");
                cfg.materials.emplace(cfg.room.surfaces[s].name, cfg.room.surfaces[s]);
            }
            if (const Entry *e = r.find("obstacles"); e && !e->value.empty())
            {
                for (const auto &item : split(e->value, ';'))
                {
                    const auto w = words(item);
                    double v[7] = {};
                    bool ok = w.size() == 6 || w.size() == 7;
                    for (std::size_t i = 0; ok && i < w.size(); ++i)
                        ok = parse_double(w[i], v[i]);
                    if (!ok)
                    {
                        r.fail("obstacles", e->line,
                               "expected 'x0 y0 z0 x1 y1 z1 [penetration_loss_db]' boxes separated by ';'");
                        break;
                    }
                    Box b{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, std::nullopt};
                    if (w.size() == 7)
                        b.penetration_loss_db = v[6];
                    cfg.room.obstacles.push_back(b);
                }
            }
            r.number("penetration_loss_db", cfg.penetration_loss_db);
            if (const Entry *e = r.find("polarization"))
            {
                if (e->value == "TE")
                    cfg.polarization = Polarization::TE;
                else if (e->value == "TM")
                    cfg.polarization = Polarization::TM;
                else
                    r.fail("polarization", e->line, "expected TE or TM");
            }
            r.unused();
        }

        {
            Reader r(ini, "mobility", issues);
            r.vectors("tx_waypoints", cfg.tx_waypoints, true);
            r.vectors("rx_waypoints", cfg.rx_waypoints, true);
            r.number("speed_mps", cfg.speed_mps);
            r.unused();
        }

        {
            Reader r(ini, "channel", issues);
            if (const Entry *e = r.find("type"))
            {
                if (auto t = parse_channel_type(e->value))
                    cfg.channel_type = *t;
                else
                    r.fail("type", e->line, "expected LOS_BASELINE, FSC or HBC");
            }
            r.number("carrier_hz", cfg.grid.carrier_hz);
            r.number("bandwidth_hz", cfg.grid.bandwidth_hz);
            r.integer("n_bins", cfg.grid.n_bins);
            if (const Entry *e = r.find("absorption"))
            {
                cfg.absorption.entries.clear();
                if (e->value != "none")
                    for (const auto &item : split(e->value, ';'))
                    {
                        const auto w = words(item);
                        AbsorptionTable::Entry en{};
                        if (w.size() != 2 || !parse_double(w[0], en.start_hz) || !parse_double(w[1], en.db_per_m))
                        {
                            r.fail("absorption", e->line, "expected '<start_hz> <db_per_m>' pairs separated by ';'");
                            break;
                        }
                        cfg.absorption.entries.push_back(en);
                    }
            }
            r.integer("max_reflection_order", cfg.max_reflection_order);
            if (const Entry *e = r.find("ray_file"))
            {
                std::filesystem::path p = e->value;
                if (p.is_relative() && !base_dir.empty())
                    p = base_dir / p;
                cfg.ray_file = p.string();
            }
            r.unused();
        }

        {
            Reader r(ini, "channel.hbc", issues);
            auto &h = cfg.hbc;
            r.number("n_nonrt_clusters_mean", h.n_nonrt_clusters_mean);
            r.number("subpaths_pre_mean", h.subpaths_pre_mean);
            r.number("subpaths_post_mean", h.subpaths_post_mean);
            r.number("subpath_delay_spread_s", h.subpath_delay_spread_s);
            r.number("subpath_angle_spread_deg", h.subpath_angle_spread_deg);
            r.number("subpath_decay_db_per_ns", h.subpath_decay_db_per_ns);
            r.number("nonrt_excess_loss_db", h.nonrt_excess_loss_db);
            r.number("nonrt_shadowing_db", h.nonrt_shadowing_db);
            r.number("nonrt_delay_mean_s", h.nonrt_delay_mean_s);
            r.unused();
        }

        {
            Reader r(ini, "channel.fsc", issues);
            auto &f = cfg.fsc;
            r.count_law("n_clusters", f.n_clusters);
            r.count_law("subpaths", f.subpaths);
            r.count_law("n_lobes", f.n_lobes);
            r.number("cluster_interarrival_s", f.cluster_interarrival_s);
            r.number("intra_cluster_delay_s", f.intra_cluster_delay_s);
            r.number("cluster_decay_db_per_ns", f.cluster_decay_db_per_ns);
            r.number("subpath_decay_db_per_ns", f.subpath_decay_db_per_ns);
            r.number("lobe_angle_spread_deg", f.lobe_angle_spread_deg);
            r.number("nlos_excess_loss_db", f.nlos_excess_loss_db);
            r.number("nlos_shadowing_db", f.nlos_shadowing_db);
            r.unused();
        }

        for (const char *side : {"antenna.tx", "antenna.rx"})
        {
            Reader r(ini, side, issues);
            read_antenna(r, side == std::string("antenna.tx") ? cfg.tx_antenna : cfg.rx_antenna);
            r.unused();
        }

        {
            Reader r(ini, "phy", issues);
            r.number("tx_power_dbm", cfg.phy.tx_power_dbm);
            r.number("noise_floor_dbm", cfg.phy.noise_floor_dbm);
            r.number("max_phy_rate_bps", cfg.phy.max_phy_rate_bps);
            r.number("decode_threshold_db", cfg.phy.decode_threshold_db);
            r.number("alignment_dwell_s", cfg.phy.alignment_dwell_s);
            r.unused();
        }

        {
            Reader r(ini, "traffic", issues);
            r.number("source_rate_bps", cfg.source_rate_bps);
            r.integer("packet_bytes", cfg.packet_bytes);
            r.unused();
        }

        {
            Reader r(ini, "sim", issues);
            r.number("duration_s", cfg.duration_s);
            r.number("channel_update_interval_s", cfg.channel_update_interval_s);
            r.integer("seed", cfg.seed);
            r.number("throughput_window_s", cfg.throughput_window_s);
            r.number("link_down_timeout_s", cfg.link_down_timeout_s);
            r.unused();
        }

        if (issues.empty())
        {
            try
            {
                cfg.validate();
            }
            catch (const ConfigError &e)
            {
                for (auto issue : e.issues())
                {
                    if (issue.line == 0)
                        issue.line = locate(ini, issue.key);
                    issues.push_back(issue);
                }
            }
        }
        if (!issues.empty())
            throw ConfigError(std::move(issues));
        return cfg;
    }

    ScenarioConfig load_scenario(const std::filesystem::path &path)
    {
        return parse_scenario(read_text(path), path.parent_path());
    }

    std::string format_scenario(const ScenarioConfig &cfg)
    {
        std::ostringstream os;
        auto vec = [](const Vec3 &v) { return shortest(v.x) + " " + shortest(v.y) + " " + shortest(v.z); };
        auto vecs = [&](const std::vector<Vec3> &vs) {
            std::string s;
            for (std::size_t i = 0; i < vs.size(); ++i)
                s += (i ? "; " : "") + vec(vs[i]);
            return s;
        };
        auto law = [](const CountLaw &c) {
            return std::string(c.kind == CountLaw::Kind::Fixed ? "fixed " : "poisson+1 ") + shortest(c.mean);
        };

        std::map<std::string, Material> materials = cfg.materials;
        for (const auto &m : cfg.room.surfaces)
            materials.emplace(m.name, m);
        os << "[materials]\n";
        for (const auto &[name, m] : materials)
            os << name << " = " << shortest(m.relative_permittivity) << " " << shortest(m.roughness_loss_db) << "\n";

        os << "\n[room]\n";
        os << "width = " << shortest(cfg.room.width) << "\n";
        os << "depth = " << shortest(cfg.room.depth) << "\n";
        os << "height = " << shortest(cfg.room.height) << "\n";
        for (int s = 0; s < kSurfaceCount; ++s)
            os << kSurfaceKeys[s] << " = " << cfg.room.surfaces[s].name << "\n";
        os << "obstacles = ";
        for (std::size_t i = 0; i < cfg.room.obstacles.size(); ++i)
        {
            const auto &b = cfg.room.obstacles[i];
            os << (i ? "; " : "") << vec(b.lo) << " " << vec(b.hi);
            if (b.penetration_loss_db)
                os << " " << shortest(*b.penetration_loss_db);
        }
        os << "\n";
        os << "penetration_loss_db = " << shortest(cfg.penetration_loss_db) << "\n";
        os << "polarization = " << (cfg.polarization == Polarization::TE ? "TE" : "TM") << "\n";

        os << "\n[mobility]\n";
        os << "tx_waypoints = " << vecs(cfg.tx_waypoints) << "\n";
        os << "rx_waypoints = " << vecs(cfg.rx_waypoints) << "\n";
        os << "speed_mps = " << shortest(cfg.speed_mps) << "\n";

        os << "\n[channel]\n";
        os << "type = " << to_string(cfg.channel_type) << "\n";
        os << "carrier_hz = " << shortest(cfg.grid.carrier_hz) << "\n";
        os << "bandwidth_hz = " << shortest(cfg.grid.bandwidth_hz) << "\n";
        os << "n_bins = " << cfg.grid.n_bins << "\n";
        os << "absorption = ";
        if (cfg.absorption.entries.empty())
            os << "none";
        for (std::size_t i = 0; i < cfg.absorption.entries.size(); ++i)
            os << (i ? "; " : "") << shortest(cfg.absorption.entries[i].start_hz) << " "
               << shortest(cfg.absorption.entries[i].db_per_m);
        os << "\n";
        os << "max_reflection_order = " << cfg.max_reflection_order << "\n";
        if (!cfg.ray_file.empty())
            os << "ray_file = " << cfg.ray_file << "\n";

        const auto &h = cfg.hbc;
        os << "\n[channel.hbc]\n";
        os << "n_nonrt_clusters_mean = " << shortest(h.n_nonrt_clusters_mean) << "\n";
        os << "subpaths_pre_mean = " << shortest(h.subpaths_pre_mean) << "\n";
        os << "subpaths_post_mean = " << shortest(h.subpaths_post_mean) << "\n";
        os << "subpath_delay_spread_s = " << shortest(h.subpath_delay_spread_s) << "\n";
        os << "subpath_angle_spread_deg = " << shortest(h.subpath_angle_spread_deg) << "\n";
        os << "subpath_decay_db_per_ns = " << shortest(h.subpath_decay_db_per_ns) << "\n";
        os << "nonrt_excess_loss_db = " << shortest(h.nonrt_excess_loss_db) << "\n";
        os << "nonrt_shadowing_db = " << shortest(h.nonrt_shadowing_db) << "\n";
        os << "nonrt_delay_mean_s = " << shortest(h.nonrt_delay_mean_s) << "\n";

        const auto &f = cfg.fsc;
        os << "\n[channel.fsc]\n";
        os << "n_clusters = " << law(f.n_clusters) << "\n";
        os << "subpaths = " << law(f.subpaths) << "\n";
        os << "n_lobes = " << law(f.n_lobes) << "\n";
        os << "cluster_interarrival_s = " << shortest(f.cluster_interarrival_s) << "\n";
        os << "intra_cluster_delay_s = " << shortest(f.intra_cluster_delay_s) << "\n";
        os << "cluster_decay_db_per_ns = " << shortest(f.cluster_decay_db_per_ns) << "\n";
        os << "subpath_decay_db_per_ns = " << shortest(f.subpath_decay_db_per_ns) << "\n";
        os << "lobe_angle_spread_deg = " << shortest(f.lobe_angle_spread_deg) << "\n";
        os << "nlos_excess_loss_db = " << shortest(f.nlos_excess_loss_db) << "\n";
        os << "nlos_shadowing_db = " << shortest(f.nlos_shadowing_db) << "\n";

        for (const auto *side : {&cfg.tx_antenna, &cfg.rx_antenna})
        {
            os << "\n[" << (side == &cfg.tx_antenna ? "antenna.tx" : "antenna.rx") << "]\n";
            os << "max_gain_dbi = " << shortest(side->max_gain_dbi) << "\n";
            os << "hpbw_deg = " << shortest(side->hpbw_deg) << "\n";
            os << "rotation_speed_deg_per_s = " << shortest(side->rotation_speed_deg_per_s) << "\n";
            os << "initial_phase_deg = " << shortest(side->initial_phase_deg) << "\n";
            os << "mode = " << (side->mode == AntennaMode::Static ? "static" : "rotating") << "\n";
            os << "side_lobe_floor_db = " << shortest(side->side_lobe_floor_db) << "\n";
        }

        os << "\n[phy]\n";
        os << "tx_power_dbm = " << shortest(cfg.phy.tx_power_dbm) << "\n";
        os << "noise_floor_dbm = " << shortest(cfg.phy.noise_floor_dbm) << "\n";
        os << "max_phy_rate_bps = " << shortest(cfg.phy.max_phy_rate_bps) << "\n";
        os << "decode_threshold_db = " << shortest(cfg.phy.decode_threshold_db) << "\n";
        os << "alignment_dwell_s = " << shortest(cfg.phy.alignment_dwell_s) << "\n";

        os << "\n[traffic]\n";
        os << "source_rate_bps = " << shortest(cfg.source_rate_bps) << "\n";
        os << "packet_bytes = " << cfg.packet_bytes << "\n";

        os << "\n[sim]\n";
        os << "duration_s = " << shortest(cfg.duration_s) << "\n";
        os << "channel_update_interval_s = " << shortest(cfg.channel_update_interval_s) << "\n";
        os << "seed = " << cfg.seed << "\n";
        os << "throughput_window_s = " << shortest(cfg.throughput_window_s) << "\n";
        os << "link_down_timeout_s = " << shortest(cfg.link_down_timeout_s) << "\n";
        return os.str();
    }

    void save_scenario(const ScenarioConfig &cfg, const std::filesystem::path &path)
    {
        write_text(path, format_scenario(cfg));
    }

    // ---- ray files --------------------------------------------------------

    const char *to_string(RayKind k)
    {
        switch (k)
        {
        case RayKind::Direct: return "direct";
        case RayKind::Penetrated: return "penetrated";
        case RayKind::Reflected: return "reflected";
        }
        return "?";
    }

    namespace
    {
        constexpr const char *kRayColumns =
            "# timestep kind delay_s path_gain_db phase_rad aoa_az_deg aoa_el_deg aod_az_deg aod_el_deg order";

        std::optional<RayKind> parse_kind(const std::string &s)
        {
            if (s == "direct")
                return RayKind::Direct;
            if (s == "penetrated")
                return RayKind::Penetrated;
            if (s == "reflected")
                return RayKind::Reflected;
            return std::nullopt;
        }
    }

    RayRecord to_record(const RayPath &ray, std::size_t timestep)
    {
        RayRecord r;
        r.timestep = timestep;
        r.kind = ray.order > 0 ? RayKind::Reflected : (ray.obstructed() ? RayKind::Penetrated : RayKind::Direct);
        r.delay_s = ray.delay;
        const auto g = ray.interaction_gain();
        r.path_gain_db = 20.0 * std::log10(std::abs(g));
        r.phase_rad = std::arg(g);
        r.aoa_az_deg = ray.aoa_az;
        r.aoa_el_deg = ray.aoa_el;
        r.aod_az_deg = ray.aod_az;
        r.aod_el_deg = ray.aod_el;
        r.order = ray.order;
        return r;
    }

    RayPath from_record(const RayRecord &rec)
    {
        RayPath p;
        p.order = rec.order;
        p.delay = rec.delay_s;
        p.path_length = rec.delay_s * kSpeedOfLight;
        p.aoa_az = rec.aoa_az_deg;
        p.aoa_el = rec.aoa_el_deg;
        p.aod_az = rec.aod_az_deg;
        p.aod_el = rec.aod_el_deg;
        if (rec.order == 0)
            p.penetration_loss_db = -rec.path_gain_db;
        else
        {
            // The combined coefficient goes on the first bounce.
            p.reflection_gains.assign(static_cast<std::size_t>(rec.order), {1.0, 0.0});
            p.reflection_gains[0] = std::polar(std::pow(10.0, rec.path_gain_db / 20.0), rec.phase_rad);
        }
        return p;
    }

    std::string format_rays(const RayFile &file)
    {
        std::string out = std::string(kRayFileMagic) + "\n" + kRayColumns + "\n";
        for (const auto &r : file.records)
        {
            out += std::to_string(r.timestep) + " " + to_string(r.kind);
            for (double v : {r.delay_s, r.path_gain_db, r.phase_rad, r.aoa_az_deg, r.aoa_el_deg, r.aod_az_deg,
                             r.aod_el_deg})
                out += " " + full(v);
            out += " " + std::to_string(r.order) + "\n";
        }
        return out;
    }

    RayFile parse_rays(const std::string &text)
    {
        std::istringstream is(text);
        std::string line;
        if (!std::getline(is, line) || trim(line).rfind("# thzsim-rays", 0) != 0)
            throw std::runtime_error("ray file: missing '# thzsim-rays' header");
        if (trim(line) != kRayFileMagic)
            throw std::runtime_error("ray file: unsupported version '" + trim(line) + "'");

        RayFile file;
        std::size_t index = 0;
        while (std::getline(is, line))
        {
            const std::string s = trim(line);
            if (s.empty() || s.front() == '#')
                continue;
            auto bad = [&](const std::string &why) {
                return std::runtime_error("ray file: record " + std::to_string(index) + ": " + why);
            };
            const auto w = words(s);
            if (w.size() != 10)
                throw bad("expected 10 fields, got " + std::to_string(w.size()));
            RayRecord r;
            auto [p, ec] = std::from_chars(w[0].data(), w[0].data() + w[0].size(), r.timestep);
            if (ec != std::errc() || p != w[0].data() + w[0].size())
                throw bad("bad timestep '" + w[0] + "'");
            auto kind = parse_kind(w[1]);
            if (!kind)
                throw bad("unknown path kind '" + w[1] + "'");
            r.kind = *kind;
            double *fields[] = {&r.delay_s, &r.path_gain_db, &r.phase_rad, &r.aoa_az_deg,
                                &r.aoa_el_deg, &r.aod_az_deg, &r.aod_el_deg};
            for (int i = 0; i < 7; ++i)
                if (!parse_double(w[2 + i], *fields[i]))
                    throw bad("bad number '" + w[2 + i] + "'");
            auto [q, ec2] = std::from_chars(w[9].data(), w[9].data() + w[9].size(), r.order);
            if (ec2 != std::errc() || q != w[9].data() + w[9].size() || r.order < 0)
                throw bad("bad order '" + w[9] + "'");
            if ((r.order == 0) == (r.kind == RayKind::Reflected))
                throw bad("kind does not match order");
            if (!(r.delay_s > 0.0))
                throw bad("delay must be > 0");
            file.records.push_back(r);
            ++index;
        }
        if (file.records.empty())
            throw std::runtime_error("ray file: no records");
        return file;
    }

    void write_ray_file(const std::filesystem::path &path, const RayFile &file)
    {
        write_text(path, format_rays(file));
    }

    RayFile read_ray_file(const std::filesystem::path &path)
    {
        try
        {
            return parse_rays(read_text(path));
        }
        catch (const std::runtime_error &e)
        {
            throw std::runtime_error(path.string() + ": " + e.what());
        }
    }

    void export_rays(const std::filesystem::path &path, const std::vector<std::vector<RayPath>> &per_timestep)
    {
        RayFile file;
        for (std::size_t t = 0; t < per_timestep.size(); ++t)
            for (const auto &ray : per_timestep[t])
                file.records.push_back(to_record(ray, t));
        write_ray_file(path, file);
    }

    std::map<std::size_t, std::vector<RayPath>> load_rays(const std::filesystem::path &path)
    {
        std::map<std::size_t, std::vector<RayPath>> out;
        for (const auto &rec : read_ray_file(path).records)
            out[rec.timestep].push_back(from_record(rec));
        return out;
    }

    // ---- result tables ----------------------------------------------------

    std::string format_number(double v)
    {
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return buf;
    }

    void write_packets(std::ostream &os, const FlowStats &stats)
    {
        os << "send_t\trecv_t\tlatency\n";
        for (const auto &p : stats.packets)
            os << format_number(p.send_t) << '\t' << format_number(p.recv_t) << '\t' << format_number(p.latency())
               << '\n';
    }

    void write_power_trace(std::ostream &os, const FlowStats &stats)
    {
        os << "t\trx_dbm\taoa_deg\tlos\n";
        for (const auto &s : stats.power_trace)
            os << format_number(s.t) << '\t' << format_number(s.rx_dbm) << '\t' << format_number(s.aoa_deg) << '\t'
               << (s.los ? 1 : 0) << '\n';
    }

    void write_throughput(std::ostream &os, const std::vector<ThroughputSample> &series)
    {
        os << "window_start\tbps\n";
        for (const auto &s : series)
            os << format_number(s.window_start) << '\t' << format_number(s.bps) << '\n';
    }

    void write_mpcs(std::ostream &os, const std::vector<ChannelSnapshot> &snapshots)
    {
        os << "t\tlos\tkind\tcluster\tdelay_s\taoa_deg\taod_deg\tpath_gain_db\ttx_gain_embedded\n";
        for (const auto &snap : snapshots)
        {
            if (!snap.cir)
                continue;
            for (const auto &m : snap.cir->mpcs)
                os << format_number(snap.t) << '\t' << (snap.los ? 1 : 0) << '\t' << to_string(m.kind) << '\t'
                   << m.cluster_id << '\t' << format_number(m.delay) << '\t' << format_number(m.aoa_az) << '\t'
                   << format_number(m.aod_az) << '\t' << format_number(m.path_gain_db()) << '\t'
                   << (m.tx_gain_embedded ? 1 : 0) << '\n';
        }
    }

    void write_summary(std::ostream &os, const ScenarioConfig &cfg, const FlowStats &stats)
    {
        auto line = [&](const char *key, const std::string &v) { os << key << " = " << v << '\n'; };
        line("channel", to_string(cfg.channel_type));
        line("seed", std::to_string(cfg.seed));
        line("source_rate_bps", format_number(cfg.source_rate_bps));
        line("rx_hpbw_deg", format_number(cfg.rx_antenna.hpbw_deg));
        line("duration_s", format_number(stats.duration_s));
        line("generated", std::to_string(stats.generated));
        line("delivered", std::to_string(stats.delivered()));
        line("dropped", std::to_string(stats.dropped));
        line("queued_at_end", std::to_string(stats.queued_at_end));
        line("in_flight_at_end", std::to_string(stats.in_flight_at_end));
        line("mean_throughput_bps", format_number(stats.mean_throughput_bps()));
        line("link_up_fraction", format_number(stats.duration_s > 0 ? stats.link_up_time_s / stats.duration_s : 0));
        const auto lat = stats.latencies();
        if (lat.empty())
        {
            for (const char *k : {"latency_mean_s", "latency_p50_s", "latency_p90_s", "latency_p99_s"})
                line(k, "nan");
            return;
        }
        line("latency_mean_s", format_number(mean(lat)));
        line("latency_p50_s", format_number(percentile(lat, 50.0)));
        line("latency_p90_s", format_number(percentile(lat, 90.0)));
        line("latency_p99_s", format_number(percentile(lat, 99.0)));
    }

    std::size_t Table::column(const std::string &name) const
    {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error("table has no column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }

    std::vector<double> Table::numbers(const std::string &name) const
    {
        const std::size_t c = column(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto &r : rows)
        {
            if (c >= r.size())
                throw std::runtime_error("short row in column '" + name + "'");
            if (r[c] == "-inf" || r[c] == "inf")
            {
                out.push_back(r[c] == "inf" ? HUGE_VAL : -HUGE_VAL);
                continue;
            }
            double v = 0.0;
            if (!parse_double(r[c], v))
                throw std::runtime_error("bad number '" + r[c] + "' in column '" + name + "'");
            out.push_back(v);
        }
        return out;
    }

    Table read_table(const std::filesystem::path &path)
    {
        std::istringstream is(read_text(path));
        Table t;
        std::string line;
        if (!std::getline(is, line))
            throw std::runtime_error(path.string() + ": empty table");
        t.header = split(line, '\t');
        while (std::getline(is, line))
            if (!line.empty())
                t.rows.push_back(split(line, '\t'));
        return t;
    }

    std::string read_text(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error(path.string() + ": cannot open for reading");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_text(const std::filesystem::path &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error(path.string() + ": cannot open for writing");
        out << text;
        if (!out)
            throw std::runtime_error(path.string() + ": write failed");
    }
}
