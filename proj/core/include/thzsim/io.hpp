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

#ifndef THZSIM_IO_HPP
#define THZSIM_IO_HPP

#include "thzsim/config_error.hpp"
#include "thzsim/engine.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace thz
{
    // ---- scenario files -------------------------------------------------
    //
    // INI-style text: "[section]" headers, "key = value" lines, '#' starts a
    // comment. Vectors are "x y z"; lists are separated by ';'.

    ScenarioConfig parse_scenario(const std::string &text, const std::filesystem::path &base_dir = {});
    ScenarioConfig load_scenario(const std::filesystem::path &path);
    std::string format_scenario(const ScenarioConfig &cfg);
    void save_scenario(const ScenarioConfig &cfg, const std::filesystem::path &path);

    // ---- ray files --------------------------------------------------------

    inline constexpr const char *kRayFileMagic = "# thzsim-rays v1";

    enum class RayKind
    {
        Direct,
        Penetrated,
        Reflected
    };
    const char *to_string(RayKind k);

    // One line of a ray file. Gain and phase describe the interaction
    // coefficient of the path (spreading and absorption are applied later).
    struct RayRecord
    {
        std::size_t timestep = 0;
        RayKind kind = RayKind::Direct;
        double delay_s = 0.0;
        double path_gain_db = 0.0;
        double phase_rad = 0.0;
        double aoa_az_deg = 0.0, aoa_el_deg = 0.0;
        double aod_az_deg = 0.0, aod_el_deg = 0.0;
        int order = 0;

        bool operator==(const RayRecord &) const = default;
    };

    struct RayFile
    {
        std::vector<RayRecord> records;
        bool operator==(const RayFile &) const = default;
    };

    RayRecord to_record(const RayPath &ray, std::size_t timestep);
    RayPath from_record(const RayRecord &rec);

    std::string format_rays(const RayFile &file);
    RayFile parse_rays(const std::string &text);

    void export_rays(const std::filesystem::path &path, const std::vector<std::vector<RayPath>> &per_timestep);
    void write_ray_file(const std::filesystem::path &path, const RayFile &file);
    RayFile read_ray_file(const std::filesystem::path &path);
    std::map<std::size_t, std::vector<RayPath>> load_rays(const std::filesystem::path &path);

    // ---- result tables ----------------------------------------------------

    // Fixed-precision decimal used for every numeric table cell.
    std::string format_number(double v);

    void write_packets(std::ostream &os, const FlowStats &stats);
    void write_power_trace(std::ostream &os, const FlowStats &stats);
    void write_throughput(std::ostream &os, const std::vector<ThroughputSample> &series);
    void write_mpcs(std::ostream &os, const std::vector<ChannelSnapshot> &snapshots);
    void write_summary(std::ostream &os, const ScenarioConfig &cfg, const FlowStats &stats);

    struct Table
    {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        std::size_t column(const std::string &name) const; // throws when absent
        std::vector<double> numbers(const std::string &name) const;
    };

    // Tab-separated table with a header row; throws naming the file on failure.
    Table read_table(const std::filesystem::path &path);

    std::string read_text(const std::filesystem::path &path);
    void write_text(const std::filesystem::path &path, const std::string &text);
}

#endif
