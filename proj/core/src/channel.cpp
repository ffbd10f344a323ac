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

#include "thzsim/channel.hpp"
#include "thzsim/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace thz
{
    void FrequencyGrid::validate() const
    {
        if (n_bins < 1)
            throw std::invalid_argument("frequency grid: n_bins must be >= 1");
        if (!(bandwidth_hz > 0.0))
            throw std::invalid_argument("frequency grid: bandwidth must be > 0");
        if (!(bin_center(0) > 0.0))
            throw std::invalid_argument("frequency grid: all bin centres must be > 0 Hz");
    }

    double FrequencyGrid::bin_center(int k) const
    {
        const double width = bandwidth_hz / n_bins;
        return carrier_hz - bandwidth_hz / 2.0 + (k + 0.5) * width;
    }

    std::vector<double> FrequencyGrid::bin_centers() const
    {
        std::vector<double> f(static_cast<std::size_t>(n_bins));
        for (int k = 0; k < n_bins; ++k)
            f[static_cast<std::size_t>(k)] = bin_center(k);
        return f;
    }

    AbsorptionTable AbsorptionTable::flat(double db_per_m)
    {
        return AbsorptionTable{{{0.0, db_per_m}}};
    }

    AbsorptionTable AbsorptionTable::defaults()
    {
        // Placeholder: a single flat coefficient over the D-band window. Water
        // vapour lines are far from 124-156 GHz, so the value is small.
        return AbsorptionTable{{{124e9, 0.005}, {156e9, 0.005}}};
    }

    void AbsorptionTable::validate() const
    {
        for (std::size_t i = 0; i < entries.size(); ++i)
        {
            if (!(entries[i].db_per_m >= 0.0))
                throw std::invalid_argument("absorption table: coefficients must be >= 0 dB/m");
            if (i > 0 && !(entries[i].start_hz > entries[i - 1].start_hz))
                throw std::invalid_argument("absorption table: start frequencies must be strictly increasing");
        }
    }

    double AbsorptionTable::db_per_m(double f_hz) const
    {
        if (entries.empty())
            return 0.0;
        auto it = std::upper_bound(entries.begin(), entries.end(), f_hz,
                                   [](double f, const Entry &e) { return f < e.start_hz; });
        if (it == entries.begin())
            return entries.front().db_per_m;
        return std::prev(it)->db_per_m;
    }

    double fspl_db(double distance_m, double f_hz)
    {
        return 20.0 * std::log10(4.0 * kPi * distance_m * f_hz / kSpeedOfLight);
    }

    std::complex<double> free_space_response(double path_length_m, double f_hz, const AbsorptionTable &abs)
    {
        const double spreading = kSpeedOfLight / (4.0 * kPi * path_length_m * f_hz);
        const double absorption = std::pow(10.0, -abs.db_per_m(f_hz) * path_length_m / 20.0);
        const double phase = -2.0 * kPi * f_hz * (path_length_m / kSpeedOfLight);
        return std::polar(spreading * absorption, phase);
    }

    const char *to_string(MpcKind k)
    {
        switch (k)
        {
        case MpcKind::Los: return "LOS";
        case MpcKind::RtCentral: return "RT_CENTRAL";
        case MpcKind::RtSubpath: return "RT_SUBPATH";
        case MpcKind::NonRtSubpath: return "NONRT_SUBPATH";
        case MpcKind::FscSubpath: return "FSC_SUBPATH";
        }
        return "?";
    }

    double Mpc::path_gain_db() const
    {
        double acc = 0.0;
        for (const auto &a : amplitude)
            acc += 20.0 * std::log10(std::abs(a));
        return acc / static_cast<double>(amplitude.size());
    }

    void Cir::validate() const
    {
        if (mpcs.empty())
            throw std::logic_error("channel impulse response is empty");
        double min_delay = std::numeric_limits<double>::infinity();
        int n_los = 0;
        double los_delay = 0.0;
        for (const auto &m : mpcs)
        {
            if (!(m.delay >= 0.0))
                throw std::logic_error("MPC with negative delay");
            if (m.amplitude.size() != static_cast<std::size_t>(grid.n_bins))
                throw std::logic_error("MPC amplitude length does not match the frequency grid");
            if (!(m.aoa_az >= 0.0 && m.aoa_az < 360.0 && m.aod_az >= 0.0 && m.aod_az < 360.0))
                throw std::logic_error("MPC angle not normalised to [0, 360)");
            min_delay = std::min(min_delay, m.delay);
            if (m.kind == MpcKind::Los)
            {
                ++n_los;
                los_delay = m.delay;
            }
        }
        if (los && (n_los != 1 || los_delay > min_delay))
            throw std::logic_error("LOS channel must hold exactly one LOS component with the minimum delay");
    }

    void HbcParams::validate() const
    {
        if (!(n_nonrt_clusters_mean >= 0.0 && subpaths_pre_mean >= 0.0 && subpaths_post_mean >= 0.0 &&
              nonrt_delay_mean_s >= 0.0))
            throw std::invalid_argument("HBC parameters: means must be >= 0");
        if (!(subpath_delay_spread_s >= 0.0 && subpath_angle_spread_deg >= 0.0 && nonrt_shadowing_db >= 0.0))
            throw std::invalid_argument("HBC parameters: spreads must be >= 0");
        if (!(subpath_decay_db_per_ns >= 0.0 && nonrt_excess_loss_db >= 0.0))
            throw std::invalid_argument("HBC parameters: losses must be >= 0");
    }

    int CountLaw::draw(Rng &rng) const
    {
        if (kind == Kind::Fixed)
            return static_cast<int>(std::lround(mean));
        if (mean <= 1.0)
            return 1;
        std::poisson_distribution<int> poisson(mean - 1.0);
        return 1 + poisson(rng);
    }

    void CountLaw::validate(const char *what) const
    {
        if (!(mean >= 1.0))
            throw std::invalid_argument(std::string("FSC parameters: ") + what + " mean must be >= 1");
    }

    void FscParams::validate() const
    {
        n_clusters.validate("cluster count");
        subpaths.validate("sub-path count");
        n_lobes.validate("lobe count");
        if (!(cluster_interarrival_s >= 0.0 && intra_cluster_delay_s >= 0.0 && lobe_angle_spread_deg >= 0.0 &&
              nlos_shadowing_db >= 0.0))
            throw std::invalid_argument("FSC parameters: delays and spreads must be >= 0");
        if (!(cluster_decay_db_per_ns >= 0.0 && subpath_decay_db_per_ns >= 0.0 && nlos_excess_loss_db >= 0.0))
            throw std::invalid_argument("FSC parameters: decay constants and losses must be >= 0");
    }

    namespace
    {
        double draw_exponential(Rng &rng, double mean)
        {
            if (mean <= 0.0)
                return 0.0;
            std::exponential_distribution<double> e(1.0 / mean);
            return e(rng);
        }

        double draw_normal(Rng &rng, double sigma)
        {
            if (sigma <= 0.0)
                return 0.0;
            std::normal_distribution<double> n(0.0, sigma);
            return n(rng);
        }

        int draw_poisson(Rng &rng, double mean)
        {
            if (mean <= 0.0)
                return 0;
            std::poisson_distribution<int> p(mean);
            return p(rng);
        }

        double draw_uniform(Rng &rng, double hi)
        {
            std::uniform_real_distribution<double> u(0.0, hi);
            return u(rng);
        }

        double amplitude_gain(const AntennaState &ant, double direction_deg)
        {
            return std::pow(10.0, gain_db(ant, direction_deg, 0.0) / 20.0);
        }

        void check_link(const Vec3 &tx, const Vec3 &rx)
        {
            if (!((rx - tx).norm() > 0.0))
                throw std::invalid_argument("channel: TX and RX coincide (distance must be > 0)");
        }
    }

    Cir gen_los_baseline(const FrequencyGrid &grid, double distance_m, const AbsorptionTable &abs)
    {
        if (!(distance_m > 0.0))
            throw std::invalid_argument("gen_los_baseline: distance must be > 0");
        return gen_los_baseline(grid, Vec3{0.0, 0.0, 0.0}, Vec3{distance_m, 0.0, 0.0}, abs);
    }

    Cir gen_los_baseline(const FrequencyGrid &grid, const Vec3 &tx, const Vec3 &rx, const AbsorptionTable &abs)
    {
        grid.validate();
        check_link(tx, rx);
        const double d = (rx - tx).norm();
        Cir cir;
        cir.los = true;
        cir.tx_pos = tx;
        cir.rx_pos = rx;
        cir.grid = grid;
        Mpc m;
        m.kind = MpcKind::Los;
        m.delay = d / kSpeedOfLight;
        m.amplitude.reserve(static_cast<std::size_t>(grid.n_bins));
        for (int k = 0; k < grid.n_bins; ++k)
            m.amplitude.push_back(free_space_response(d, grid.bin_center(k), abs));
        cir.mpcs.push_back(std::move(m));
        return cir;
    }

    std::vector<Mpc> hbc_rt_component(const std::vector<RayPath> &rays, const Vec3 &tx, const Vec3 &rx,
                                      const FrequencyGrid &grid, const AbsorptionTable &abs,
                                      const AntennaState &tx_pattern)
    {
        check_link(tx, rx);
        const double los_aoa = azimuth_deg(tx - rx);
        const double los_aod = azimuth_deg(rx - tx);

        std::vector<Mpc> out;
        out.reserve(rays.size());
        for (std::size_t l = 0; l < rays.size(); ++l)
        {
            const RayPath &ray = rays[l];
            Mpc m;
            m.kind = (ray.order == 0 && !ray.obstructed()) ? MpcKind::Los : MpcKind::RtCentral;
            m.cluster_id = static_cast<int>(l);
            m.delay = ray.delay;
            m.aoa_az = wrap_deg(ray.aoa_az - los_aoa);
            m.aod_az = wrap_deg(ray.aod_az - los_aod);
            m.tx_gain_embedded = true;
            const std::complex<double> weight = ray.interaction_gain() * amplitude_gain(tx_pattern, m.aod_az);
            m.amplitude.reserve(static_cast<std::size_t>(grid.n_bins));
            for (int k = 0; k < grid.n_bins; ++k)
                m.amplitude.push_back(free_space_response(ray.path_length, grid.bin_center(k), abs) * weight);
            out.push_back(std::move(m));
        }
        return out;
    }

    std::vector<Mpc> hbc_stochastic_component(const std::vector<Mpc> &rt_mpcs, const Vec3 &tx, const Vec3 &rx,
                                              const HbcParams &params, const FrequencyGrid &grid,
                                              const AbsorptionTable &abs, const AntennaState &tx_pattern, Rng &rng)
    {
        params.validate();
        check_link(tx, rx);
        const double min_delay = (rx - tx).norm() / kSpeedOfLight;
        const auto freqs = grid.bin_centers();
        std::vector<Mpc> out;

        // Builds one sub-path from a per-bin reference amplitude that carries
        // no TX pattern, delayed by offset relative to ref_delay.
        auto make_subpath = [&](const std::vector<std::complex<double>> &reference, double ref_delay, double offset,
                                double aoa, double aod, double extra_loss_db, MpcKind kind, int cluster,
                                bool apply_tx_pattern) {
            Mpc m;
            m.kind = kind;
            m.cluster_id = cluster;
            m.delay = ref_delay + offset;
            m.aoa_az = wrap_deg(aoa);
            m.aod_az = wrap_deg(aod);
            m.tx_gain_embedded = true;
            const double decay_db = params.subpath_decay_db_per_ns * std::abs(offset) * 1e9 + extra_loss_db;
            double scale = std::pow(10.0, -decay_db / 20.0);
            if (offset > 0.0) // longer path, extra spherical spreading
                scale *= ref_delay / m.delay;
            if (apply_tx_pattern)
                scale *= amplitude_gain(tx_pattern, m.aod_az);
            const double phase = draw_uniform(rng, 2.0 * kPi);
            m.amplitude.resize(reference.size());
            for (std::size_t k = 0; k < reference.size(); ++k)
                m.amplitude[k] = reference[k] * std::polar(scale, phase - 2.0 * kPi * freqs[k] * offset);
            return m;
        };

        // Sub-paths inside the ray-traced clusters.
        for (const Mpc &central : rt_mpcs)
        {
            const double central_gain = amplitude_gain(tx_pattern, central.aod_az);
            std::vector<std::complex<double>> reference(central.amplitude.size());
            for (std::size_t k = 0; k < reference.size(); ++k)
                reference[k] = central.amplitude[k] / central_gain;

            // Nothing may arrive before the direct path.
            const double max_pre_offset = 0.5 * (central.delay - min_delay);
            const int n_pre = max_pre_offset > 0.0 ? draw_poisson(rng, params.subpaths_pre_mean) : 0;
            const int n_post = draw_poisson(rng, params.subpaths_post_mean);
            for (int p = 0; p < n_pre + n_post; ++p)
            {
                double offset = draw_exponential(rng, params.subpath_delay_spread_s);
                if (p < n_pre)
                    offset = -std::min(offset, max_pre_offset);
                const double aoa = central.aoa_az + draw_normal(rng, params.subpath_angle_spread_deg);
                const double aod = central.aod_az + draw_normal(rng, params.subpath_angle_spread_deg);
                out.push_back(make_subpath(reference, central.delay, offset, aoa, aod, 0.0, MpcKind::RtSubpath,
                                           central.cluster_id, true));
            }
        }

        // Non-RT clusters, referenced to the strongest ray-traced component.
        const int n_clusters = draw_poisson(rng, params.n_nonrt_clusters_mean);
        if (n_clusters == 0)
            return out;

        std::vector<std::complex<double>> reference;
        double reference_delay = min_delay;
        const Mpc *strongest = nullptr;
        for (const Mpc &m : rt_mpcs)
            if (!strongest || m.path_gain_db() > strongest->path_gain_db())
                strongest = &m;
        if (strongest)
        {
            reference = strongest->amplitude;
            reference_delay = strongest->delay;
        }
        else
        {
            const double embedded = std::pow(10.0, tx_pattern.max_gain_dbi / 20.0);
            const double d = (rx - tx).norm();
            for (double f : freqs)
                reference.push_back(free_space_response(d, f, abs) * embedded);
        }
        // Reference magnitudes only; every non-RT sub-path gets its own phase.
        for (auto &r : reference)
            r = std::abs(r);

        int cluster_id = static_cast<int>(rt_mpcs.size());
        for (int q = 0; q < n_clusters; ++q, ++cluster_id)
        {
            const double centre_delay = min_delay + draw_exponential(rng, params.nonrt_delay_mean_s);
            const double loss = std::max(0.0, params.nonrt_excess_loss_db + draw_normal(rng, params.nonrt_shadowing_db));
            const double aoa = draw_uniform(rng, 360.0);
            const double aod = draw_uniform(rng, 360.0);

            // Re-reference the magnitude to the cluster centre: longer paths spread more.
            std::vector<std::complex<double>> centre_ref = reference;
            if (centre_delay > reference_delay)
                for (auto &r : centre_ref)
                    r *= reference_delay / centre_delay;

            const double max_pre_offset = 0.5 * (centre_delay - min_delay);
            const int n_pre = max_pre_offset > 0.0 ? draw_poisson(rng, params.subpaths_pre_mean) : 0;
            const int n_post = draw_poisson(rng, params.subpaths_post_mean);
            out.push_back(make_subpath(centre_ref, centre_delay, 0.0, aoa, aod, loss, MpcKind::NonRtSubpath, cluster_id,
                                       false));
            for (int s = 0; s < n_pre + n_post; ++s)
            {
                double offset = draw_exponential(rng, params.subpath_delay_spread_s);
                if (s < n_pre)
                    offset = -std::min(offset, max_pre_offset);
                const double sub_aoa = aoa + draw_normal(rng, params.subpath_angle_spread_deg);
                const double sub_aod = aod + draw_normal(rng, params.subpath_angle_spread_deg);
                out.push_back(make_subpath(centre_ref, centre_delay, offset, sub_aoa, sub_aod, loss,
                                           MpcKind::NonRtSubpath, cluster_id, false));
            }
        }
        return out;
    }

    Cir gen_hbc(const std::vector<RayPath> &rays, const Vec3 &tx, const Vec3 &rx, bool los, const HbcParams &params,
                const FrequencyGrid &grid, const AbsorptionTable &abs, const AntennaState &tx_pattern, Rng &rng)
    {
        grid.validate();
        Cir cir;
        cir.los = los;
        cir.tx_pos = tx;
        cir.rx_pos = rx;
        cir.grid = grid;
        cir.mpcs = hbc_rt_component(rays, tx, rx, grid, abs, tx_pattern);
        auto stochastic = hbc_stochastic_component(cir.mpcs, tx, rx, params, grid, abs, tx_pattern, rng);
        cir.mpcs.insert(cir.mpcs.end(), std::make_move_iterator(stochastic.begin()),
                        std::make_move_iterator(stochastic.end()));
        if (cir.mpcs.empty())
            throw std::runtime_error("gen_hbc: empty channel (no rays and no non-RT clusters)");
        return cir;
    }

    Cir gen_fsc(bool los, const Vec3 &tx, const Vec3 &rx, const FscParams &params, const FrequencyGrid &grid,
                const AbsorptionTable &abs, Rng &rng)
    {
        grid.validate();
        params.validate();
        check_link(tx, rx);
        const double d = (rx - tx).norm();
        const double base_delay = d / kSpeedOfLight;
        const auto freqs = grid.bin_centers();

        // Temporal structure: time clusters and their sub-paths.
        struct Slot
        {
            int cluster;
            double delay;
            double weight;
        };
        std::vector<Slot> slots;
        const int n_clusters = params.n_clusters.draw(rng);
        double cluster_excess = 0.0;
        for (int n = 0; n < n_clusters; ++n)
        {
            if (n > 0)
                cluster_excess += draw_exponential(rng, params.cluster_interarrival_s);
            const int n_sub = params.subpaths.draw(rng);
            double sub_excess = 0.0;
            for (int m = 0; m < n_sub; ++m)
            {
                if (m > 0)
                    sub_excess += draw_exponential(rng, params.intra_cluster_delay_s);
                const double decay_db = params.cluster_decay_db_per_ns * cluster_excess * 1e9 +
                                        params.subpath_decay_db_per_ns * sub_excess * 1e9;
                slots.push_back({n, base_delay + cluster_excess + sub_excess, std::pow(10.0, -decay_db / 10.0)});
            }
        }
        double total_weight = 0.0;
        for (const auto &s : slots)
            total_weight += s.weight;

        double budget_db = 0.0;
        if (!los)
            budget_db = -(params.nlos_excess_loss_db + draw_normal(rng, params.nlos_shadowing_db));
        const double budget = std::pow(10.0, budget_db / 10.0);

        // Spatial structure: lobes at each end. In LOS the first lobe carries the direct path.
        auto draw_lobes = [&](int count) {
            std::vector<double> means(static_cast<std::size_t>(count));
            for (int i = 0; i < count; ++i)
                means[static_cast<std::size_t>(i)] = (i == 0 && los) ? 0.0 : draw_uniform(rng, 360.0);
            return means;
        };
        const auto aoa_lobes = draw_lobes(params.n_lobes.draw(rng));
        const auto aod_lobes = draw_lobes(params.n_lobes.draw(rng));

        Cir cir;
        cir.los = los;
        cir.tx_pos = tx;
        cir.rx_pos = rx;
        cir.grid = grid;
        cir.mpcs.reserve(slots.size());
        for (std::size_t i = 0; i < slots.size(); ++i)
        {
            const Slot &s = slots[i];
            const double share = s.weight / total_weight * budget;
            Mpc m;
            m.cluster_id = s.cluster;
            m.delay = s.delay;
            m.tx_gain_embedded = false;
            m.amplitude.resize(freqs.size());
            if (los && i == 0)
            {
                m.kind = MpcKind::Los;
                m.delay = base_delay;
                const double scale = std::sqrt(share);
                for (std::size_t k = 0; k < freqs.size(); ++k)
                    m.amplitude[k] = free_space_response(d, freqs[k], abs) * scale;
                cir.mpcs.push_back(std::move(m));
                continue;
            }
            std::uniform_int_distribution<std::size_t> pick_aoa(0, aoa_lobes.size() - 1);
            std::uniform_int_distribution<std::size_t> pick_aod(0, aod_lobes.size() - 1);
            m.kind = MpcKind::FscSubpath;
            m.aoa_az = wrap_deg(aoa_lobes[pick_aoa(rng)] + draw_normal(rng, params.lobe_angle_spread_deg));
            m.aod_az = wrap_deg(aod_lobes[pick_aod(rng)] + draw_normal(rng, params.lobe_angle_spread_deg));
            const double phase = draw_uniform(rng, 2.0 * kPi);
            const double scale = std::sqrt(share);
            for (std::size_t k = 0; k < freqs.size(); ++k)
                m.amplitude[k] = std::polar(std::abs(free_space_response(d, freqs[k], abs)) * scale,
                                            phase - 2.0 * kPi * freqs[k] * m.delay);
            cir.mpcs.push_back(std::move(m));
        }
        return cir;
    }

    double received_power_dbm(const Mpc &mpc, const AntennaState &tx_ant, const AntennaState &rx_ant,
                              double tx_power_dbm, double t)
    {
        double p = tx_power_dbm + mpc.path_gain_db() + gain_db(rx_ant, mpc.aoa_az, t);
        if (!mpc.tx_gain_embedded)
            p += gain_db(tx_ant, mpc.aod_az, t);
        return p;
    }

    StrongestPath strongest_path(const Cir &cir, const AntennaState &tx_ant, const AntennaState &rx_ant,
                                 double tx_power_dbm, double t)
    {
        if (cir.mpcs.empty())
            throw std::invalid_argument("strongest_path: empty channel");
        std::size_t best = 0;
        double best_power = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cir.mpcs.size(); ++i)
        {
            const double p = received_power_dbm(cir.mpcs[i], tx_ant, rx_ant, tx_power_dbm, t);
            if (p > best_power || (p == best_power && cir.mpcs[i].delay < cir.mpcs[best].delay))
            {
                best = i;
                best_power = p;
            }
        }
        return {best, cir.mpcs[best], best_power};
    }

    PolarHistogram angle_histogram(const std::vector<double> &angles_deg, int bins)
    {
        if (bins < 4)
            throw std::invalid_argument("aoa histogram: at least 4 bins are required");
        if (angles_deg.empty())
            throw std::invalid_argument("aoa histogram: no angles");
        const double width = 360.0 / bins;
        PolarHistogram h;
        h.bin_center_deg.resize(static_cast<std::size_t>(bins));
        h.fraction.assign(static_cast<std::size_t>(bins), 0.0);
        for (int k = 0; k < bins; ++k)
            h.bin_center_deg[static_cast<std::size_t>(k)] = k * width;
        for (double a : angles_deg)
        {
            auto k = static_cast<int>(std::floor(wrap_deg(a + width / 2.0) / width));
            k = std::clamp(k, 0, bins - 1);
            h.fraction[static_cast<std::size_t>(k)] += 1.0;
        }
        for (auto &f : h.fraction)
            f /= static_cast<double>(angles_deg.size());
        return h;
    }

    PolarHistogram aoa_histogram(const std::vector<Cir> &cirs, int bins, AoaMode mode, const AntennaState &tx_ant,
                                 const AntennaState &rx_ant)
    {
        if (cirs.empty())
            throw std::invalid_argument("aoa histogram: no channel realisations");
        std::vector<double> angles;
        for (const auto &cir : cirs)
        {
            if (mode == AoaMode::AllMpcs)
                for (const auto &m : cir.mpcs)
                    angles.push_back(m.aoa_az);
            else
                angles.push_back(strongest_path(cir, tx_ant, rx_ant).mpc.aoa_az);
        }
        return angle_histogram(angles, bins);
    }
}
