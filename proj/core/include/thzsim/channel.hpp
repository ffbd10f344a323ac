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

#ifndef THZSIM_CHANNEL_HPP
#define THZSIM_CHANNEL_HPP

#include "thzsim/antenna.hpp"
#include "thzsim/geometry.hpp"
#include "thzsim/rng.hpp"

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace thz
{
    // Equal-width partition of [carrier - bandwidth/2, carrier + bandwidth/2].
    struct FrequencyGrid
    {
        double carrier_hz = 140e9;
        double bandwidth_hz = 32e9;
        int n_bins = 64;

        void validate() const;
        double bin_center(int k) const;
        std::vector<double> bin_centers() const;
        bool operator==(const FrequencyGrid &) const = default;
    };

    // Piecewise-constant molecular absorption coefficient. Entry i applies from
    // its start frequency up to the next entry; frequencies below the first
    // entry use the first value. An empty table means no absorption.
    struct AbsorptionTable
    {
        struct Entry
        {
            double start_hz;
            double db_per_m;
            bool operator==(const Entry &) const = default;
        };
        std::vector<Entry> entries;

        static AbsorptionTable flat(double db_per_m);
        static AbsorptionTable defaults(); // flat over the 124-156 GHz band
        void validate() const;
        double db_per_m(double f_hz) const;
        bool operator==(const AbsorptionTable &) const = default;
    };

    // Free-space path loss 20 log10(4 pi d f / c) in dB.
    double fspl_db(double distance_m, double f_hz);

    // Complex free-space response of a path of the given length: magnitude from
    // spreading and absorption, phase -2 pi f tau.
    std::complex<double> free_space_response(double path_length_m, double f_hz, const AbsorptionTable &abs);

    enum class MpcKind
    {
        Los,
        RtCentral,
        RtSubpath,
        NonRtSubpath,
        FscSubpath
    };
    const char *to_string(MpcKind k);

    struct Mpc
    {
        double delay = 0.0;  // [s]
        double aoa_az = 0.0; // [deg], relative to the RX->TX bearing
        double aod_az = 0.0; // [deg], relative to the TX->RX bearing
        std::vector<std::complex<double>> amplitude; // one value per frequency bin
        MpcKind kind = MpcKind::FscSubpath;
        int cluster_id = 0;
        // The TX pattern is already folded into the amplitude (ray-traced
        // components, measurement-derived stochastic amplitudes).
        bool tx_gain_embedded = false;

        // Band-averaged path gain: mean over bins of 20 log10 |amplitude|.
        double path_gain_db() const;
    };

    struct Cir
    {
        std::vector<Mpc> mpcs;
        bool los = false;
        Vec3 tx_pos, rx_pos;
        FrequencyGrid grid;

        double distance() const { return (rx_pos - tx_pos).norm(); }
        void validate() const;
    };

    // Hybrid (ray-traced + stochastic) channel parameters. All values are
    // placeholders pending calibrated tables; every mean may be zero, which
    // switches the corresponding stochastic term off.
    struct HbcParams
    {
        double n_nonrt_clusters_mean = 2.0;  // Poisson mean of the non-RT cluster count
        double subpaths_pre_mean = 1.0;      // Poisson mean of sub-paths before a cluster centre
        double subpaths_post_mean = 3.0;     // Poisson mean of sub-paths after a cluster centre
        double subpath_delay_spread_s = 1e-9;
        double subpath_angle_spread_deg = 3.0;
        double subpath_decay_db_per_ns = 3.0;
        double nonrt_excess_loss_db = 10.0;  // mean loss of non-RT clusters below the strongest RT path
        double nonrt_shadowing_db = 3.0;     // std-dev of that loss
        double nonrt_delay_mean_s = 15e-9;   // mean excess delay of a non-RT cluster centre

        void validate() const;
        bool operator==(const HbcParams &) const = default;
    };

    // Distribution over a positive count.
    struct CountLaw
    {
        enum class Kind
        {
            Fixed,
            PoissonPlusOne
        };
        Kind kind = Kind::PoissonPlusOne;
        double mean = 1.0; // mean of the resulting count, >= 1

        int draw(Rng &rng) const;
        void validate(const char *what) const;
        bool operator==(const CountLaw &) const = default;
    };

    // Fully stochastic (time cluster / spatial lobe) channel parameters.
    struct FscParams
    {
        CountLaw n_clusters{CountLaw::Kind::PoissonPlusOne, 3.0};
        CountLaw subpaths{CountLaw::Kind::PoissonPlusOne, 4.0};
        double cluster_interarrival_s = 10e-9;
        double intra_cluster_delay_s = 1e-9;
        double cluster_decay_db_per_ns = 0.5;
        double subpath_decay_db_per_ns = 3.0;
        CountLaw n_lobes{CountLaw::Kind::PoissonPlusOne, 2.0};
        double lobe_angle_spread_deg = 6.0;
        double nlos_excess_loss_db = 30.0;
        double nlos_shadowing_db = 4.0;

        void validate() const;
        bool operator==(const FscParams &) const = default;
    };

    // Direct path only, frequency selective through spreading and absorption.
    Cir gen_los_baseline(const FrequencyGrid &grid, double distance_m, const AbsorptionTable &abs);
    Cir gen_los_baseline(const FrequencyGrid &grid, const Vec3 &tx, const Vec3 &rx, const AbsorptionTable &abs);

    // Deterministic part of the hybrid channel: one central component per ray,
    // weighted by the TX pattern at its departure angle.
    std::vector<Mpc> hbc_rt_component(const std::vector<RayPath> &rays, const Vec3 &tx, const Vec3 &rx,
                                      const FrequencyGrid &grid, const AbsorptionTable &abs,
                                      const AntennaState &tx_pattern);

    // Stochastic part of the hybrid channel: sub-paths around each RT cluster
    // centre (TX pattern applied) and non-RT clusters (no TX pattern).
    std::vector<Mpc> hbc_stochastic_component(const std::vector<Mpc> &rt_mpcs, const Vec3 &tx, const Vec3 &rx,
                                              const HbcParams &params, const FrequencyGrid &grid,
                                              const AbsorptionTable &abs, const AntennaState &tx_pattern, Rng &rng);

    Cir gen_hbc(const std::vector<RayPath> &rays, const Vec3 &tx, const Vec3 &rx, bool los, const HbcParams &params,
                const FrequencyGrid &grid, const AbsorptionTable &abs, const AntennaState &tx_pattern, Rng &rng);

    Cir gen_fsc(bool los, const Vec3 &tx, const Vec3 &rx, const FscParams &params, const FrequencyGrid &grid,
                const AbsorptionTable &abs, Rng &rng);

    // Received power of one component: tx power, TX gain (unless embedded),
    // RX gain, band-averaged path gain.
    double received_power_dbm(const Mpc &mpc, const AntennaState &tx_ant, const AntennaState &rx_ant,
                              double tx_power_dbm, double t);

    struct StrongestPath
    {
        std::size_t index = 0;
        Mpc mpc;
        double rx_power_dbm = 0.0;
    };

    // Component with the highest received power; ties go to the smaller delay.
    StrongestPath strongest_path(const Cir &cir, const AntennaState &tx_ant, const AntennaState &rx_ant,
                                 double tx_power_dbm = 0.0, double t = 0.0);

    enum class AoaMode
    {
        AllMpcs,
        StrongestPath
    };

    struct PolarHistogram
    {
        std::vector<double> bin_center_deg; // bin k is centred on k * 360 / bins
        std::vector<double> fraction;       // sums to 1
    };

    PolarHistogram aoa_histogram(const std::vector<Cir> &cirs, int bins, AoaMode mode = AoaMode::AllMpcs,
                                 const AntennaState &tx_ant = isotropic(), const AntennaState &rx_ant = isotropic());

    // Histogram of raw angles (degrees), same binning as aoa_histogram.
    PolarHistogram angle_histogram(const std::vector<double> &angles_deg, int bins);
}

#endif
