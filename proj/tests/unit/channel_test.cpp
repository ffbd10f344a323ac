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

#include <gtest/gtest.h>

#include <random>

using namespace thz;

namespace
{
    const AbsorptionTable kNoAbsorption{};

    double total_power_db(const Cir &cir)
    {
        double sum = 0.0;
        for (const auto &m : cir.mpcs)
            sum += std::pow(10.0, m.path_gain_db() / 10.0);
        return 10.0 * std::log10(sum);
    }

    double free_space_db(double d, const FrequencyGrid &grid, const AbsorptionTable &abs)
    {
        double acc = 0.0;
        for (double f : grid.bin_centers())
            acc += 20.0 * std::log10(std::abs(free_space_response(d, f, abs)));
        return acc / grid.n_bins;
    }

    std::vector<RayPath> box_rays(const Vec3 &tx, const Vec3 &rx)
    {
        return trace(make_box_room(6, 4, 3, plaster()), tx, rx, {2, Polarization::TE});
    }
}

TEST(FrequencyGrid, BinCentresPartitionTheBand)
{
    FrequencyGrid g;
    const auto c = g.bin_centers();
    ASSERT_EQ(c.size(), 64u);
    EXPECT_NEAR(c.front(), 124e9 + 0.25e9, 1.0);
    EXPECT_NEAR(c.back(), 156e9 - 0.25e9, 1.0);
    FrequencyGrid one{140e9, 32e9, 1};
    EXPECT_DOUBLE_EQ(one.bin_center(0), 140e9);
    EXPECT_THROW((FrequencyGrid{140e9, 32e9, 0}).validate(), std::invalid_argument);
    EXPECT_THROW((FrequencyGrid{10e9, 32e9, 4}).validate(), std::invalid_argument);
}

TEST(LosBaseline, FreeSpaceClosedForms)
{
    const FrequencyGrid single{140e9, 32e9, 1};
    const Cir c1 = gen_los_baseline(single, 1.0, kNoAbsorption);
    ASSERT_EQ(c1.mpcs.size(), 1u);
    EXPECT_EQ(c1.mpcs[0].kind, MpcKind::Los);
    EXPECT_NEAR(c1.mpcs[0].path_gain_db(), -75.36, 0.01);
    EXPECT_NEAR(-c1.mpcs[0].path_gain_db(), 20.0 * std::log10(4.0 * kPi * 140e9 / kSpeedOfLight), 1e-9);

    const FrequencyGrid grid;
    const Cir a = gen_los_baseline(grid, 2.0, kNoAbsorption), b = gen_los_baseline(grid, 4.0, kNoAbsorption);
    for (int k = 0; k < grid.n_bins; ++k)
    {
        const double ga = 20.0 * std::log10(std::abs(a.mpcs[0].amplitude[k]));
        const double gb = 20.0 * std::log10(std::abs(b.mpcs[0].amplitude[k]));
        EXPECT_NEAR(ga - gb, 20.0 * std::log10(2.0), 1e-9);
    }
}

TEST(LosBaseline, AbsorptionIsLinearInDistance)
{
    const FrequencyGrid grid;
    const Cir clean = gen_los_baseline(grid, 3.0, kNoAbsorption);
    const Cir absorbed = gen_los_baseline(grid, 3.0, AbsorptionTable::flat(1.0));
    for (int k = 0; k < grid.n_bins; ++k)
        EXPECT_NEAR(20.0 * std::log10(std::abs(clean.mpcs[0].amplitude[k])) -
                        20.0 * std::log10(std::abs(absorbed.mpcs[0].amplitude[k])),
                    3.0, 1e-9);
    EXPECT_THROW(gen_los_baseline(grid, 0.0, kNoAbsorption), std::invalid_argument);
}

TEST(LosBaseline, PhaseFollowsDelay)
{
    const FrequencyGrid grid{140e9, 32e9, 8};
    const double d = 2.345;
    const Cir c = gen_los_baseline(grid, d, kNoAbsorption);
    for (int k = 0; k < grid.n_bins; ++k)
    {
        const auto expected = std::polar(1.0, -2.0 * kPi * grid.bin_center(k) * d / kSpeedOfLight);
        const auto got = c.mpcs[0].amplitude[k] / std::abs(c.mpcs[0].amplitude[k]);
        EXPECT_NEAR(std::abs(got - expected), 0.0, 1e-6);
    }
}

TEST(AbsorptionTable, PiecewiseLookup)
{
    AbsorptionTable t{{{130e9, 1.0}, {140e9, 2.0}, {150e9, 3.0}}};
    EXPECT_EQ(t.db_per_m(120e9), 1.0);
    EXPECT_EQ(t.db_per_m(135e9), 1.0);
    EXPECT_EQ(t.db_per_m(140e9), 2.0);
    EXPECT_EQ(t.db_per_m(155e9), 3.0);
    EXPECT_EQ(kNoAbsorption.db_per_m(140e9), 0.0);
    AbsorptionTable bad{{{140e9, 1.0}, {130e9, 1.0}}};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Hbc, ZeroMeansCollapseToRayTracedPart)
{
    const Vec3 tx{1, 1, 1.5}, rx{4, 3, 1.2};
    const auto rays = box_rays(tx, rx);
    HbcParams p;
    p.n_nonrt_clusters_mean = p.subpaths_pre_mean = p.subpaths_post_mean = 0.0;
    Rng rng(1);
    const FrequencyGrid grid;
    const Cir cir = gen_hbc(rays, tx, rx, true, p, grid, kNoAbsorption, isotropic(), rng);
    const auto rt = hbc_rt_component(rays, tx, rx, grid, kNoAbsorption, isotropic());
    ASSERT_EQ(cir.mpcs.size(), rays.size());
    for (std::size_t i = 0; i < rt.size(); ++i)
    {
        EXPECT_EQ(cir.mpcs[i].amplitude, rt[i].amplitude);
        EXPECT_TRUE(cir.mpcs[i].kind == MpcKind::Los || cir.mpcs[i].kind == MpcKind::RtCentral);
    }
}

TEST(Hbc, SingleDirectRayEqualsLosBaseline)
{
    const Vec3 tx{1, 1, 1.5}, rx{4, 3, 1.2};
    const auto rays = trace(make_box_room(6, 4, 3, plaster()), tx, rx, {0, Polarization::TE});
    HbcParams p;
    p.n_nonrt_clusters_mean = p.subpaths_pre_mean = p.subpaths_post_mean = 0.0;
    Rng rng(2);
    const FrequencyGrid grid;
    const auto abs = AbsorptionTable::defaults();
    const Cir hbc = gen_hbc(rays, tx, rx, true, p, grid, abs, isotropic(), rng);
    const Cir base = gen_los_baseline(grid, tx, rx, abs);
    ASSERT_EQ(hbc.mpcs.size(), 1u);
    for (int k = 0; k < grid.n_bins; ++k)
        EXPECT_NEAR(std::abs(hbc.mpcs[0].amplitude[k] - base.mpcs[0].amplitude[k]), 0.0,
                    1e-12 * std::abs(base.mpcs[0].amplitude[k]));
}

TEST(Hbc, SeedDeterminismAndAdditivity)
{
    const Vec3 tx{1, 1, 1.5}, rx{4, 3, 1.2};
    const auto rays = box_rays(tx, rx);
    const HbcParams p;
    const FrequencyGrid grid;
    AntennaState tx_ant;
    tx_ant.hpbw_deg = 30.0;
    Rng a(42), b(42), c(42);
    const Cir x = gen_hbc(rays, tx, rx, true, p, grid, kNoAbsorption, tx_ant, a);
    const Cir y = gen_hbc(rays, tx, rx, true, p, grid, kNoAbsorption, tx_ant, b);
    ASSERT_EQ(x.mpcs.size(), y.mpcs.size());
    for (std::size_t i = 0; i < x.mpcs.size(); ++i)
        EXPECT_EQ(x.mpcs[i].amplitude, y.mpcs[i].amplitude);

    auto parts = hbc_rt_component(rays, tx, rx, grid, kNoAbsorption, tx_ant);
    const auto stochastic = hbc_stochastic_component(parts, tx, rx, p, grid, kNoAbsorption, tx_ant, c);
    parts.insert(parts.end(), stochastic.begin(), stochastic.end());
    ASSERT_EQ(parts.size(), x.mpcs.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
    {
        EXPECT_EQ(parts[i].amplitude, x.mpcs[i].amplitude);
        EXPECT_EQ(parts[i].delay, x.mpcs[i].delay);
    }
}

TEST(Hbc, InvariantsOverRandomGeometries)
{
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> ux(0.2, 5.8), uy(0.2, 3.8), uz(0.2, 2.8);
    const FrequencyGrid grid{140e9, 32e9, 16};
    const auto abs = AbsorptionTable::defaults();
    AntennaState tx_ant;
    tx_ant.hpbw_deg = 20.0;
    const double max_embedded = std::pow(10.0, tx_ant.max_gain_dbi / 20.0);
    for (int i = 0; i < 100; ++i)
    {
        const Vec3 tx{ux(gen), uy(gen), uz(gen)}, rx{ux(gen), uy(gen), uz(gen)};
        Rng rng(static_cast<std::uint64_t>(i));
        const Cir cir = gen_hbc(box_rays(tx, rx), tx, rx, true, HbcParams{}, grid, abs, tx_ant, rng);
        EXPECT_NO_THROW(cir.validate());
        const double min_delay = (rx - tx).norm() / kSpeedOfLight;
        for (const auto &m : cir.mpcs)
        {
            EXPECT_GE(m.delay, min_delay * (1 - 1e-12));
            for (int k = 0; k < grid.n_bins; ++k)
            {
                ASSERT_TRUE(std::isfinite(std::abs(m.amplitude[k])));
                // No energy creation: never above the free-space direct path at
                // the same delay, up to the embedded TX gain.
                const double bound =
                    std::abs(free_space_response(m.delay * kSpeedOfLight, grid.bin_center(k), AbsorptionTable{})) *
                    max_embedded;
                EXPECT_LE(std::abs(m.amplitude[k]), bound * (1 + 1e-9));
            }
        }
    }
}

TEST(Hbc, NonRtClustersCarryNoTxPattern)
{
    const Vec3 tx{1, 1, 1.5}, rx{4, 3, 1.2};
    HbcParams p;
    p.n_nonrt_clusters_mean = 20.0;
    AntennaState narrow;
    narrow.hpbw_deg = 5.0;
    const FrequencyGrid grid{140e9, 32e9, 4};
    Rng a(9), b(9);
    // Without ray-traced clusters the reference is fixed, so pointing the TX
    // elsewhere must not change any non-RT amplitude.
    const auto s1 = hbc_stochastic_component({}, tx, rx, p, grid, kNoAbsorption, narrow.pointed_at(0.0), a);
    const auto s2 = hbc_stochastic_component({}, tx, rx, p, grid, kNoAbsorption, narrow.pointed_at(180.0), b);
    ASSERT_FALSE(s1.empty());
    ASSERT_EQ(s1.size(), s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i)
    {
        EXPECT_EQ(s1[i].kind, MpcKind::NonRtSubpath);
        EXPECT_TRUE(s1[i].tx_gain_embedded);
        EXPECT_EQ(s1[i].amplitude, s2[i].amplitude);
    }
}

TEST(Hbc, EmptyChannelIsAnError)
{
    HbcParams p;
    p.n_nonrt_clusters_mean = 0.0;
    Rng rng(1);
    EXPECT_THROW(gen_hbc({}, {1, 1, 1}, {2, 2, 2}, false, p, FrequencyGrid{}, kNoAbsorption, isotropic(), rng),
                 std::runtime_error);
}

TEST(Fsc, DegenerateCollapseToLosBaseline)
{
    FscParams p;
    p.n_clusters = {CountLaw::Kind::Fixed, 1.0};
    p.subpaths = {CountLaw::Kind::Fixed, 1.0};
    p.n_lobes = {CountLaw::Kind::Fixed, 1.0};
    p.lobe_angle_spread_deg = 0.0;
    const FrequencyGrid grid;
    const auto abs = AbsorptionTable::defaults();
    const Vec3 tx{1, 1, 1}, rx{3, 2.5, 1.4};
    Rng rng(77);
    const Cir fsc = gen_fsc(true, tx, rx, p, grid, abs, rng);
    const Cir base = gen_los_baseline(grid, tx, rx, abs);
    ASSERT_EQ(fsc.mpcs.size(), 1u);
    EXPECT_EQ(fsc.mpcs[0].delay, (rx - tx).norm() / kSpeedOfLight);
    for (int k = 0; k < grid.n_bins; ++k)
        EXPECT_NEAR(20.0 * std::log10(std::abs(fsc.mpcs[0].amplitude[k])),
                    20.0 * std::log10(std::abs(base.mpcs[0].amplitude[k])), 1e-9);
}

TEST(Fsc, LosPinningAndValidity)
{
    const FrequencyGrid grid{140e9, 32e9, 8};
    const Vec3 tx{1, 1, 1}, rx{4, 3, 1};
    for (std::uint64_t s = 0; s < 200; ++s)
    {
        Rng rng(s);
        const Cir c = gen_fsc(true, tx, rx, FscParams{}, grid, kNoAbsorption, rng);
        EXPECT_NO_THROW(c.validate());
        double min_delay = HUGE_VAL;
        for (const auto &m : c.mpcs)
            min_delay = std::min(min_delay, m.delay);
        EXPECT_EQ(min_delay, (rx - tx).norm() / kSpeedOfLight);
        EXPECT_EQ(c.mpcs[0].kind, MpcKind::Los);
        EXPECT_EQ(c.mpcs[0].aoa_az, 0.0);
        // The LOS budget is the free-space power split over the components.
        EXPECT_NEAR(total_power_db(c), free_space_db((rx - tx).norm(), grid, kNoAbsorption), 1e-9);
    }
}

TEST(Fsc, NlosMeanPowerMatchesConfiguredExcessLoss)
{
    const FrequencyGrid grid{140e9, 32e9, 8};
    const auto abs = AbsorptionTable::defaults();
    const Vec3 tx{1, 1, 1}, rx{4, 3, 1};
    const FscParams p;
    double acc = 0.0;
    const int n = 2000;
    for (int s = 0; s < n; ++s)
    {
        Rng rng(static_cast<std::uint64_t>(s));
        acc += total_power_db(gen_fsc(false, tx, rx, p, grid, abs, rng));
    }
    const double expected = free_space_db((rx - tx).norm(), grid, abs) - p.nlos_excess_loss_db;
    EXPECT_NEAR(acc / n, expected, 1.0);
}

TEST(Fsc, SeedDeterminism)
{
    const FrequencyGrid grid{140e9, 32e9, 8};
    Rng a(5), b(5);
    const Cir x = gen_fsc(false, {1, 1, 1}, {4, 3, 1}, FscParams{}, grid, kNoAbsorption, a);
    const Cir y = gen_fsc(false, {1, 1, 1}, {4, 3, 1}, FscParams{}, grid, kNoAbsorption, b);
    ASSERT_EQ(x.mpcs.size(), y.mpcs.size());
    for (std::size_t i = 0; i < x.mpcs.size(); ++i)
    {
        EXPECT_EQ(x.mpcs[i].amplitude, y.mpcs[i].amplitude);
        EXPECT_EQ(x.mpcs[i].aoa_az, y.mpcs[i].aoa_az);
    }
}

TEST(StrongestPath, SelectionRules)
{
    const FrequencyGrid grid{140e9, 32e9, 2};
    Cir cir = gen_los_baseline(grid, 2.0, kNoAbsorption);
    Mpc refl = cir.mpcs[0];
    refl.kind = MpcKind::RtCentral;
    refl.delay *= 1.5;
    refl.aoa_az = 90.0;
    for (auto &a : refl.amplitude)
        a *= std::pow(10.0, -3.0 / 20.0);
    cir.mpcs.push_back(refl);

    const auto omni = isotropic();
    auto sp = strongest_path(cir, omni, omni);
    EXPECT_EQ(sp.index, 0u);
    EXPECT_NEAR(sp.rx_power_dbm, cir.mpcs[0].path_gain_db(), 1e-12);

    // Narrow RX beam on the reflection puts the direct path in the floor.
    AntennaState rx;
    rx.hpbw_deg = 10.0;
    sp = strongest_path(cir, omni, rx.pointed_at(90.0), 10.0);
    EXPECT_EQ(sp.index, 1u);
    EXPECT_NEAR(sp.rx_power_dbm, 10.0 + 25.0 + refl.path_gain_db(), 1e-9);

    // Equal power: the earlier component wins.
    Cir tie = gen_los_baseline(grid, 2.0, kNoAbsorption);
    Mpc late = tie.mpcs[0];
    late.delay *= 2.0;
    tie.mpcs.insert(tie.mpcs.begin(), late);
    EXPECT_EQ(strongest_path(tie, omni, omni).index, 1u);
}

TEST(StrongestPath, OmniIsBoresightInvariant)
{
    const FrequencyGrid grid{140e9, 32e9, 4};
    Rng rng(3);
    const Cir c = gen_fsc(false, {1, 1, 1}, {4, 3, 1}, FscParams{}, grid, kNoAbsorption, rng);
    AntennaState omni;
    omni.hpbw_deg = 360.0;
    const auto ref = strongest_path(c, omni, omni);
    for (double b : {10.0, 100.0, 250.0})
    {
        const auto sp = strongest_path(c, omni.pointed_at(b), omni.pointed_at(-b));
        EXPECT_EQ(sp.index, ref.index);
        EXPECT_DOUBLE_EQ(sp.rx_power_dbm, ref.rx_power_dbm);
    }
}

TEST(AoaHistogram, NormalisationAndBins)
{
    const FrequencyGrid grid{140e9, 32e9, 2};
    const Cir one = gen_los_baseline(grid, 1.0, kNoAbsorption);
    const auto h = aoa_histogram({one}, 36);
    ASSERT_EQ(h.fraction.size(), 36u);
    EXPECT_DOUBLE_EQ(h.fraction[0], 1.0);
    EXPECT_THROW(aoa_histogram({}, 36), std::invalid_argument);
    EXPECT_THROW(aoa_histogram({one}, 3), std::invalid_argument);

    const auto wrap = angle_histogram({359.0, 1.0, 185.0, 175.0}, 36);
    EXPECT_DOUBLE_EQ(wrap.fraction[0], 0.5);
    EXPECT_DOUBLE_EQ(wrap.bin_center_deg[18], 180.0);
}

TEST(AoaHistogram, LosConcentratesMoreThanNlos)
{
    const FrequencyGrid grid{140e9, 32e9, 2};
    std::vector<Cir> los, nlos;
    for (std::uint64_t s = 0; s < 2000; ++s)
    {
        Rng a(s), b(s + 100000);
        los.push_back(gen_fsc(true, {1, 1, 1}, {4, 3, 1}, FscParams{}, grid, kNoAbsorption, a));
        nlos.push_back(gen_fsc(false, {1, 1, 1}, {4, 3, 1}, FscParams{}, grid, kNoAbsorption, b));
    }
    auto near_zero = [](const PolarHistogram &h) { return h.fraction[0] + h.fraction[1] + h.fraction.back(); };
    EXPECT_GT(near_zero(aoa_histogram(los, 36)), near_zero(aoa_histogram(nlos, 36)));
    EXPECT_GT(near_zero(aoa_histogram(los, 36, AoaMode::StrongestPath)),
              near_zero(aoa_histogram(nlos, 36, AoaMode::StrongestPath)));
}
