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

#include "thzsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace thz
{
    std::vector<EcdfPoint> ecdf(std::vector<double> samples)
    {
        if (samples.empty())
            throw std::invalid_argument("ecdf: no samples");
        std::sort(samples.begin(), samples.end());
        const double n = static_cast<double>(samples.size());
        std::vector<EcdfPoint> out;
        out.reserve(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            out.push_back({samples[i], static_cast<double>(i + 1) / n});
        return out;
    }

    double mean(const std::vector<double> &samples)
    {
        if (samples.empty())
            throw std::invalid_argument("mean: no samples");
        return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    }

    double percentile(std::vector<double> samples, double q)
    {
        if (samples.empty())
            throw std::invalid_argument("percentile: no samples");
        std::sort(samples.begin(), samples.end());
        const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(samples.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, samples.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return samples[lo] + (samples[hi] - samples[lo]) * frac;
    }

    double ci95_half_width(const std::vector<double> &samples)
    {
        if (samples.size() < 2)
            return 0.0;
        const double m = mean(samples);
        double ss = 0.0;
        for (double x : samples)
            ss += (x - m) * (x - m);
        const double sd = std::sqrt(ss / static_cast<double>(samples.size() - 1));
        return 1.96 * sd / std::sqrt(static_cast<double>(samples.size()));
    }
}
