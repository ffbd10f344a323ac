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

#ifndef THZSIM_STATS_HPP
#define THZSIM_STATS_HPP

#include <utility>
#include <vector>

namespace thz
{
    struct EcdfPoint
    {
        double value;
        double probability; // k / n
    };

    // Empirical CDF as sorted (value, k/n) step points, one per sample.
    std::vector<EcdfPoint> ecdf(std::vector<double> samples);

    double mean(const std::vector<double> &samples);

    // Linear-interpolated percentile, q in [0, 100]. Input need not be sorted.
    double percentile(std::vector<double> samples, double q);

    // Half-width of the normal-approximation 95% confidence interval of the mean.
    double ci95_half_width(const std::vector<double> &samples);
}

#endif
