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

#ifndef THZSIM_CONSTANTS_HPP
#define THZSIM_CONSTANTS_HPP

#include <numbers>

namespace thz
{
    // Propagation speed used for every delay / path-length conversion in the
    // library. 3e8 m/s keeps free-space loss figures aligned with the usual
    // link-budget tables (75.36 dB at 1 m / 140 GHz).
    inline constexpr double kSpeedOfLight = 3.0e8;

    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kDegToRad = kPi / 180.0;
    inline constexpr double kRadToDeg = 180.0 / kPi;

    // Wraps an angle in degrees into [0, 360).
    double wrap_deg(double deg);

    // Signed angular difference a - b wrapped into (-180, 180].
    double angle_diff_deg(double a, double b);
}

#endif
