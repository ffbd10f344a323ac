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

#include "thzsim/antenna.hpp"
#include "thzsim/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thz
{
    void AntennaState::validate() const
    {
        if (!(hpbw_deg > 0.0 && hpbw_deg <= 360.0))
            throw std::invalid_argument("antenna: hpbw must be in (0, 360] degrees");
        if (!std::isfinite(max_gain_dbi))
            throw std::invalid_argument("antenna: max gain must be finite");
        if (!(side_lobe_floor_db > 3.0))
            throw std::invalid_argument("antenna: side-lobe floor must sit more than 3 dB below max gain");
        if (!std::isfinite(rotation_speed_deg_per_s) || !std::isfinite(initial_phase_deg))
            throw std::invalid_argument("antenna: rotation parameters must be finite");
    }

    AntennaState AntennaState::pointed_at(double bearing_deg) const
    {
        AntennaState a = *this;
        a.mode = AntennaMode::Static;
        a.initial_phase_deg = wrap_deg(bearing_deg);
        return a;
    }

    double boresight_at(const AntennaState &ant, double t)
    {
        if (ant.mode == AntennaMode::Static)
            return wrap_deg(ant.initial_phase_deg);
        return wrap_deg(ant.initial_phase_deg + ant.rotation_speed_deg_per_s * t);
    }

    double cosine_exponent(double hpbw_deg)
    {
        const double c = std::cos(hpbw_deg / 4.0 * kDegToRad);
        return -3.0 / (10.0 * std::log10(c));
    }

    double gain_off_axis_db(const AntennaState &ant, double delta_deg)
    {
        if (ant.omni())
            return ant.max_gain_dbi;
        const double delta = std::min(std::abs(delta_deg), 180.0);
        const double c = std::cos(delta / 2.0 * kDegToRad);
        const double floor = ant.max_gain_dbi - ant.side_lobe_floor_db;
        if (c <= 0.0)
            return floor;
        const double lobe = ant.max_gain_dbi + 10.0 * cosine_exponent(ant.hpbw_deg) * std::log10(c);
        return std::max(lobe, floor);
    }

    double gain_db(const AntennaState &ant, double direction_az, double t)
    {
        return gain_off_axis_db(ant, angle_diff_deg(direction_az, boresight_at(ant, t)));
    }

    double half_width_for_drop(const AntennaState &ant, double drop_db)
    {
        if (drop_db < 0.0)
            return -1.0;
        if (ant.omni() || drop_db >= ant.side_lobe_floor_db)
            return 180.0;
        const double c = std::pow(10.0, -drop_db / (10.0 * cosine_exponent(ant.hpbw_deg)));
        return 2.0 * std::acos(c) * kRadToDeg;
    }

    AntennaState isotropic()
    {
        AntennaState a;
        a.max_gain_dbi = 0.0;
        a.hpbw_deg = 360.0;
        return a;
    }
}
