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

#ifndef THZSIM_ANTENNA_HPP
#define THZSIM_ANTENNA_HPP

#include <utility>

namespace thz
{
    enum class AntennaMode
    {
        Static,
        Rotating
    };

    // Azimuth-only directional antenna with a cosine-power main lobe and a flat
    // side-lobe floor. hpbw_deg = 360 is an omnidirectional radiator at max gain.
    // Angles are in the frame of the channel (0 deg = towards the link peer).
    struct AntennaState
    {
        double max_gain_dbi = 25.0;
        double hpbw_deg = 8.0;
        double rotation_speed_deg_per_s = 0.0;
        double initial_phase_deg = 0.0;
        AntennaMode mode = AntennaMode::Static;
        double side_lobe_floor_db = 40.0; // floor sits this far below max gain

        void validate() const;
        bool omni() const { return hpbw_deg >= 360.0; }

        // Same pattern frozen at boresight bearing_deg.
        AntennaState pointed_at(double bearing_deg) const;
        bool operator==(const AntennaState &) const = default;
    };

    double boresight_at(const AntennaState &ant, double t);

    // Gain towards direction_az at time t, in dBi.
    double gain_db(const AntennaState &ant, double direction_az, double t);

    // Gain as a function of the off-axis angle only (|delta| in degrees).
    double gain_off_axis_db(const AntennaState &ant, double delta_deg);

    // Exponent p of cos^p(delta/2) giving exactly -3 dB at delta = hpbw/2.
    double cosine_exponent(double hpbw_deg);

    // Largest off-axis angle at which the gain is still >= max_gain - drop_db.
    // Returns 180 when the side-lobe floor already satisfies the drop, and a
    // negative value when drop_db < 0.
    double half_width_for_drop(const AntennaState &ant, double drop_db);

    // Isotropic 0 dBi reference radiator.
    AntennaState isotropic();
}

#endif
