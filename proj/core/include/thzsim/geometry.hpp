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

#ifndef THZSIM_GEOMETRY_HPP
#define THZSIM_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace thz
{
    struct Vec3
    {
        double x = 0.0, y = 0.0, z = 0.0;

        constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
        constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
        constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
        constexpr bool operator==(const Vec3 &) const = default;

        constexpr double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
        double norm() const { return std::sqrt(dot(*this)); }
        constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
        double &operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
    };

    // Azimuth of a direction vector in degrees, [0, 360), measured from +x towards +y.
    double azimuth_deg(const Vec3 &dir);

    // Elevation of a direction vector in degrees, [-90, 90].
    double elevation_deg(const Vec3 &dir);

    struct Material
    {
        std::string name;
        double relative_permittivity = 1.0; // >= 1
        double roughness_loss_db = 0.0;     // extra loss per bounce, >= 0

        void validate() const;
        bool operator==(const Material &) const = default;
    };

    // Placeholder dielectric libraries for common indoor materials at ~140 GHz.
    // These are nominal values only; calibrated permittivities must be supplied
    // by the scenario when available.
    Material plaster();
    Material glass();
    Material wood();

    // Axis-aligned box. A blocked propagation segment is removed, unless
    // penetration_loss_db is set, in which case only the direct path survives
    // with that fixed attenuation.
    struct Box
    {
        Vec3 lo, hi;
        std::optional<double> penetration_loss_db;

        // True iff the open segment a-b passes through the open interior of the box.
        bool blocks(const Vec3 &a, const Vec3 &b) const;
        bool operator==(const Box &) const = default;
    };

    // Surface ids of a rectangular room. The order is also the tie-break order
    // for equal-delay paths.
    enum class Surface : int
    {
        XMin = 0,
        XMax = 1,
        YMin = 2,
        YMax = 3,
        Floor = 4,
        Ceiling = 5
    };
    inline constexpr int kSurfaceCount = 6;
    const char *to_string(Surface s);

    struct Room
    {
        double width = 0.0;  // x extent [m]
        double depth = 0.0;  // y extent [m]
        double height = 0.0; // z extent [m]
        std::array<Material, kSurfaceCount> surfaces{};
        std::vector<Box> obstacles;

        void validate() const;
        bool contains(const Vec3 &p) const; // closed box test
        int surface_axis(Surface s) const;
        double surface_coordinate(Surface s) const;
        bool operator==(const Room &) const = default;
    };

    // Box room with uniform wall material and no obstacles.
    Room make_box_room(double width, double depth, double height, const Material &walls);

    enum class Polarization
    {
        TE,
        TM
    };

    // Fresnel amplitude reflection coefficient of a lossless dielectric half-space.
    // incidence_rad is measured from the surface normal, 0 <= angle <= pi/2.
    std::complex<double> fresnel_reflection(double incidence_rad, const Material &material, Polarization pol);

    struct RayPath
    {
        int order = 0;             // 0 = direct path, k = k reflections
        std::vector<Vec3> vertices; // TX, bounce points..., RX (empty for paths loaded from file)
        std::vector<Surface> surfaces; // reflecting surface per bounce
        double path_length = 0.0;  // [m]
        double delay = 0.0;        // [s], path_length / c
        double aoa_az = 0.0, aoa_el = 0.0; // arrival direction seen from RX [deg]
        double aod_az = 0.0, aod_el = 0.0; // departure direction seen from TX [deg]
        std::vector<std::complex<double>> reflection_gains;
        double penetration_loss_db = 0.0; // non-zero only for an obstructed direct path

        // Product of reflection gains and penetration attenuation (frequency independent).
        std::complex<double> interaction_gain() const;
        bool obstructed() const { return order == 0 && penetration_loss_db > 0.0; }
    };

    struct TraceOptions
    {
        int max_order = 2;
        Polarization polarization = Polarization::TE;
    };

    // Mirror-image ray tracer for a rectangular room. Returns every geometrically
    // valid, unblocked path up to max_order (at most 2), sorted by delay with
    // ties resolved by (order, surface ids).
    std::vector<RayPath> trace(const Room &room, const Vec3 &tx, const Vec3 &rx, const TraceOptions &opts = {});

    // True iff the open segment tx-rx crosses no obstacle.
    bool is_los(const Room &room, const Vec3 &tx, const Vec3 &rx);

    // Point reflected through the plane of a room surface.
    Vec3 mirror(const Room &room, Surface s, const Vec3 &p);
}

#endif
