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

#include "thzsim/geometry.hpp"
#include "thzsim/constants.hpp"

#include <algorithm>
#include <stdexcept>

namespace thz
{
    double wrap_deg(double deg)
    {
        double w = std::fmod(deg, 360.0);
        if (w < 0.0)
            w += 360.0;
        if (w >= 360.0) // fmod of a tiny negative number can round up to 360
            w -= 360.0;
        return w;
    }

    double angle_diff_deg(double a, double b)
    {
        double d = wrap_deg(a - b);
        return d > 180.0 ? d - 360.0 : d;
    }

    double azimuth_deg(const Vec3 &dir)
    {
        return wrap_deg(std::atan2(dir.y, dir.x) * kRadToDeg);
    }

    double elevation_deg(const Vec3 &dir)
    {
        double horizontal = std::hypot(dir.x, dir.y);
        return std::atan2(dir.z, horizontal) * kRadToDeg;
    }

    void Material::validate() const
    {
        if (!(relative_permittivity >= 1.0))
            throw std::invalid_argument("material '" + name + "': relative permittivity must be >= 1");
        if (!(roughness_loss_db >= 0.0))
            throw std::invalid_argument("material '" + name + "': roughness loss must be >= 0 dB");
    }

    Material plaster() { return {"plaster", 3.2, 0.0}; }
    Material glass() { return {"glass", 6.3, 0.0}; }
    Material wood() { return {"wood", 1.9, 0.0}; }

    bool Box::blocks(const Vec3 &a, const Vec3 &b) const
    {
        double t_enter = 0.0, t_exit = 1.0;
        for (int axis = 0; axis < 3; ++axis)
        {
            const double origin = a[axis];
            const double d = b[axis] - origin;
            if (d == 0.0)
            {
                // Parallel to this slab: must lie strictly between the faces.
                if (!(origin > lo[axis] && origin < hi[axis]))
                    return false;
                continue;
            }
            double t1 = (lo[axis] - origin) / d;
            double t2 = (hi[axis] - origin) / d;
            if (t1 > t2)
                std::swap(t1, t2);
            t_enter = std::max(t_enter, t1);
            t_exit = std::min(t_exit, t2);
            if (!(t_enter < t_exit))
                return false;
        }
        return t_enter < t_exit;
    }

    const char *to_string(Surface s)
    {
        switch (s)
        {
        case Surface::XMin: return "x_min";
        case Surface::XMax: return "x_max";
        case Surface::YMin: return "y_min";
        case Surface::YMax: return "y_max";
        case Surface::Floor: return "floor";
        case Surface::Ceiling: return "ceiling";
        }
        return "?";
    }

    void Room::validate() const
    {
        if (!(width > 0.0 && depth > 0.0 && height > 0.0))
            throw std::invalid_argument("room dimensions must be > 0");
        for (const auto &m : surfaces)
            m.validate();
        for (std::size_t i = 0; i < obstacles.size(); ++i)
        {
            const auto &o = obstacles[i];
            for (int axis = 0; axis < 3; ++axis)
            {
                const double extent = axis == 0 ? width : (axis == 1 ? depth : height);
                if (!(o.lo[axis] > 0.0 && o.hi[axis] < extent && o.lo[axis] < o.hi[axis]))
                    throw std::invalid_argument("obstacle " + std::to_string(i) + " must lie strictly inside the room");
            }
            if (o.penetration_loss_db && !(*o.penetration_loss_db >= 0.0))
                throw std::invalid_argument("obstacle " + std::to_string(i) + ": penetration loss must be >= 0 dB");
        }
    }

    bool Room::contains(const Vec3 &p) const
    {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= depth && p.z >= 0.0 && p.z <= height;
    }

    int Room::surface_axis(Surface s) const
    {
        return static_cast<int>(s) / 2;
    }

    double Room::surface_coordinate(Surface s) const
    {
        switch (s)
        {
        case Surface::XMin:
        case Surface::YMin:
        case Surface::Floor:
            return 0.0;
        case Surface::XMax: return width;
        case Surface::YMax: return depth;
        case Surface::Ceiling: return height;
        }
        return 0.0;
    }

    Room make_box_room(double width, double depth, double height, const Material &walls)
    {
        Room room;
        room.width = width;
        room.depth = depth;
        room.height = height;
        room.surfaces.fill(walls);
        return room;
    }

    std::complex<double> fresnel_reflection(double incidence_rad, const Material &material, Polarization pol)
    {
        if (!(incidence_rad >= 0.0 && incidence_rad <= kPi / 2.0))
            throw std::invalid_argument("fresnel_reflection: incidence angle must be in [0, pi/2]");
        material.validate();

        // Grazing limit.
        if (incidence_rad == kPi / 2.0)
            return pol == Polarization::TE ? -1.0 : 1.0;

        const double eps = material.relative_permittivity;
        const double c = std::cos(incidence_rad);
        const double s = std::sin(incidence_rad);
        const double root = std::sqrt(eps - s * s);
        if (pol == Polarization::TE)
            return (c - root) / (c + root);
        return (root - eps * c) / (root + eps * c);
    }

    std::complex<double> RayPath::interaction_gain() const
    {
        std::complex<double> g = 1.0;
        for (const auto &r : reflection_gains)
            g *= r;
        if (penetration_loss_db != 0.0)
            g *= std::pow(10.0, -penetration_loss_db / 20.0);
        return g;
    }

    Vec3 mirror(const Room &room, Surface s, const Vec3 &p)
    {
        Vec3 m = p;
        const int axis = room.surface_axis(s);
        m[axis] = 2.0 * room.surface_coordinate(s) - p[axis];
        return m;
    }

    namespace
    {
        // Intersects the segment from -> to with the plane of surface s. Fails
        // if the crossing is not strictly between the end points or falls outside
        // the rectangular face.
        std::optional<Vec3> hit_surface(const Room &room, Surface s, const Vec3 &from, const Vec3 &to)
        {
            const int axis = room.surface_axis(s);
            const double plane = room.surface_coordinate(s);
            const double d = to[axis] - from[axis];
            if (d == 0.0)
                return std::nullopt;
            const double t = (plane - from[axis]) / d;
            if (!(t > 0.0 && t < 1.0))
                return std::nullopt;
            Vec3 p = from + (to - from) * t;
            p[axis] = plane;
            if (!room.contains(p))
                return std::nullopt;
            return p;
        }

        // Sum of penetration losses along a segment, or nullopt if an opaque
        // obstacle blocks it. allow_penetration=false treats every obstacle as opaque.
        std::optional<double> segment_loss(const Room &room, const Vec3 &a, const Vec3 &b, bool allow_penetration)
        {
            double loss = 0.0;
            for (const auto &o : room.obstacles)
            {
                if (!o.blocks(a, b))
                    continue;
                if (!allow_penetration || !o.penetration_loss_db)
                    return std::nullopt;
                loss += *o.penetration_loss_db;
            }
            return loss;
        }

        double incidence_angle(const Room &room, Surface s, const Vec3 &from, const Vec3 &at)
        {
            const Vec3 dir = at - from;
            const double len = dir.norm();
            const double cos_theta = std::min(1.0, std::abs(dir[room.surface_axis(s)]) / len);
            return std::acos(cos_theta);
        }

        void finish_path(RayPath &path, const Vec3 &image_of_tx)
        {
            const auto &v = path.vertices;
            path.path_length = (v.back() - image_of_tx).norm();
            path.delay = path.path_length / kSpeedOfLight;
            const Vec3 departure = v[1] - v[0];
            const Vec3 arrival = v[v.size() - 2] - v.back();
            path.aod_az = azimuth_deg(departure);
            path.aod_el = elevation_deg(departure);
            path.aoa_az = azimuth_deg(arrival);
            path.aoa_el = elevation_deg(arrival);
        }

        std::complex<double> bounce_gain(const Room &room, Surface s, const Vec3 &from, const Vec3 &at, Polarization pol)
        {
            const Material &m = room.surfaces[static_cast<int>(s)];
            auto g = fresnel_reflection(incidence_angle(room, s, from, at), m, pol);
            if (m.roughness_loss_db > 0.0)
                g *= std::pow(10.0, -m.roughness_loss_db / 20.0);
            return g;
        }
    }

    std::vector<RayPath> trace(const Room &room, const Vec3 &tx, const Vec3 &rx, const TraceOptions &opts)
    {
        if (opts.max_order < 0 || opts.max_order > 2)
            throw std::invalid_argument("trace: reflection order " + std::to_string(opts.max_order) +
                                        " is not supported (0..2)");
        if (tx == rx)
            throw std::invalid_argument("trace: TX and RX coincide");
        if (!room.contains(tx) || !room.contains(rx))
            throw std::invalid_argument("trace: TX and RX must lie inside the room");

        std::vector<RayPath> paths;

        if (auto loss = segment_loss(room, tx, rx, true))
        {
            RayPath p;
            p.order = 0;
            p.vertices = {tx, rx};
            p.penetration_loss_db = *loss;
            finish_path(p, tx);
            paths.push_back(std::move(p));
        }

        if (opts.max_order >= 1)
        {
            for (int si = 0; si < kSurfaceCount; ++si)
            {
                const auto s = static_cast<Surface>(si);
                const Vec3 image = mirror(room, s, tx);
                auto hit = hit_surface(room, s, image, rx);
                if (!hit)
                    continue;
                if (!segment_loss(room, tx, *hit, false) || !segment_loss(room, *hit, rx, false))
                    continue;
                RayPath p;
                p.order = 1;
                p.vertices = {tx, *hit, rx};
                p.surfaces = {s};
                p.reflection_gains = {bounce_gain(room, s, tx, *hit, opts.polarization)};
                finish_path(p, image);
                paths.push_back(std::move(p));
            }
        }

        if (opts.max_order >= 2)
        {
            for (int s1i = 0; s1i < kSurfaceCount; ++s1i)
            {
                for (int s2i = 0; s2i < kSurfaceCount; ++s2i)
                {
                    if (s1i == s2i)
                        continue;
                    const auto s1 = static_cast<Surface>(s1i);
                    const auto s2 = static_cast<Surface>(s2i);
                    const Vec3 image1 = mirror(room, s1, tx);
                    const Vec3 image2 = mirror(room, s2, image1);
                    auto hit2 = hit_surface(room, s2, image2, rx);
                    if (!hit2)
                        continue;
                    auto hit1 = hit_surface(room, s1, image1, *hit2);
                    if (!hit1)
                        continue;
                    if (!segment_loss(room, tx, *hit1, false) || !segment_loss(room, *hit1, *hit2, false) ||
                        !segment_loss(room, *hit2, rx, false))
                        continue;
                    RayPath p;
                    p.order = 2;
                    p.vertices = {tx, *hit1, *hit2, rx};
                    p.surfaces = {s1, s2};
                    p.reflection_gains = {bounce_gain(room, s1, tx, *hit1, opts.polarization),
                                          bounce_gain(room, s2, *hit1, *hit2, opts.polarization)};
                    finish_path(p, image2);
                    paths.push_back(std::move(p));
                }
            }
        }

        std::stable_sort(paths.begin(), paths.end(), [](const RayPath &a, const RayPath &b) {
            if (a.delay != b.delay)
                return a.delay < b.delay;
            if (a.order != b.order)
                return a.order < b.order;
            return a.surfaces < b.surfaces;
        });
        return paths;
    }

    bool is_los(const Room &room, const Vec3 &tx, const Vec3 &rx)
    {
        return std::none_of(room.obstacles.begin(), room.obstacles.end(),
                            [&](const Box &o) { return o.blocks(tx, rx); });
    }
}
