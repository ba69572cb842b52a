// SPDX-License-Identifier: Apache-2.0
//
// u2vchan: non-stationary UAV-to-vehicle MIMO channel simulator
// Copyright (C) 2026 The u2vchan authors
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

#include <catch2/catch_amalgamated.hpp>

#include "u2v/errors.hpp"
#include "u2v/geometry.hpp"

#include <random>

using namespace u2v;
using Catch::Matchers::WithinAbs;

namespace
{

void require_rows(const RotationMatrix3 &m, const std::array<double, 9> &rows, double tol = 1e-15)
{
    for (int i = 0; i < 9; ++i)
        REQUIRE_THAT(m(i / 3, i % 3), WithinAbs(rows[static_cast<std::size_t>(i)], tol));
}

// Plain triple loop, kept apart from RotationMatrix3's own product.
std::array<double, 9> multiply(const std::array<double, 9> &a, const std::array<double, 9> &b)
{
    std::array<double, 9> c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                c[static_cast<std::size_t>(3 * i + j)] +=
                    a[static_cast<std::size_t>(3 * i + k)] * b[static_cast<std::size_t>(3 * k + j)];
    return c;
}

} // namespace

TEST_CASE("rotation about x")
{
    require_rows(rotation_about_x(0.0), {1, 0, 0, 0, 1, 0, 0, 0, 1});
    require_rows(rotation_about_x(pi / 2.0), {1, 0, 0, 0, 0, -1, 0, 1, 0}, 1e-16);
    const double g = 0.3;
    require_rows(rotation_about_x(g), {1, 0, 0, 0, std::cos(g), -std::sin(g), 0, std::sin(g), std::cos(g)});
    REQUIRE_THROWS_AS(rotation_about_x(std::nan("")), std::invalid_argument);
}

TEST_CASE("rotation about y")
{
    require_rows(rotation_about_y(0.0), {1, 0, 0, 0, 1, 0, 0, 0, 1});
    require_rows(rotation_about_y(pi / 2.0), {0, 0, 1, 0, 1, 0, -1, 0, 0}, 1e-16);
    REQUIRE(rotation_about_y(-0.8) == rotation_about_y(0.8).transposed());
}

TEST_CASE("rotation about z keeps the (3,3) entry at one")
{
    require_rows(rotation_about_z(0.0), {1, 0, 0, 0, 1, 0, 0, 0, 1});
    require_rows(rotation_about_z(pi / 2.0), {0, -1, 0, 1, 0, 0, 0, 0, 1}, 1e-16);
    require_rows(rotation_about_z(pi), {-1, 0, 0, 0, -1, 0, 0, 0, 1}, 1e-15);
    for (double w : {-3.0, -1.0, 0.5, 2.0})
        REQUIRE(rotation_about_z(w)(2, 2) == 1.0);
}

TEST_CASE("posture matrix matches the triple product and the expanded form")
{
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> sym(-pi, pi), pos(0.0, two_pi);
    for (int i = 0; i < 1000; ++i)
    {
        const double w = sym(rng), f = pos(rng), g = sym(rng);
        const RotationMatrix3 m = posture_matrix(PostureAngles(w, f, g));
        REQUIRE(m.orthonormality_error() < 1e-12);
        REQUIRE_THAT(m.determinant(), WithinAbs(1.0, 1e-12));

        const std::array<double, 9> rz{std::cos(w), -std::sin(w), 0, std::sin(w), std::cos(w), 0, 0, 0, 1};
        const std::array<double, 9> ry{std::cos(f), 0, std::sin(f), 0, 1, 0, -std::sin(f), 0, std::cos(f)};
        const std::array<double, 9> rx{1, 0, 0, 0, std::cos(g), -std::sin(g), 0, std::sin(g), std::cos(g)};
        require_rows(m, multiply(rz, multiply(ry, rx)), 1e-12);

        const double cw = std::cos(w), sw = std::sin(w), cf = std::cos(f), sf = std::sin(f), cg = std::cos(g),
                     sg = std::sin(g);
        require_rows(m,
                     {cw * cf, cw * sf * sg - sw * cg, cw * sf * cg + sw * sg, sw * cf, sw * sf * sg + cw * cg,
                      sw * sf * cg - cw * sg, -sf, cf * sg, cf * cg},
                     1e-12);
    }
}

TEST_CASE("posture matrix special cases")
{
    require_rows(posture_matrix(PostureAngles(0, 0, 0)), {1, 0, 0, 0, 1, 0, 0, 0, 1});
    REQUIRE(posture_matrix(PostureAngles(0, 0, pi / 2.0)) == rotation_about_x(pi / 2.0));
}

TEST_CASE("posture angle ranges are enforced")
{
    REQUIRE_NOTHROW(PostureAngles(pi, 0.0, -pi));
    REQUIRE_THROWS_AS(PostureAngles(3.2, 0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(PostureAngles(0.0, two_pi, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(PostureAngles(0.0, -0.1, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(PostureAngles(0.0, 0.0, -3.2), std::invalid_argument);
}

TEST_CASE("velocity rotation matrix")
{
    require_rows(velocity_rotation_matrix(SphericalAngles(0.0, 0.0)), {1, 0, 0, 0, 1, 0, 0, 0, 1});
    require_rows(velocity_rotation_matrix(SphericalAngles(pi / 2.0, 0.0)), {0, -1, 0, 1, 0, 0, 0, 0, 1}, 1e-16);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
        {
            const SphericalAngles h(two_pi * i / 10.0, -pi / 2.0 + pi * j / 9.0);
            const RotationMatrix3 m = velocity_rotation_matrix(h);
            REQUIRE(m.orthonormality_error() < 1e-12);
            REQUIRE_THAT(m.determinant(), WithinAbs(1.0, 1e-12));
            // first column is the direction of travel
            const Vec3 d = angle_unit_vector(h);
            REQUIRE_THAT(m(0, 0), WithinAbs(d.x(), 1e-12));
            REQUIRE_THAT(m(1, 0), WithinAbs(d.y(), 1e-12));
            REQUIRE_THAT(m(2, 0), WithinAbs(d.z(), 1e-12));
        }
}

TEST_CASE("angle unit vectors")
{
    const Vec3 a = angle_unit_vector(SphericalAngles(0.0, 0.0));
    REQUIRE(a == Vec3(1, 0, 0));
    const Vec3 z = angle_unit_vector(SphericalAngles(0.0, pi / 2.0));
    REQUIRE_THAT(z.x(), WithinAbs(0.0, 1e-16));
    REQUIRE_THAT(z.z(), WithinAbs(1.0, 1e-16));
    const Vec3 d = angle_unit_vector(SphericalAngles(pi / 4.0, pi / 4.0));
    REQUIRE_THAT(d.x(), WithinAbs(0.5, 1e-12));
    REQUIRE_THAT(d.y(), WithinAbs(0.5, 1e-12));
    REQUIRE_THAT(d.z(), WithinAbs(std::sqrt(0.5), 1e-12));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> az(0.0, two_pi), el(-1.5, 1.5);
    for (int i = 0; i < 200; ++i)
    {
        const SphericalAngles s(az(rng), el(rng));
        const Vec3 u = angle_unit_vector(s);
        REQUIRE_THAT(u.norm(), WithinAbs(1.0, 1e-12));
        const SphericalAngles back = direction_angles(u * 3.7);
        REQUIRE_THAT(wrap_to_pi(back.azimuth() - s.azimuth()), WithinAbs(0.0, 1e-10));
        REQUIRE_THAT(back.elevation(), WithinAbs(s.elevation(), 1e-10));
    }
}

TEST_CASE("spherical angles wrap azimuth and reject bad elevation")
{
    REQUIRE_THAT(SphericalAngles(-pi / 2.0, 0.0).azimuth(), WithinAbs(1.5 * pi, 1e-15));
    REQUIRE_THAT(SphericalAngles(5.0 * pi, 0.0).azimuth(), WithinAbs(pi, 1e-12));
    REQUIRE_THROWS_AS(SphericalAngles(0.0, 1.6), std::invalid_argument);
}

TEST_CASE("fuselage to world")
{
    const Vec3 v(1, 2, 3);
    REQUIRE(fuselage_to_world(PostureAngles(), v) == v);
    const Vec3 up = fuselage_to_world(PostureAngles(0, 0, pi / 2.0), Vec3(0, 1, 0));
    REQUIRE_THAT(up.x(), WithinAbs(0.0, 1e-16));
    REQUIRE_THAT(up.y(), WithinAbs(0.0, 1e-16));
    REQUIRE_THAT(up.z(), WithinAbs(1.0, 1e-16));

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> sym(-pi, pi), pos(0.0, two_pi), c(-10, 10);
    for (int i = 0; i < 100; ++i)
    {
        const PostureAngles p(sym(rng), pos(rng), sym(rng));
        const Vec3 x(c(rng), c(rng), c(rng));
        const Vec3 w = fuselage_to_world(p, x);
        REQUIRE_THAT(w.norm(), WithinAbs(x.norm(), 1e-12));
        const Vec3 back = posture_matrix(p).transposed() * w;
        REQUIRE_THAT((back - x).norm(), WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("vectors reject non-finite components")
{
    REQUIRE_THROWS_AS(Vec3(1.0, std::numeric_limits<double>::infinity(), 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(Vec3(std::nan(""), 0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(Vec3(1e-12, 0, 0).normalized(), degenerate_geometry_error);
}

TEST_CASE("rotation matrices built from rows are validated")
{
    REQUIRE_NOTHROW(RotationMatrix3::from_rows({0, -1, 0, 1, 0, 0, 0, 0, 1}));
    // the R_z(pi/2) matrix as printed, with a zero in the corner
    REQUIRE_THROWS_AS(RotationMatrix3::from_rows({0, -1, 0, 1, 0, 0, 0, 0, 0}), std::invalid_argument);
    REQUIRE_THROWS_AS(RotationMatrix3::from_rows({-1, 0, 0, 0, 1, 0, 0, 0, 1}), std::invalid_argument);
}
