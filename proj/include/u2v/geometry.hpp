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

#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace u2v
{

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Cartesian 3-vector. Used for positions (m), velocities (m/s) and unit directions.
class Vec3
{
public:
    Vec3() = default;
    Vec3(double x, double y, double z);

    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }
    double operator[](int i) const { return i == 0 ? x_ : (i == 1 ? y_ : z_); }

    double dot(const Vec3 &other) const { return x_ * other.x_ + y_ * other.y_ + z_ * other.z_; }
    Vec3 cross(const Vec3 &other) const;
    double norm() const { return std::sqrt(dot(*this)); }

    // Throws degenerate_geometry_error for vectors shorter than 1e-9.
    Vec3 normalized() const;

    Vec3 operator+(const Vec3 &o) const { return {x_ + o.x_, y_ + o.y_, z_ + o.z_}; }
    Vec3 operator-(const Vec3 &o) const { return {x_ - o.x_, y_ - o.y_, z_ - o.z_}; }
    Vec3 operator-() const { return {-x_, -y_, -z_}; }
    Vec3 operator*(double s) const { return {x_ * s, y_ * s, z_ * s}; }
    Vec3 operator/(double s) const { return {x_ / s, y_ / s, z_ / s}; }
    Vec3 &operator+=(const Vec3 &o);

    bool operator==(const Vec3 &) const = default;

private:
    double x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

inline Vec3 operator*(double s, const Vec3 &v) { return v * s; }

// Proper 3x3 rotation. Instances only come out of the factory functions below
// and products of rotations, so they stay orthonormal with det = +1.
class RotationMatrix3
{
public:
    RotationMatrix3(); // identity

    double operator()(int row, int col) const { return m_[3 * row + col]; }
    const std::array<double, 9> &entries() const { return m_; }

    Vec3 operator*(const Vec3 &v) const;
    RotationMatrix3 operator*(const RotationMatrix3 &other) const;
    RotationMatrix3 transposed() const;
    double determinant() const;

    // Largest deviation of M^T M from the identity.
    double orthonormality_error() const;

    bool operator==(const RotationMatrix3 &) const = default;

    // Validates the orthonormality and determinant invariants within `tolerance`.
    static RotationMatrix3 from_rows(const std::array<double, 9> &row_major, double tolerance = 1e-12);

private:
    explicit RotationMatrix3(const std::array<double, 9> &row_major) : m_(row_major) {}
    std::array<double, 9> m_;
};

// Fuselage attitude. roll in [-pi, pi], yaw in [0, 2 pi), pitch in [-pi, pi].
class PostureAngles
{
public:
    PostureAngles() = default;
    PostureAngles(double roll, double yaw, double pitch);

    double roll() const { return roll_; }
    double yaw() const { return yaw_; }
    double pitch() const { return pitch_; }

    bool operator==(const PostureAngles &) const = default;

private:
    double roll_ = 0.0, yaw_ = 0.0, pitch_ = 0.0;
};

// Azimuth is wrapped into [0, 2 pi) on construction. Elevation outside
// [-pi/2, pi/2] is rejected.
class SphericalAngles
{
public:
    SphericalAngles() = default;
    SphericalAngles(double azimuth, double elevation);

    double azimuth() const { return azimuth_; }
    double elevation() const { return elevation_; }

    bool operator==(const SphericalAngles &) const = default;

private:
    double azimuth_ = 0.0, elevation_ = 0.0;
};

double wrap_to_two_pi(double angle);
double wrap_to_pi(double angle); // (-pi, pi]

RotationMatrix3 rotation_about_x(double pitch);
RotationMatrix3 rotation_about_y(double yaw);
RotationMatrix3 rotation_about_z(double roll);

// R_z(roll) * R_y(yaw) * R_x(pitch): fuselage frame to world frame.
RotationMatrix3 posture_matrix(const PostureAngles &angles);

// Velocity-frame rotation for a terminal heading with azimuth phi and elevation theta:
//   [ cos(th)cos(ph)  -sin(ph)  -sin(th)cos(ph) ]
//   [ cos(th)sin(ph)   cos(ph)  -sin(th)sin(ph) ]
//   [ sin(th)          0         cos(th)        ]
// The first column is the direction of travel.
RotationMatrix3 velocity_rotation_matrix(const SphericalAngles &heading);

// [cos(el)cos(az), cos(el)sin(az), sin(el)]
Vec3 angle_unit_vector(const SphericalAngles &angles);

// Inverse of angle_unit_vector for any non-zero vector.
SphericalAngles direction_angles(const Vec3 &v);

Vec3 fuselage_to_world(const PostureAngles &angles, const Vec3 &v);

} // namespace u2v
