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

#include "u2v/geometry.hpp"
#include "u2v/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace u2v
{

namespace
{
void require_finite(double v, const char *what)
{
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be finite");
}
} // namespace

Vec3::Vec3(double x, double y, double z) : x_(x), y_(y), z_(z)
{
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
        throw std::invalid_argument("Vec3 components must be finite");
}

Vec3 Vec3::cross(const Vec3 &o) const
{
    return {y_ * o.z_ - z_ * o.y_, z_ * o.x_ - x_ * o.z_, x_ * o.y_ - y_ * o.x_};
}

Vec3 Vec3::normalized() const
{
    const double n = norm();
    if (n < 1e-9)
        throw degenerate_geometry_error("cannot normalize a zero-length vector");
    return *this / n;
}

Vec3 &Vec3::operator+=(const Vec3 &o)
{
    x_ += o.x_;
    y_ += o.y_;
    z_ += o.z_;
    return *this;
}

RotationMatrix3::RotationMatrix3() : m_{1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0} {}

Vec3 RotationMatrix3::operator*(const Vec3 &v) const
{
    return {m_[0] * v.x() + m_[1] * v.y() + m_[2] * v.z(),
            m_[3] * v.x() + m_[4] * v.y() + m_[5] * v.z(),
            m_[6] * v.x() + m_[7] * v.y() + m_[8] * v.z()};
}

RotationMatrix3 RotationMatrix3::operator*(const RotationMatrix3 &o) const
{
    std::array<double, 9> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r[3 * i + j] = m_[3 * i] * o.m_[j] + m_[3 * i + 1] * o.m_[3 + j] + m_[3 * i + 2] * o.m_[6 + j];
    return RotationMatrix3(r);
}

RotationMatrix3 RotationMatrix3::transposed() const
{
    return RotationMatrix3({m_[0], m_[3], m_[6], m_[1], m_[4], m_[7], m_[2], m_[5], m_[8]});
}

double RotationMatrix3::determinant() const
{
    return m_[0] * (m_[4] * m_[8] - m_[5] * m_[7]) - m_[1] * (m_[3] * m_[8] - m_[5] * m_[6]) +
           m_[2] * (m_[3] * m_[7] - m_[4] * m_[6]);
}

double RotationMatrix3::orthonormality_error() const
{
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
        {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += m_[3 * k + i] * m_[3 * k + j];
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

RotationMatrix3 RotationMatrix3::from_rows(const std::array<double, 9> &row_major, double tolerance)
{
    for (double v : row_major)
        require_finite(v, "rotation matrix entry");
    RotationMatrix3 m(row_major);
    if (m.orthonormality_error() > tolerance)
        throw std::invalid_argument("matrix is not orthonormal");
    if (std::abs(m.determinant() - 1.0) > tolerance)
        throw std::invalid_argument("matrix is not a proper rotation (det != 1)");
    return m;
}

PostureAngles::PostureAngles(double roll, double yaw, double pitch) : roll_(roll), yaw_(yaw), pitch_(pitch)
{
    require_finite(roll, "roll");
    require_finite(yaw, "yaw");
    require_finite(pitch, "pitch");
    if (roll < -pi || roll > pi)
        throw std::invalid_argument("roll must lie in [-pi, pi]");
    if (yaw < 0.0 || yaw >= two_pi)
        throw std::invalid_argument("yaw must lie in [0, 2 pi)");
    if (pitch < -pi || pitch > pi)
        throw std::invalid_argument("pitch must lie in [-pi, pi]");
}

double wrap_to_two_pi(double angle)
{
    double a = std::fmod(angle, two_pi);
    if (a < 0.0)
        a += two_pi;
    // fmod can return a value that rounds up to 2 pi after the addition
    if (a >= two_pi)
        a = 0.0;
    return a;
}

double wrap_to_pi(double angle)
{
    double a = wrap_to_two_pi(angle);
    return a > pi ? a - two_pi : a;
}

SphericalAngles::SphericalAngles(double azimuth, double elevation)
{
    require_finite(azimuth, "azimuth");
    require_finite(elevation, "elevation");
    if (elevation < -pi / 2.0 || elevation > pi / 2.0)
        throw std::invalid_argument("elevation must lie in [-pi/2, pi/2]");
    azimuth_ = wrap_to_two_pi(azimuth);
    elevation_ = elevation;
}

RotationMatrix3 rotation_about_x(double pitch)
{
    require_finite(pitch, "pitch");
    const double c = std::cos(pitch), s = std::sin(pitch);
    return RotationMatrix3::from_rows({1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c});
}

RotationMatrix3 rotation_about_y(double yaw)
{
    require_finite(yaw, "yaw");
    const double c = std::cos(yaw), s = std::sin(yaw);
    return RotationMatrix3::from_rows({c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c});
}

RotationMatrix3 rotation_about_z(double roll)
{
    require_finite(roll, "roll");
    const double c = std::cos(roll), s = std::sin(roll);
    return RotationMatrix3::from_rows({c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0});
}

RotationMatrix3 posture_matrix(const PostureAngles &angles)
{
    return rotation_about_z(angles.roll()) * rotation_about_y(angles.yaw()) * rotation_about_x(angles.pitch());
}

RotationMatrix3 velocity_rotation_matrix(const SphericalAngles &heading)
{
    const double ct = std::cos(heading.elevation()), st = std::sin(heading.elevation());
    const double cp = std::cos(heading.azimuth()), sp = std::sin(heading.azimuth());
    return RotationMatrix3::from_rows({ct * cp, -sp, -st * cp, ct * sp, cp, -st * sp, st, 0.0, ct});
}

Vec3 angle_unit_vector(const SphericalAngles &angles)
{
    const double ce = std::cos(angles.elevation());
    return {ce * std::cos(angles.azimuth()), ce * std::sin(angles.azimuth()), std::sin(angles.elevation())};
}

SphericalAngles direction_angles(const Vec3 &v)
{
    const Vec3 u = v.normalized();
    const double el = std::asin(std::clamp(u.z(), -1.0, 1.0));
    return {std::atan2(u.y(), u.x()), el};
}

Vec3 fuselage_to_world(const PostureAngles &angles, const Vec3 &v)
{
    return posture_matrix(angles) * v;
}

} // namespace u2v
