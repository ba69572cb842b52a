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

#include "u2v/geometry.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace u2v
{

struct Knot
{
    double time;
    double value;
    bool operator==(const Knot &) const = default;
};

// Piecewise-linear function of time. The first knot sits at t = 0, knot times are
// strictly increasing and the last value is held constant after the last knot,
// so the segments always cover [0, duration] without gaps or overlaps.
class PiecewiseLinear
{
public:
    PiecewiseLinear() : PiecewiseLinear(0.0) {}
    explicit PiecewiseLinear(double constant);
    explicit PiecewiseLinear(std::vector<Knot> knots);

    double operator()(double t) const;
    const std::vector<Knot> &knots() const { return knots_; }
    double min_value() const;
    double max_value() const;

    bool operator==(const PiecewiseLinear &) const = default;

private:
    std::vector<Knot> knots_;
};

struct HeadingSchedule
{
    PiecewiseLinear azimuth;   // rad, unwrapped; wrapped on evaluation
    PiecewiseLinear elevation; // rad, within [-pi/2, pi/2]
    bool operator==(const HeadingSchedule &) const = default;
};

struct PostureSchedule
{
    PiecewiseLinear roll;  // omega
    PiecewiseLinear yaw;   // phi
    PiecewiseLinear pitch; // gamma
    bool operator==(const PostureSchedule &) const = default;
};

struct MobilitySpec
{
    Vec3 initial_position;
    PiecewiseLinear speed; // m/s
    HeadingSchedule heading;
    PostureSchedule posture; // identity for ground terminals
    double duration = 1.0;   // s
    double step = 1e-3;      // internal integration grid, s

    bool operator==(const MobilitySpec &) const = default;
};

struct KinematicState
{
    Vec3 position;
    Vec3 velocity;
    SphericalAngles heading;
    PostureAngles posture;
    double time = 0.0;
};

// Immutable trajectory of one terminal. Positions are the trapezoidal integral of
// the velocity on the uniform `step` grid and are tabulated on construction.
class MobilityProfile
{
public:
    explicit MobilityProfile(MobilitySpec spec);

    const MobilitySpec &spec() const { return spec_; }
    double duration() const { return spec_.duration; }
    double step() const { return spec_.step; }

    double speed(double t) const { return spec_.speed(t); }
    SphericalAngles heading(double t) const;
    PostureAngles posture(double t) const;
    Vec3 velocity(double t) const;
    Vec3 position(double t) const;

    bool operator==(const MobilityProfile &other) const { return spec_ == other.spec_; }

private:
    MobilitySpec spec_;
    std::vector<Vec3> grid_positions_;
};

// Out-of-range t throws std::out_of_range.
KinematicState sample_state(const MobilityProfile &profile, double t);

struct TerminalPair
{
    MobilityProfile tx;
    MobilityProfile rx;
    bool operator==(const TerminalPair &) const = default;
};

// Known names: paper-fig3, paper-fig7, paper-fig8, static, straight-line.
// Unknown names throw not_found_error.
TerminalPair preset_scenario(std::string_view name);
const std::vector<std::string> &preset_names();

// Rotates a terminal's trajectory about the vertical axis through `pivot` by `angle`
// and adds `heading_offset` to its direction of travel.
MobilityProfile rotate_about_vertical(const MobilityProfile &profile, const Vec3 &pivot, double angle,
                                      double heading_offset);

} // namespace u2v
