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

#include "u2v/mobility.hpp"
#include "u2v/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace u2v
{

PiecewiseLinear::PiecewiseLinear(double constant) : PiecewiseLinear(std::vector<Knot>{{0.0, constant}}) {}

PiecewiseLinear::PiecewiseLinear(std::vector<Knot> knots) : knots_(std::move(knots))
{
    if (knots_.empty())
        throw std::invalid_argument("schedule needs at least one knot");
    if (knots_.front().time != 0.0)
        throw std::invalid_argument("schedule must start at t = 0");
    for (std::size_t i = 0; i < knots_.size(); ++i)
    {
        if (!std::isfinite(knots_[i].time) || !std::isfinite(knots_[i].value))
            throw std::invalid_argument("schedule knots must be finite");
        if (i > 0 && knots_[i].time <= knots_[i - 1].time)
            throw std::invalid_argument("schedule knot times must be strictly increasing");
    }
}

double PiecewiseLinear::operator()(double t) const
{
    if (t <= knots_.front().time)
        return knots_.front().value;
    if (t >= knots_.back().time)
        return knots_.back().value;
    auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double v, const Knot &k) { return v < k.time; });
    auto lo = hi - 1;
    const double w = (t - lo->time) / (hi->time - lo->time);
    return lo->value + w * (hi->value - lo->value);
}

double PiecewiseLinear::min_value() const
{
    return std::min_element(knots_.begin(), knots_.end(), [](const Knot &a, const Knot &b) { return a.value < b.value; })
        ->value;
}

double PiecewiseLinear::max_value() const
{
    return std::max_element(knots_.begin(), knots_.end(), [](const Knot &a, const Knot &b) { return a.value < b.value; })
        ->value;
}

MobilityProfile::MobilityProfile(MobilitySpec spec) : spec_(std::move(spec))
{
    if (!(spec_.duration > 0.0) || !std::isfinite(spec_.duration))
        throw std::invalid_argument("duration must be positive");
    if (!(spec_.step > 0.0) || spec_.step > spec_.duration)
        throw std::invalid_argument("step must lie in (0, duration]");
    if (spec_.speed.min_value() < 0.0)
        throw std::invalid_argument("speed must be non-negative");
    if (spec_.heading.elevation.min_value() < -pi / 2.0 || spec_.heading.elevation.max_value() > pi / 2.0)
        throw std::invalid_argument("heading elevation must lie in [-pi/2, pi/2]");
    // Interpolating between valid knots cannot leave the (convex) posture ranges,
    // so checking the extremes is enough.
    PostureAngles(spec_.posture.roll.min_value(), spec_.posture.yaw.min_value(), spec_.posture.pitch.min_value());
    PostureAngles(spec_.posture.roll.max_value(), spec_.posture.yaw.max_value(), spec_.posture.pitch.max_value());

    const auto n_steps = static_cast<std::size_t>(std::ceil(spec_.duration / spec_.step - 1e-9));
    grid_positions_.reserve(n_steps + 1);
    Vec3 pos = spec_.initial_position;
    grid_positions_.push_back(pos);
    Vec3 v_prev = velocity(0.0);
    for (std::size_t i = 1; i <= n_steps; ++i)
    {
        const double t = static_cast<double>(i) * spec_.step;
        const Vec3 v = velocity(t);
        pos += (v_prev + v) * (0.5 * spec_.step);
        grid_positions_.push_back(pos);
        v_prev = v;
    }
}

SphericalAngles MobilityProfile::heading(double t) const
{
    return {spec_.heading.azimuth(t), spec_.heading.elevation(t)};
}

PostureAngles MobilityProfile::posture(double t) const
{
    return {spec_.posture.roll(t), spec_.posture.yaw(t), spec_.posture.pitch(t)};
}

Vec3 MobilityProfile::velocity(double t) const
{
    return spec_.speed(t) * angle_unit_vector(heading(t));
}

Vec3 MobilityProfile::position(double t) const
{
    const double h = spec_.step;
    auto i = static_cast<std::size_t>(std::floor(t / h));
    i = std::min(i, grid_positions_.size() - 1);
    const double ti = static_cast<double>(i) * h;
    if (t == ti)
        return grid_positions_[i];
    return grid_positions_[i] + (velocity(ti) + velocity(t)) * (0.5 * (t - ti));
}

KinematicState sample_state(const MobilityProfile &profile, double t)
{
    if (!(t >= 0.0) || t > profile.duration() * (1.0 + 1e-12))
        throw std::out_of_range("sample time " + std::to_string(t) + " s outside [0, " +
                                std::to_string(profile.duration()) + "] s");
    KinematicState s;
    s.time = t;
    s.position = profile.position(t);
    s.velocity = profile.velocity(t);
    s.heading = profile.heading(t);
    s.posture = profile.posture(t);
    return s;
}

namespace
{

constexpr double preset_duration = 2.5;

MobilitySpec straight(const Vec3 &start, double speed, double azimuth, double elevation = 0.0)
{
    MobilitySpec s;
    s.initial_position = start;
    s.speed = PiecewiseLinear(speed);
    s.heading = {PiecewiseLinear(azimuth), PiecewiseLinear(elevation)};
    s.duration = preset_duration;
    return s;
}

// UAV at 150 m flying at 50 m/s. Pitch ramps at pi/2 rad/s to 90 deg at t = 1 s,
// then roll ramps at pi/2 rad/s to 90 deg at t = 2 s. The direction of travel is
// kept fixed while the fuselage rotates.
TerminalPair fig3()
{
    MobilitySpec tx = straight({0.0, 0.0, 150.0}, 50.0, 0.0);
    tx.posture.pitch = PiecewiseLinear({{0.0, 0.0}, {1.0, pi / 2.0}});
    tx.posture.roll = PiecewiseLinear({{0.0, 0.0}, {1.0, 0.0}, {2.0, pi / 2.0}});
    MobilitySpec rx = straight({100.0, 0.0, 0.0}, 20.0, pi / 2.0);
    return {MobilityProfile(tx), MobilityProfile(rx)};
}

// Measurement-matching geometry: Rx at the origin, Tx at `los_distance` along a LoS
// elevation `los_elevation`; Tx travels along azimuth pi, Rx along pi/4.
TerminalPair measurement_geometry(double los_distance, double los_elevation)
{
    const Vec3 tx_pos{los_distance * std::cos(los_elevation), 0.0, los_distance * std::sin(los_elevation)};
    return {MobilityProfile(straight(tx_pos, 40.0, pi)), MobilityProfile(straight({0.0, 0.0, 0.0}, 10.0, pi / 4.0))};
}

} // namespace

const std::vector<std::string> &preset_names()
{
    static const std::vector<std::string> names{"paper-fig3", "paper-fig7", "paper-fig8", "static", "straight-line"};
    return names;
}

TerminalPair preset_scenario(std::string_view name)
{
    if (name == "paper-fig3")
        return fig3();
    if (name == "paper-fig7")
        return measurement_geometry(1000.0, pi / 3.0);
    if (name == "paper-fig8")
        return measurement_geometry(500.0, pi / 6.0);
    if (name == "static")
        return {MobilityProfile(straight({0.0, 0.0, 150.0}, 0.0, 0.0)),
                MobilityProfile(straight({100.0, 0.0, 0.0}, 0.0, 0.0))};
    if (name == "straight-line")
        return {MobilityProfile(straight({0.0, 0.0, 150.0}, 50.0, 0.0)),
                MobilityProfile(straight({200.0, 50.0, 0.0}, 20.0, pi / 2.0))};
    throw not_found_error("unknown preset '" + std::string(name) + "'");
}

MobilityProfile rotate_about_vertical(const MobilityProfile &profile, const Vec3 &pivot, double angle,
                                      double heading_offset)
{
    MobilitySpec spec = profile.spec();
    const Vec3 rel = spec.initial_position - pivot;
    spec.initial_position = pivot + rotation_about_z(wrap_to_pi(angle)) * rel;
    std::vector<Knot> az = spec.heading.azimuth.knots();
    for (auto &k : az)
        k.value += angle + heading_offset;
    spec.heading.azimuth = PiecewiseLinear(std::move(az));
    return MobilityProfile(std::move(spec));
}

} // namespace u2v
