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

#include "u2v/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace u2v
{

namespace
{

enum Stream : std::uint64_t
{
    cluster_stream = 1,
    ray_stream = 2,
    phase_stream = 3,
};

// Elevations are clamped just inside the poles so azimuth stays meaningful.
double clamp_elevation(double el)
{
    constexpr double limit = pi / 2.0 - 1e-6;
    return std::clamp(el, -limit, limit);
}

double draw_open_closed_two_pi(Rng &rng)
{
    return two_pi * (1.0 - uniform01(rng)); // (0, 2 pi]
}

double draw_polarization_phase(Rng &rng)
{
    return pi - two_pi * uniform01(rng); // (-pi, pi]
}

void validate(const ClusterParams &p)
{
    if (p.n_paths < 1)
        throw std::invalid_argument("n_paths must be >= 1");
    if (p.m_subpaths < 1)
        throw std::invalid_argument("m_subpaths must be >= 1");
    if (!(p.xpr > 0.0))
        throw std::invalid_argument("xpr must be > 0");
    if (!(p.last_to_first_power > 0.0) || p.last_to_first_power > 1.0)
        throw std::invalid_argument("last_to_first_power must lie in (0, 1]");
    if (!(p.tx_distance_min > 0.0) || p.tx_distance_max < p.tx_distance_min)
        throw std::invalid_argument("invalid Tx scatterer distance range");
    if (!(p.rx_distance_min > 0.0) || p.rx_distance_max < p.rx_distance_min)
        throw std::invalid_argument("invalid Rx scatterer distance range");
    for (double s : {p.departure_spread.azimuth, p.departure_spread.elevation, p.arrival_spread.azimuth,
                     p.arrival_spread.elevation, p.departure_ray_spread.azimuth, p.departure_ray_spread.elevation,
                     p.arrival_ray_spread.azimuth, p.arrival_ray_spread.elevation})
        if (!(s >= 0.0) || !std::isfinite(s))
            throw std::invalid_argument("angle spreads must be finite and non-negative");
    if (!(p.speed_of_light > 0.0))
        throw std::invalid_argument("speed_of_light must be positive");
}

std::vector<double> ray_offsets(int m, Rng &rng)
{
    std::vector<double> out(static_cast<std::size_t>(m));
    if (m == 20)
    {
        const auto &std_offsets = standard_ray_offsets();
        std::copy(std_offsets.begin(), std_offsets.end(), out.begin());
    }
    else
    {
        for (auto &o : out)
            o = 2.0 * (2.0 * uniform01(rng) - 1.0);
    }
    return out;
}

double path_length(const Vec3 &tx, const Vec3 &s_tx, const Vec3 &s_rx, const Vec3 &rx)
{
    return (s_tx - tx).norm() + (s_rx - s_tx).norm() + (rx - s_rx).norm();
}

// Cluster-level draws come from the cluster stream, ray-level draws from a per-cluster
// stream, so changing M leaves the cluster means untouched.
Cluster make_cluster(const ClusterParams &p, const SphericalAngles &dep_center, const SphericalAngles &arr_center,
                     Rng &cluster_rng, Rng &ray_rng)
{
    Cluster c;
    c.mean_departure = {dep_center.azimuth() + p.departure_spread.azimuth * standard_normal(cluster_rng),
                        clamp_elevation(dep_center.elevation() +
                                        p.departure_spread.elevation * standard_normal(cluster_rng))};
    c.mean_arrival = {arr_center.azimuth() + p.arrival_spread.azimuth * standard_normal(cluster_rng),
                      clamp_elevation(arr_center.elevation() + p.arrival_spread.elevation * standard_normal(cluster_rng))};
    c.tx_distance = p.tx_distance_min + (p.tx_distance_max - p.tx_distance_min) * uniform01(cluster_rng);
    c.rx_distance = p.rx_distance_min + (p.rx_distance_max - p.rx_distance_min) * uniform01(cluster_rng);
    c.scatterer_velocity = p.scatterer_velocity;
    c.random_init_phase = draw_open_closed_two_pi(cluster_rng);

    c.tx_scatterer = p.tx_origin + c.tx_distance * angle_unit_vector(c.mean_departure);
    c.rx_scatterer = p.rx_origin + c.rx_distance * angle_unit_vector(c.mean_arrival);
    c.delay = path_length(p.tx_origin, c.tx_scatterer, c.rx_scatterer, p.rx_origin) / p.speed_of_light;

    const int m = p.m_subpaths;
    std::vector<double> dep_az = ray_offsets(m, ray_rng);
    std::vector<double> arr_az = ray_offsets(m, ray_rng);
    std::vector<double> dep_el = ray_offsets(m, ray_rng);
    std::vector<double> arr_el = ray_offsets(m, ray_rng);
    // Random coupling of azimuth and elevation offsets.
    std::shuffle(dep_el.begin(), dep_el.end(), ray_rng);
    std::shuffle(arr_el.begin(), arr_el.end(), ray_rng);
    std::shuffle(arr_az.begin(), arr_az.end(), ray_rng);

    c.subpaths.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
    {
        SubPath sp;
        sp.departure = {c.mean_departure.azimuth() + p.departure_ray_spread.azimuth * dep_az[i],
                        clamp_elevation(c.mean_departure.elevation() + p.departure_ray_spread.elevation * dep_el[i])};
        sp.arrival = {c.mean_arrival.azimuth() + p.arrival_ray_spread.azimuth * arr_az[i],
                      clamp_elevation(c.mean_arrival.elevation() + p.arrival_ray_spread.elevation * arr_el[i])};
        for (auto &ph : sp.init_phases)
            ph = draw_polarization_phase(ray_rng);
        sp.xpr = p.xpr;
        sp.tx_scatterer = p.tx_origin + c.tx_distance * angle_unit_vector(sp.departure);
        sp.rx_scatterer = p.rx_origin + c.rx_distance * angle_unit_vector(sp.arrival);
        c.subpaths.push_back(sp);
    }
    return c;
}

void assign_base_powers(ClusterSet &set)
{
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto &c : set.clusters)
    {
        lo = first ? c.delay : std::min(lo, c.delay);
        hi = first ? c.delay : std::max(hi, c.delay);
        first = false;
    }
    const double decay = std::log(1.0 / set.params.last_to_first_power);
    for (auto &c : set.clusters)
        c.base_power = hi > lo ? std::exp(-decay * (c.delay - lo) / (hi - lo)) : 1.0;
}

} // namespace

const std::array<double, 20> &standard_ray_offsets()
{
    static const std::array<double, 20> offsets{0.0447, -0.0447, 0.1413, -0.1413, 0.2492, -0.2492, 0.3715,
                                                -0.3715, 0.5129, -0.5129, 0.6797, -0.6797, 0.8844, -0.8844,
                                                1.1481, -1.1481, 1.5195, -1.5195, 2.1551, -2.1551};
    return offsets;
}

int ClusterSet::alive_count() const
{
    return static_cast<int>(std::count_if(clusters.begin(), clusters.end(), [](const Cluster &c) { return c.alive; }));
}

double ClusterSet::alive_power() const
{
    double s = 0.0;
    for (const auto &c : clusters)
        if (c.alive)
            s += c.power;
    return s;
}

void normalize_powers(ClusterSet &set)
{
    double total = 0.0;
    for (const auto &c : set.clusters)
        if (c.alive)
            total += c.base_power;
    for (auto &c : set.clusters)
        c.power = (c.alive && total > 0.0) ? c.base_power / total : 0.0;
}

ClusterSet generate_clusters(const ClusterParams &params, std::uint64_t seed)
{
    validate(params);
    const SphericalAngles dep_center = direction_angles(params.rx_origin - params.tx_origin);
    const SphericalAngles arr_center = direction_angles(params.tx_origin - params.rx_origin);

    ClusterSet set;
    set.params = params;
    Rng cluster_rng = make_rng(seed, {cluster_stream});
    set.los_init_phase = draw_open_closed_two_pi(cluster_rng);
    set.clusters.reserve(static_cast<std::size_t>(params.n_paths));
    for (int n = 0; n < params.n_paths; ++n)
    {
        Rng ray_rng = make_rng(seed, {ray_stream, static_cast<std::uint64_t>(n)});
        set.clusters.push_back(make_cluster(params, dep_center, arr_center, cluster_rng, ray_rng));
    }
    assign_base_powers(set);
    normalize_powers(set);
    return set;
}

ClusterSet redraw_phases(const ClusterSet &set, Rng &rng)
{
    ClusterSet out = set;
    out.los_init_phase = draw_open_closed_two_pi(rng);
    for (auto &c : out.clusters)
    {
        c.random_init_phase = draw_open_closed_two_pi(rng);
        for (auto &sp : c.subpaths)
            for (auto &ph : sp.init_phases)
                ph = draw_polarization_phase(rng);
    }
    return out;
}

ClusterSet birth_death_step(const ClusterSet &set, double dt, double death_rate, double birth_rate, Rng &rng)
{
    if (!(dt >= 0.0) || !(death_rate >= 0.0) || !(birth_rate >= 0.0))
        throw std::invalid_argument("birth-death step needs dt >= 0 and non-negative rates");
    if (dt == 0.0 || (death_rate == 0.0 && birth_rate == 0.0))
        return set;

    ClusterSet out = set;
    const double survival = std::exp(-death_rate * dt);
    for (auto &c : out.clusters)
        if (c.alive && uniform01(rng) >= survival)
            c.alive = false;

    const int births = std::poisson_distribution<int>(birth_rate * dt)(rng);
    if (births > 0)
    {
        const ClusterParams &p = out.params;
        const SphericalAngles dep_center = direction_angles(p.rx_origin - p.tx_origin);
        const SphericalAngles arr_center = direction_angles(p.tx_origin - p.rx_origin);
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (const auto &c : set.clusters)
        {
            lo = first ? c.delay : std::min(lo, c.delay);
            hi = first ? c.delay : std::max(hi, c.delay);
            first = false;
        }
        const double decay = std::log(1.0 / p.last_to_first_power);
        for (int i = 0; i < births; ++i)
        {
            Cluster c = make_cluster(p, dep_center, arr_center, rng, rng);
            c.base_power = hi > lo ? std::exp(-decay * std::max(0.0, c.delay - lo) / (hi - lo)) : 1.0;
            out.clusters.push_back(std::move(c));
        }
    }
    normalize_powers(out);
    return out;
}

RiceanProcess::RiceanProcess(double mean_k, double std_k, double correlation_time, double horizon,
                             std::uint64_t seed, double step)
    : mean_(mean_k), std_(std_k), correlation_time_(correlation_time), horizon_(horizon), step_(step), seed_(seed)
{
    if (!(mean_k >= 0.0) || !std::isfinite(mean_k))
        throw std::invalid_argument("mean K must be finite and non-negative");
    if (!(std_k >= 0.0) || !std::isfinite(std_k))
        throw std::invalid_argument("K standard deviation must be finite and non-negative");
    if (!(correlation_time > 0.0))
        throw std::invalid_argument("K correlation time must be positive");
    if (!(horizon >= 0.0) || !(step > 0.0))
        throw std::invalid_argument("K process needs horizon >= 0 and step > 0");

    const auto n = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9)) + 1;
    path_.resize(n);
    if (std_k == 0.0)
    {
        std::fill(path_.begin(), path_.end(), std::max(mean_k, min_k_factor));
        return;
    }
    Rng rng = make_rng(seed, {0x4b});
    const double rho = std::exp(-step / correlation_time);
    const double innovation = std::sqrt(1.0 - rho * rho);
    double x = standard_normal(rng);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (i > 0)
            x = rho * x + innovation * standard_normal(rng);
        path_[i] = std::max(mean_k + std_k * x, min_k_factor);
    }
}

double sample_k_factor(const RiceanProcess &proc, double t)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("K-factor sample time must be >= 0");
    const auto &path = proc.path();
    const double pos = t / proc.step();
    if (pos > static_cast<double>(path.size() - 1) + 1e-9)
        throw std::out_of_range("K-factor sample time beyond the process horizon");
    auto i = static_cast<std::size_t>(std::floor(pos));
    if (i >= path.size() - 1)
        return path.back();
    const double w = pos - static_cast<double>(i);
    return w == 0.0 ? path[i] : path[i] + w * (path[i + 1] - path[i]);
}

} // namespace u2v
