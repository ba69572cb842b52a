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
#include "u2v/random.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace u2v
{

inline constexpr double speed_of_light = 299792458.0;

// One ray of a cluster. Scatterer positions are the t = 0 interaction points on
// the Tx side and Rx side of the (twin) cluster.
struct SubPath
{
    SphericalAngles departure;
    SphericalAngles arrival;
    std::array<double, 4> init_phases{}; // VV, VH, HV, HH in (-pi, pi]
    double xpr = 8.0;                    // kappa, linear
    Vec3 tx_scatterer;
    Vec3 rx_scatterer;
};

struct Cluster
{
    std::vector<SubPath> subpaths;
    SphericalAngles mean_departure;
    SphericalAngles mean_arrival;
    double tx_distance = 0.0; // Tx to Tx-side scatterer, m
    double rx_distance = 0.0; // Rx to Rx-side scatterer, m
    Vec3 tx_scatterer;        // t = 0 interaction points along the mean directions
    Vec3 rx_scatterer;
    double delay = 0.0;       // s, at t = 0
    double base_power = 1.0;  // before normalization
    double power = 0.0;       // normalized over alive clusters
    Vec3 scatterer_velocity;
    double random_init_phase = two_pi; // (0, 2 pi]
    bool alive = true;
};

struct AngleSpread
{
    double azimuth = 0.0;   // rad
    double elevation = 0.0; // rad
    bool operator==(const AngleSpread &) const = default;
};

struct ClusterParams
{
    int n_paths = 20;
    int m_subpaths = 20;

    // Terminal positions at t = 0; the cluster angles are centred on the LoS directions.
    Vec3 tx_origin{0.0, 0.0, 150.0};
    Vec3 rx_origin{100.0, 0.0, 0.0};

    // Spread of the cluster mean angles around the LoS direction.
    AngleSpread departure_spread{0.35, 0.17};
    AngleSpread arrival_spread{0.70, 0.26};
    // Per-cluster ray spread (scales the 20 standard ray offsets).
    AngleSpread departure_ray_spread{0.035, 0.035};
    AngleSpread arrival_ray_spread{0.087, 0.087};

    double tx_distance_min = 100.0, tx_distance_max = 400.0;
    double rx_distance_min = 20.0, rx_distance_max = 200.0;

    // Exponential power-delay profile: the longest cluster gets this fraction of the
    // shortest one's power.
    double last_to_first_power = 0.01;
    double xpr = 8.0;
    Vec3 scatterer_velocity{};
    double speed_of_light = u2v::speed_of_light;

    bool operator==(const ClusterParams &) const = default;
};

struct ClusterSet
{
    ClusterParams params;
    std::vector<Cluster> clusters;
    double los_init_phase = two_pi; // (0, 2 pi]

    int subpaths_per_cluster() const { return params.m_subpaths; }
    int alive_count() const;
    double alive_power() const;
};

// Standard 20-ray offsets (unit spread), ordered as +-pairs of increasing size.
const std::array<double, 20> &standard_ray_offsets();

ClusterSet generate_clusters(const ClusterParams &params, std::uint64_t seed);

// New Phi_I and polarization phases for every cluster and sub-path; geometry untouched.
ClusterSet redraw_phases(const ClusterSet &set, Rng &rng);

ClusterSet birth_death_step(const ClusterSet &set, double dt, double death_rate, double birth_rate, Rng &rng);

// Sets `power` to base_power / sum(alive base powers); dead clusters get 0.
void normalize_powers(ClusterSet &set);

// First-order Gauss-Markov Ricean K-factor path, linear scale, clipped below at 1e-3.
class RiceanProcess
{
public:
    RiceanProcess(double mean_k, double std_k, double correlation_time, double horizon, std::uint64_t seed,
                  double step = 1e-3);

    double mean() const { return mean_; }
    double std_dev() const { return std_; }
    double correlation_time() const { return correlation_time_; }
    double horizon() const { return horizon_; }
    double step() const { return step_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<double> &path() const { return path_; }

private:
    double mean_, std_, correlation_time_, horizon_, step_;
    std::uint64_t seed_;
    std::vector<double> path_;
};

inline constexpr double min_k_factor = 1e-3;

// Linear interpolation of the tabulated path. t > horizon throws std::out_of_range.
double sample_k_factor(const RiceanProcess &proc, double t);

} // namespace u2v
