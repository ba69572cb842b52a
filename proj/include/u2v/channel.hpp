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
#include "u2v/mobility.hpp"
#include "u2v/scenario.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace u2v
{

using complex = std::complex<double>;

class CarrierConfig
{
public:
    explicit CarrierConfig(double f0, double c0 = speed_of_light);

    double f0() const { return f0_; }
    double c0() const { return c0_; }
    double wave_number() const { return two_pi * f0_ / c0_; }
    double wavelength() const { return c0_ / f0_; }

    bool operator==(const CarrierConfig &) const = default;

private:
    double f0_, c0_;
};

struct FieldComponents
{
    double v = 0.0;
    double h = 0.0;
};

enum class PatternKind
{
    isotropic_v, // (1, 0) everywhere
    isotropic_h, // (0, 1) everywhere
    three_gpp,   // single-element pattern, 65 deg HPBW, 30 dB floor, 8 dBi, V-polarized
};

// Element field pattern. `mounting` maps the element frame (boresight +x) into the
// array frame; directions are given in the array frame.
struct FieldPattern
{
    PatternKind kind = PatternKind::isotropic_v;
    RotationMatrix3 mounting;

    FieldComponents operator()(const Vec3 &direction) const;
    FieldComponents operator()(const SphericalAngles &angles) const { return (*this)(angle_unit_vector(angles)); }

    // Boresight pointing at (azimuth, elevation) of the array frame.
    static FieldPattern three_gpp_towards(const SphericalAngles &boresight);
    static RotationMatrix3 mounting_towards(const SphericalAngles &boresight);

    bool operator==(const FieldPattern &) const = default;
};

struct AntennaArray
{
    std::vector<Vec3> elements; // local (array-frame) positions, m
    FieldPattern pattern;

    AntennaArray() = default;
    AntennaArray(std::vector<Vec3> element_positions, FieldPattern field_pattern = {});
    std::size_t size() const { return elements.size(); }

    bool operator==(const AntennaArray &) const = default;
};

enum class Side
{
    tx,
    rx
};

enum class Component
{
    full,
    los,
    nlos
};

struct ModelOptions
{
    // false gives the reference model: R^P removed from every phase and pattern term.
    bool posture_enabled = true;
    // Trapezoidal sub-steps per mobility grid step for the Doppler phase integrals.
    int doppler_substeps = 16;
    Component component = Component::full;
    // Baseband frequency of the delay phasors e^{-j 2 pi f tau}, Hz.
    double frequency = 0.0;
    // Cluster birth-death rates, 1/s. Both zero disables the process.
    double death_rate = 0.0;
    double birth_rate = 0.0;

    bool operator==(const ModelOptions &) const = default;
};

struct ChannelModel
{
    CarrierConfig carrier{2.4e9};
    AntennaArray tx_array{{Vec3{}}};
    AntennaArray rx_array{{Vec3{}}};
    ModelOptions options;
};

struct KFactorParams
{
    double mean = 7.0;
    double std_dev = 4.0;
    double correlation_time = 0.1;
    bool operator==(const KFactorParams &) const = default;
};

// Half-widths (rad) of uniform random rotations applied per scene to the Rx start
// position (about the vertical through the Tx start) and to the Rx direction of travel.
struct GeometryJitter
{
    double rx_position_azimuth = 0.0;
    double rx_heading_azimuth = 0.0;
    bool operator==(const GeometryJitter &) const = default;
};

struct SceneParams
{
    TerminalPair terminals = preset_scenario("static");
    ClusterParams clusters;
    KFactorParams k_factor;
    GeometryJitter jitter;
};

// One draw of everything random except the initial phases.
struct Scene
{
    TerminalPair terminals;
    ClusterSet clusters;
    RiceanProcess k_factor;
    std::uint64_t seed = 0;
};

Scene build_scene(const SceneParams &params, std::uint64_t seed);
std::vector<Scene> build_scenes(const SceneParams &params, std::uint64_t seed, int count);
std::uint64_t scene_seed(std::uint64_t seed, int index);

// Frame of a terminal's array in world coordinates: R^Tx R^P for the UAV (R^P dropped
// when posture is disabled), R^Rx for the ground terminal.
RotationMatrix3 array_frame(const KinematicState &state, Side side, bool posture_enabled);

// Departure (Tx) and arrival (Rx) unit vectors and the path length at one instant.
struct PathGeometry
{
    Vec3 s_tx;
    Vec3 s_rx;
    double length = 0.0;
};

PathGeometry los_geometry(const Vec3 &tx_pos, const Vec3 &rx_pos);
PathGeometry nlos_geometry(const Vec3 &tx_pos, const Vec3 &rx_pos, const Vec3 &tx_scatterer, const Vec3 &rx_scatterer);

// k * int_0^t (v_tx . s_tx + v_rx . s_rx) dt', trapezoidal rule.
double doppler_phase_los(const TerminalPair &terminals, const CarrierConfig &carrier, double t,
                         int substeps = ModelOptions{}.doppler_substeps);

// k * int_0^t ((v_tx - v_s) . s_tx + (v_rx - v_s) . s_rx) dt' for one sub-path.
double doppler_phase_nlos(const TerminalPair &terminals, const Cluster &cluster, const SubPath &subpath,
                          const CarrierConfig &carrier, double t, int substeps = ModelOptions{}.doppler_substeps);

// k (R r) . s for one array element: R is array_frame(state, side, posture_enabled).
double spatial_phase(const Vec3 &element, Side side, const KinematicState &state, const Vec3 &direction,
                     const CarrierConfig &carrier, bool posture_enabled = true);

complex los_coefficient(int p, int q, const ChannelModel &model, const TerminalPair &terminals, double init_phase,
                        double t);
complex nlos_coefficient(int p, int q, const Cluster &cluster, const ChannelModel &model,
                         const TerminalPair &terminals, double t);

// One delay tap of the CIR: Q x P coefficients, row-major (q * P + p).
struct Tap
{
    double delay = 0.0;
    std::vector<complex> coefficients;
};

struct CirSnapshot
{
    double time = 0.0;
    int q = 0, p = 0;
    double k_factor = 0.0;
    std::vector<Tap> taps; // tap 0 is LoS, tap 1 + n is cluster n

    complex at(int q_index, int p_index) const; // sum over taps (f = 0)
};

// Channel matrix taps at one instant. `k_factor` overrides the scene's K process
// (infinity gives LoS only, 0 gives NLoS only).
CirSnapshot cir_matrix(const ChannelModel &model, const Scene &scene, double t,
                       std::optional<double> k_factor = std::nullopt);

// sum_taps h e^{-j 2 pi f tau}, Q x P row-major.
std::vector<complex> transfer_function(const CirSnapshot &snapshot, double f);

// Geometry of every path (LoS first, then cluster-major sub-paths) sampled at a sorted
// list of times: Doppler phases, array-frame directions and delays.
class PathTracks
{
public:
    // `doppler_source` (same scene, carrier and times) skips the Doppler integration;
    // only posture, patterns and elements may differ between the two models.
    // `posture_times`, if given, holds one instant per entry of `times` at which the
    // UAV posture is sampled instead (a correlation anchor, say).
    PathTracks(const ChannelModel &model, const Scene &scene, std::vector<double> times,
               const PathTracks *doppler_source = nullptr, const std::vector<double> &posture_times = {});

    const std::vector<double> &times() const { return times_; }
    std::size_t n_times() const { return times_.size(); }
    std::size_t n_paths() const { return n_paths_; }
    int subpaths_per_cluster() const { return m_; }
    // Frees the direction tables once every PairBasis is built; Doppler stays.
    void drop_directions();

    double doppler(std::size_t path, std::size_t ti) const { return doppler_[path * n_times() + ti]; }
    const Vec3 &tx_local(std::size_t path, std::size_t ti) const { return tx_local_[path * n_times() + ti]; }
    const Vec3 &rx_local(std::size_t path, std::size_t ti) const { return rx_local_[path * n_times() + ti]; }
    double los_delay(std::size_t ti) const { return los_delay_[ti]; }
    double cluster_delay(std::size_t n, std::size_t ti) const { return cluster_delay_[n * n_times() + ti]; }
    double k_factor(std::size_t ti) const { return k_[ti]; }

private:
    std::vector<double> times_;
    std::size_t n_paths_ = 0;
    int m_ = 0;
    std::vector<double> doppler_;
    std::vector<Vec3> tx_local_, rx_local_;
    std::vector<double> los_delay_, cluster_delay_, k_;
};

// Polarization products in the order VV, VH, HV, HH.
inline constexpr int n_pol = 4;

// Deterministic part of h for one (Tx element position, Rx element position) pair:
// h(t) = sum_path sum_pol c[path][pol] * term(path, t, pol), where c carries the
// random initial and polarization phases. Tap weights, pattern products, delay
// phasors and the component selection are folded in.
class PairBasis
{
public:
    PairBasis(const ChannelModel &model, const Scene &scene, const PathTracks &tracks, const Vec3 &tx_element,
              const Vec3 &rx_element);

    std::size_t n_times() const { return n_times_; }
    std::size_t n_paths() const { return n_paths_; }
    const complex &term(std::size_t path, std::size_t ti, int pol) const
    {
        static const complex zero{};
        const int slot = slot_[static_cast<std::size_t>(pol)];
        return slot < 0 ? zero : terms_[(path * n_times_ + ti) * n_slots_ + static_cast<std::size_t>(slot)];
    }
    // False when the two patterns make this polarization product identically zero.
    bool pol_active(int pol) const { return slot_[static_cast<std::size_t>(pol)] >= 0; }
    bool path_active(std::size_t path) const { return path_active_[path]; }

private:
    std::size_t n_times_, n_paths_;
    // Only polarization products the patterns can produce are stored.
    std::size_t n_slots_ = 0;
    std::array<int, n_pol> slot_{};
    std::vector<complex> terms_;
    std::vector<bool> path_active_;
};

// Random factors of one realization, laid out like PairBasis paths.
std::vector<std::array<complex, n_pol>> realization_factors(const ClusterSet &phases);

// Expected |c|^2 per path and polarization (1 for co-pol, 1/kappa for cross-pol).
std::vector<std::array<double, n_pol>> factor_power(const ClusterSet &set);

complex synthesize(const PairBasis &basis, const std::vector<std::array<complex, n_pol>> &factors, std::size_t ti);

// Time series of CIR snapshots for one realization.
struct ChannelRealization
{
    std::vector<CirSnapshot> snapshots;
    std::uint64_t seed = 0;
    std::string scenario_hash;
};

// `phases` supplies the initial phases (normally redraw_phases of the scene's set).
// With birth-death enabled, cluster survival is evolved on the time grid.
ChannelRealization synthesize_realization(const ChannelModel &model, const Scene &scene, const ClusterSet &phases,
                                          const std::vector<double> &times, Rng &birth_death_rng);

} // namespace u2v
