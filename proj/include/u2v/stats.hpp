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

#include "u2v/channel.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace u2v
{

enum class CurveKind
{
    acf,
    ccf,
    stcf
};

std::string to_string(CurveKind kind);

// Lags are seconds for ACF and carrier wavelengths for CCF.
struct CorrelationCurve
{
    CurveKind kind = CurveKind::acf;
    std::vector<double> lags;
    std::vector<complex> values;
    std::vector<double> std_errors; // empty for analytic curves
    double anchor_time = 0.0;
    bool normalized = true;
};

// Which posture the lagged coefficient h(t + dt) sees. `anchor` keeps the UAV attitude
// of the anchor time t over the whole lag window (the local correlation at t; posture
// on and off coincide wherever the posture at t is zero). `instantaneous` uses the
// attitude at t + dt.
enum class PostureTiming
{
    anchor,
    instantaneous
};

// Everything the correlation functions average over: a channel model, a fixed set of
// scenes (cluster geometry, K path, jitter) and the reference element pair.
struct CorrelationProblem
{
    ChannelModel model;
    std::vector<Scene> scenes;
    int tx_element = 0;
    int rx_element = 0;
    PostureTiming posture_timing = PostureTiming::anchor;
    // Monte Carlo draws come in pairs that share every phase except the LoS one,
    // which is shifted by pi in the second draw.
    bool antithetic = true;
};

CorrelationProblem make_problem(const ChannelModel &model, const SceneParams &params, std::uint64_t seed,
                                int n_scenes = 50);

// Displacement of the second channel coefficient relative to the first one.
struct StcfLag
{
    double dt = 0.0;
    Vec3 dr_tx; // array frame, m
    Vec3 dr_rx;
};

// Per-scene path tracks and pair bases for a set of anchor times and one lag set.
// Building it is the expensive part; analytic and Monte Carlo evaluations then reuse it.
class CorrelationEngine
{
public:
    // `doppler_from` must be built on the same scenes, carrier, anchors and lags; its
    // Doppler integrals are reused (posture, patterns and elements may differ).
    CorrelationEngine(const CorrelationProblem &problem, std::vector<double> anchors, std::vector<StcfLag> lags,
                      int workers = 1, const CorrelationEngine *doppler_from = nullptr);
    CorrelationEngine(const CorrelationProblem &problem, double t, std::vector<StcfLag> lags, int workers = 1)
        : CorrelationEngine(problem, std::vector<double>{t}, std::move(lags), workers)
    {
    }

    const std::vector<StcfLag> &lags() const { return lags_; }
    const std::vector<double> &anchors() const { return anchors_; }

    // E{h1* h2} / sqrt(E|h1|^2 E|h2|^2), expectation over phases (exact) and scenes (mean).
    std::vector<complex> analytic(std::size_t anchor = 0) const;

    struct Estimate
    {
        std::vector<complex> values;
        std::vector<double> std_errors;
    };
    // Realization r uses scene r mod S with fresh initial phases (pair r / 2 and scene
    // (r / 2) mod S when antithetic). Output does not depend on the worker count.
    Estimate monte_carlo(int n_realizations, std::uint64_t seed, int workers = 1, std::size_t anchor = 0) const;

private:
    struct SceneData;
    const CorrelationProblem *problem_;
    std::vector<double> anchors_;
    std::vector<StcfLag> lags_;
    std::vector<double> times_, posture_times_;
    std::vector<std::size_t> anchor_index_;          // [anchor]
    std::vector<std::size_t> lag_time_index_;        // [anchor * L + lag]
    std::vector<Vec3> tx_positions_, rx_positions_; // distinct element pairs
    std::size_t base_pair_ = 0;
    std::vector<std::size_t> lag_pair_;
    std::vector<std::shared_ptr<const SceneData>> scenes_;
};

complex analytic_stcf(const CorrelationProblem &problem, double t, double dt, const Vec3 &dr_tx, const Vec3 &dr_rx);
complex analytic_acf(const CorrelationProblem &problem, double t, double dt);
complex analytic_ccf(const CorrelationProblem &problem, double t, const Vec3 &dr_tx, const Vec3 &dr_rx);

CorrelationCurve analytic_acf_curve(const CorrelationProblem &problem, double t, const std::vector<double> &dts,
                                    int workers = 1);

// CCF against element spacing (in wavelengths) along `axis` of one terminal's array.
struct SpacingAxis
{
    Side side = Side::tx;
    Vec3 direction{1.0, 0.0, 0.0};
    bool operator==(const SpacingAxis &) const = default;
};

CorrelationCurve analytic_ccf_curve(const CorrelationProblem &problem, double t, const std::vector<double> &spacings,
                                    const SpacingAxis &axis = {}, int workers = 1);

CorrelationCurve mc_acf(const CorrelationProblem &problem, double t, const std::vector<double> &dts,
                        int n_realizations, std::uint64_t seed, int workers = 1);
CorrelationCurve mc_ccf(const CorrelationProblem &problem, double t, const std::vector<double> &spacings,
                        int n_realizations, std::uint64_t seed, const SpacingAxis &axis = {}, int workers = 1);

std::vector<StcfLag> acf_lags(const std::vector<double> &dts);
std::vector<StcfLag> ccf_lags(const std::vector<double> &spacings, const SpacingAxis &axis, double wavelength);

// Smallest lag where |rho| first drops below `threshold`, linearly interpolated.
std::optional<double> coherence_time(const CorrelationCurve &curve, double threshold = 0.5);

// Uniform grid 0, step, ..., up to `max` inclusive (within rounding).
std::vector<double> lag_grid(double max, double step);

void write_curve_csv(const CorrelationCurve &curve, const std::filesystem::path &path);
std::string curve_csv(const CorrelationCurve &curve);
CorrelationCurve parse_curve_csv(const std::string &text, CurveKind kind = CurveKind::acf);
CorrelationCurve ingest_reference_curve(const std::filesystem::path &path, CurveKind kind = CurveKind::acf);

struct CurveComparison
{
    std::vector<double> lags; // the coarser grid, restricted to the overlap
    std::vector<complex> difference;
    double max_abs_difference = 0.0;       // max |a - b|
    double max_magnitude_difference = 0.0; // max ||a| - |b||
};

// Interpolates the finer curve onto the coarser one (fewer points inside the overlap).
CurveComparison compare_curves(const CorrelationCurve &a, const CorrelationCurve &b);

complex interpolate(const CorrelationCurve &curve, double lag);

} // namespace u2v
