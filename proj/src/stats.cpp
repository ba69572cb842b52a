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

#include "u2v/stats.hpp"
#include "u2v/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace u2v
{

std::string to_string(CurveKind kind)
{
    switch (kind)
    {
    case CurveKind::acf:
        return "acf";
    case CurveKind::ccf:
        return "ccf";
    case CurveKind::stcf:
        return "stcf";
    }
    return "?";
}

CorrelationProblem make_problem(const ChannelModel &model, const SceneParams &params, std::uint64_t seed,
                                int n_scenes)
{
    return {model, build_scenes(params, seed, n_scenes), 0, 0};
}

namespace
{

constexpr std::uint64_t phase_stream = 3;
constexpr std::uint64_t survival_stream = 4;

// Runs body(i) for i in [0, n) on up to `workers` threads, contiguous chunks.
template <class F> void parallel_for(std::size_t n, int workers, F body)
{
    const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
    if (w == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(w);
    const std::size_t chunk = (n + w - 1) / w;
    for (std::size_t k = 0; k < w; ++k)
    {
        threads.emplace_back([&, k] {
            try
            {
                for (std::size_t i = k * chunk; i < std::min(n, (k + 1) * chunk); ++i)
                    body(i);
            }
            catch (...)
            {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto &th : threads)
        th.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

// LoS factors are fully determined up to the common phase, which cancels in products.
complex los_value(const PairBasis &basis, std::size_t ti)
{
    return basis.term(0, ti, 0) - basis.term(0, ti, 3);
}

} // namespace

struct CorrelationEngine::SceneData
{
    std::unique_ptr<PathTracks> tracks;
    std::vector<PairBasis> bases;
    std::vector<std::array<double, n_pol>> power;
};

CorrelationEngine::CorrelationEngine(const CorrelationProblem &problem, std::vector<double> anchors,
                                     std::vector<StcfLag> lags, int workers, const CorrelationEngine *doppler_from)
    : problem_(&problem), anchors_(std::move(anchors)), lags_(std::move(lags))
{
    if (problem.scenes.empty())
        throw std::invalid_argument("correlation problem has no scenes");
    const ChannelModel &model = problem.model;
    if (problem.tx_element < 0 || static_cast<std::size_t>(problem.tx_element) >= model.tx_array.size() ||
        problem.rx_element < 0 || static_cast<std::size_t>(problem.rx_element) >= model.rx_array.size())
        throw std::out_of_range("reference element index out of range");
    if (lags_.empty())
        throw std::invalid_argument("no lags requested");
    if (anchors_.empty())
        throw std::invalid_argument("no anchor times requested");

    // (time, posture time) entries, sorted by time; anchors may share entries.
    const bool hold = problem.posture_timing == PostureTiming::anchor;
    std::vector<std::pair<double, double>> entries;
    for (double t : anchors_)
    {
        entries.emplace_back(t, t);
        for (const auto &lag : lags_)
        {
            if (!(t + lag.dt >= 0.0))
                throw std::invalid_argument("lag reaches before t = 0");
            entries.emplace_back(t + lag.dt, hold ? t : t + lag.dt);
        }
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
    for (const auto &[t, tp] : entries)
    {
        times_.push_back(t);
        posture_times_.push_back(tp);
    }
    auto index_of = [&](double x, double tp) {
        return static_cast<std::size_t>(std::lower_bound(entries.begin(), entries.end(), std::pair{x, tp}) -
                                        entries.begin());
    };
    for (double t : anchors_)
    {
        anchor_index_.push_back(index_of(t, t));
        for (const auto &lag : lags_)
            lag_time_index_.push_back(index_of(t + lag.dt, hold ? t : t + lag.dt));
    }

    const Vec3 r_tx = model.tx_array.elements[static_cast<std::size_t>(problem.tx_element)];
    const Vec3 r_rx = model.rx_array.elements[static_cast<std::size_t>(problem.rx_element)];
    auto pair_index = [&](const Vec3 &a, const Vec3 &b) {
        for (std::size_t i = 0; i < tx_positions_.size(); ++i)
            if (tx_positions_[i] == a && rx_positions_[i] == b)
                return i;
        tx_positions_.push_back(a);
        rx_positions_.push_back(b);
        return tx_positions_.size() - 1;
    };
    base_pair_ = pair_index(r_tx, r_rx);
    for (const auto &lag : lags_)
        lag_pair_.push_back(pair_index(r_tx + lag.dr_tx, r_rx + lag.dr_rx));

    if (doppler_from && (doppler_from->times_ != times_ || doppler_from->scenes_.size() != problem.scenes.size()))
        throw std::invalid_argument("Doppler source engine uses a different time grid or scene count");

    scenes_.resize(problem.scenes.size());
    parallel_for(problem.scenes.size(), workers, [&](std::size_t s) {
        auto data = std::make_shared<SceneData>();
        const Scene &scene = problem.scenes[s];
        const PathTracks *source = doppler_from ? doppler_from->scenes_[s]->tracks.get() : nullptr;
        data->tracks = std::make_unique<PathTracks>(model, scene, times_, source, posture_times_);
        for (std::size_t i = 0; i < tx_positions_.size(); ++i)
            data->bases.emplace_back(model, scene, *data->tracks, tx_positions_[i], rx_positions_[i]);
        data->tracks->drop_directions();
        data->power = factor_power(scene.clusters);
        scenes_[s] = std::move(data);
    });
}

std::vector<complex> CorrelationEngine::analytic(std::size_t anchor) const
{
    const double death_rate = problem_->model.options.death_rate;
    const std::size_t L = lags_.size();
    std::vector<complex> num(L, 0.0);
    std::vector<double> p1(L, 0.0), p2(L, 0.0);
    for (const auto &sp : scenes_)
    {
        const SceneData &d = *sp;
        const PairBasis &a = d.bases[base_pair_];
        const std::size_t ta = anchor_index_.at(anchor);
        for (std::size_t l = 0; l < L; ++l)
        {
            const PairBasis &b = d.bases[lag_pair_[l]];
            const std::size_t tb = lag_time_index_[anchor * L + l];
            const double survival = death_rate > 0.0 ? std::exp(-death_rate * std::abs(lags_[l].dt)) : 1.0;
            const complex la = los_value(a, ta), lb = los_value(b, tb);
            complex cross = std::conj(la) * lb;
            double pa = std::norm(la), pb = std::norm(lb);
            complex nlos = 0.0;
            for (std::size_t path = 1; path < a.n_paths(); ++path)
            {
                if (!a.path_active(path) && !b.path_active(path))
                    continue;
                for (int pol = 0; pol < n_pol; ++pol)
                {
                    const double w = d.power[path][static_cast<std::size_t>(pol)];
                    const complex &x = a.term(path, ta, pol);
                    const complex &y = b.term(path, tb, pol);
                    nlos += w * std::conj(x) * y;
                    pa += w * std::norm(x);
                    pb += w * std::norm(y);
                }
            }
            num[l] += cross + survival * nlos;
            p1[l] += pa;
            p2[l] += pb;
        }
    }
    std::vector<complex> out(L);
    for (std::size_t l = 0; l < L; ++l)
    {
        const double norm = std::sqrt(p1[l] * p2[l]);
        out[l] = norm > 0.0 ? num[l] / norm : complex(0.0);
    }
    return out;
}

CorrelationEngine::Estimate CorrelationEngine::monte_carlo(int n_realizations, std::uint64_t seed, int workers,
                                                          std::size_t anchor) const
{
    if (n_realizations < 2)
        throw std::invalid_argument("Monte Carlo estimate needs at least 2 realizations");
    const double death_rate = problem_->model.options.death_rate;
    const std::size_t L = lags_.size(), R = static_cast<std::size_t>(n_realizations);
    const std::size_t S = scenes_.size();
    if (anchor >= anchors_.size())
        throw std::out_of_range("anchor index out of range");

    // Per-realization products, reduced afterwards in index order.
    std::vector<complex> prod(R * L);
    std::vector<double> pow1(R * L), pow2(R * L);

    // Independent units of the estimator: antithetic pairs or single draws.
    const std::size_t unit_size = problem_->antithetic ? 2 : 1;

    parallel_for(R, workers, [&](std::size_t r) {
        const std::size_t u = r / unit_size;
        const std::size_t s = u % S;
        const SceneData &d = *scenes_[s];
        const Scene &scene = problem_->scenes[s];
        Rng rng = make_rng(seed, {phase_stream, static_cast<std::uint64_t>(u)});
        const ClusterSet phases = redraw_phases(scene.clusters, rng);
        auto factors = realization_factors(phases);
        if (r % unit_size == 1)
            for (complex &f : factors[0])
                f = -f;
        const int M = phases.subpaths_per_cluster();

        std::vector<double> lifetime;
        if (death_rate > 0.0)
        {
            Rng srng = make_rng(seed, {survival_stream, static_cast<std::uint64_t>(u)});
            for (std::size_t n = 0; n < phases.clusters.size(); ++n)
                lifetime.push_back(-std::log(1.0 - uniform01(srng)) / death_rate);
        }

        const PairBasis &a = d.bases[base_pair_];
        const complex h1 = synthesize(a, factors, anchor_index_[anchor]);
        for (std::size_t l = 0; l < L; ++l)
        {
            const PairBasis &b = d.bases[lag_pair_[l]];
            const std::size_t tb = lag_time_index_[anchor * L + l];
            complex h2 = 0.0;
            if (lifetime.empty())
                h2 = synthesize(b, factors, tb);
            else
            {
                const double dt = std::abs(lags_[l].dt);
                for (std::size_t path = 0; path < b.n_paths(); ++path)
                {
                    if (!b.path_active(path))
                        continue;
                    if (path > 0 && lifetime[(path - 1) / static_cast<std::size_t>(M)] <= dt)
                        continue;
                    for (int pol = 0; pol < n_pol; ++pol)
                        if (b.pol_active(pol))
                            h2 += factors[path][static_cast<std::size_t>(pol)] * b.term(path, tb, pol);
                }
            }
            const complex h2_full = lifetime.empty() ? h2 : synthesize(b, factors, tb);
            prod[r * L + l] = std::conj(h1) * h2;
            pow1[r * L + l] = std::norm(h1);
            pow2[r * L + l] = std::norm(h2_full);
        }
    });

    Estimate est;
    est.values.resize(L);
    est.std_errors.resize(L);
    const double n = static_cast<double>(R);
    for (std::size_t l = 0; l < L; ++l)
    {
        complex a = 0.0;
        double b = 0.0, c = 0.0;
        for (std::size_t r = 0; r < R; ++r)
        {
            a += prod[r * L + l];
            b += pow1[r * L + l];
            c += pow2[r * L + l];
        }
        a /= n;
        b /= n;
        c /= n;
        const double norm = std::sqrt(b * c);
        const complex rho = norm > 0.0 ? a / norm : complex(0.0);
        // Delta-method standard error of the ratio estimator, summed per unit.
        double var = 0.0;
        const std::size_t units = (R + unit_size - 1) / unit_size;
        if (norm > 0.0 && units > 1)
        {
            for (std::size_t u = 0; u < units; ++u)
            {
                complex psi = 0.0;
                for (std::size_t r = u * unit_size; r < std::min(R, (u + 1) * unit_size); ++r)
                    psi += (prod[r * L + l] - a) / norm -
                           0.5 * rho * ((pow1[r * L + l] - b) / b + (pow2[r * L + l] - c) / c);
                var += std::norm(psi);
            }
            var *= static_cast<double>(units) / (static_cast<double>(units - 1) * n * n);
        }
        est.values[l] = rho;
        est.std_errors[l] = std::sqrt(var);
    }
    return est;
}

std::vector<StcfLag> acf_lags(const std::vector<double> &dts)
{
    std::vector<StcfLag> lags;
    for (double dt : dts)
        lags.push_back({dt, Vec3{}, Vec3{}});
    return lags;
}

std::vector<StcfLag> ccf_lags(const std::vector<double> &spacings, const SpacingAxis &axis, double wavelength)
{
    const Vec3 u = axis.direction.normalized();
    std::vector<StcfLag> lags;
    for (double d : spacings)
    {
        const Vec3 dr = u * (d * wavelength);
        lags.push_back(axis.side == Side::tx ? StcfLag{0.0, dr, Vec3{}} : StcfLag{0.0, Vec3{}, dr});
    }
    return lags;
}

complex analytic_stcf(const CorrelationProblem &problem, double t, double dt, const Vec3 &dr_tx, const Vec3 &dr_rx)
{
    return CorrelationEngine(problem, t, {StcfLag{dt, dr_tx, dr_rx}}).analytic()[0];
}

complex analytic_acf(const CorrelationProblem &problem, double t, double dt)
{
    return analytic_stcf(problem, t, dt, Vec3{}, Vec3{});
}

complex analytic_ccf(const CorrelationProblem &problem, double t, const Vec3 &dr_tx, const Vec3 &dr_rx)
{
    return analytic_stcf(problem, t, 0.0, dr_tx, dr_rx);
}

namespace
{

CorrelationCurve make_curve(CurveKind kind, double t, const std::vector<double> &lags, std::vector<complex> values,
                            std::vector<double> errors = {})
{
    return {kind, lags, std::move(values), std::move(errors), t, true};
}

} // namespace

CorrelationCurve analytic_acf_curve(const CorrelationProblem &problem, double t, const std::vector<double> &dts,
                                    int workers)
{
    CorrelationEngine engine(problem, t, acf_lags(dts), workers);
    return make_curve(CurveKind::acf, t, dts, engine.analytic());
}

CorrelationCurve analytic_ccf_curve(const CorrelationProblem &problem, double t, const std::vector<double> &spacings,
                                    const SpacingAxis &axis, int workers)
{
    CorrelationEngine engine(problem, t, ccf_lags(spacings, axis, problem.model.carrier.wavelength()), workers);
    return make_curve(CurveKind::ccf, t, spacings, engine.analytic());
}

CorrelationCurve mc_acf(const CorrelationProblem &problem, double t, const std::vector<double> &dts,
                        int n_realizations, std::uint64_t seed, int workers)
{
    if (n_realizations < 2)
        throw std::invalid_argument("Monte Carlo estimate needs at least 2 realizations");
    CorrelationEngine engine(problem, t, acf_lags(dts), workers);
    auto est = engine.monte_carlo(n_realizations, seed, workers);
    return make_curve(CurveKind::acf, t, dts, std::move(est.values), std::move(est.std_errors));
}

CorrelationCurve mc_ccf(const CorrelationProblem &problem, double t, const std::vector<double> &spacings,
                        int n_realizations, std::uint64_t seed, const SpacingAxis &axis, int workers)
{
    if (n_realizations < 2)
        throw std::invalid_argument("Monte Carlo estimate needs at least 2 realizations");
    CorrelationEngine engine(problem, t, ccf_lags(spacings, axis, problem.model.carrier.wavelength()), workers);
    auto est = engine.monte_carlo(n_realizations, seed, workers);
    return make_curve(CurveKind::ccf, t, spacings, std::move(est.values), std::move(est.std_errors));
}

std::optional<double> coherence_time(const CorrelationCurve &curve, double threshold)
{
    if (curve.kind != CurveKind::acf)
        throw std::invalid_argument("coherence time needs an ACF curve");
    if (curve.lags.empty() || curve.lags.size() != curve.values.size())
        throw std::invalid_argument("malformed correlation curve");
    if (std::abs(std::abs(curve.values[0]) - 1.0) > 1e-6)
        throw std::invalid_argument("coherence time needs a normalized curve with |rho(0)| = 1");
    for (std::size_t i = 1; i < curve.values.size(); ++i)
    {
        const double a = std::abs(curve.values[i - 1]), b = std::abs(curve.values[i]);
        if (b < threshold)
        {
            const double x0 = curve.lags[i - 1], x1 = curve.lags[i];
            return x0 + (a - threshold) / (a - b) * (x1 - x0);
        }
    }
    return std::nullopt;
}

std::vector<double> lag_grid(double max, double step)
{
    if (!(step > 0.0) || !(max >= 0.0))
        throw std::invalid_argument("lag grid needs step > 0 and max >= 0");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor(max / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i)
        out.push_back(static_cast<double>(i) * step);
    return out;
}

std::string curve_csv(const CorrelationCurve &curve)
{
    std::string out = "lag,re,im,abs\n";
    char buf[128];
    for (std::size_t i = 0; i < curve.lags.size(); ++i)
    {
        const complex v = curve.values[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", curve.lags[i], v.real(), v.imag(), std::abs(v));
        out += buf;
    }
    return out;
}

void write_curve_csv(const CorrelationCurve &curve, const std::filesystem::path &path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw io_error("cannot open " + path.string() + " for writing");
    f << curve_csv(curve);
    if (!f)
        throw io_error("write failed: " + path.string());
}

CorrelationCurve parse_curve_csv(const std::string &text, CurveKind kind)
{
    CorrelationCurve curve;
    curve.kind = kind;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::string where = "line " + std::to_string(line_no);
        if (!header)
        {
            if (line != "lag,re,im,abs")
                throw parse_error(where, "expected header 'lag,re,im,abs'");
            header = true;
            continue;
        }
        if (line.empty())
            continue;
        std::vector<double> fields;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ','))
        {
            std::size_t used = 0;
            double v = 0.0;
            try
            {
                v = std::stod(cell, &used);
            }
            catch (const std::exception &)
            {
                throw parse_error(where, "not a number: '" + cell + "'");
            }
            if (used != cell.size() || !std::isfinite(v))
                throw parse_error(where, "not a finite number: '" + cell + "'");
            fields.push_back(v);
        }
        if (fields.size() != 4)
            throw parse_error(where, "expected 4 columns, got " + std::to_string(fields.size()));
        if (!curve.lags.empty() && !(fields[0] > curve.lags.back()))
            throw parse_error(where, "lag column must be strictly increasing");
        curve.lags.push_back(fields[0]);
        curve.values.emplace_back(fields[1], fields[2]);
    }
    if (!header)
        throw parse_error("line 1", "empty curve file");
    if (curve.lags.empty())
        throw parse_error("line " + std::to_string(line_no), "curve has no data rows");
    curve.normalized = std::abs(std::abs(curve.values.front()) - 1.0) < 1e-9;
    return curve;
}

CorrelationCurve ingest_reference_curve(const std::filesystem::path &path, CurveKind kind)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw io_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    try
    {
        return parse_curve_csv(ss.str(), kind);
    }
    catch (const parse_error &e)
    {
        throw parse_error(path.string() + ":" + e.where(), e.message());
    }
}

complex interpolate(const CorrelationCurve &curve, double lag)
{
    const auto &x = curve.lags;
    if (x.empty() || lag < x.front() || lag > x.back())
        throw std::out_of_range("lag outside the curve");
    auto it = std::lower_bound(x.begin(), x.end(), lag);
    const auto i = static_cast<std::size_t>(it - x.begin());
    if (x[i] == lag)
        return curve.values[i];
    const double w = (lag - x[i - 1]) / (x[i] - x[i - 1]);
    return curve.values[i - 1] + w * (curve.values[i] - curve.values[i - 1]);
}

CurveComparison compare_curves(const CorrelationCurve &a, const CorrelationCurve &b)
{
    if (a.lags.empty() || b.lags.empty())
        throw std::invalid_argument("cannot compare empty curves");
    const double lo = std::max(a.lags.front(), b.lags.front());
    const double hi = std::min(a.lags.back(), b.lags.back());
    if (lo > hi)
        throw std::invalid_argument("curves do not overlap");
    auto inside = [&](const CorrelationCurve &c) {
        return std::count_if(c.lags.begin(), c.lags.end(), [&](double x) { return x >= lo && x <= hi; });
    };
    const bool a_coarse = inside(a) <= inside(b);
    const CorrelationCurve &coarse = a_coarse ? a : b;
    const CorrelationCurve &fine = a_coarse ? b : a;

    CurveComparison out;
    for (std::size_t i = 0; i < coarse.lags.size(); ++i)
    {
        const double x = coarse.lags[i];
        if (x < lo || x > hi)
            continue;
        const complex va = a_coarse ? coarse.values[i] : interpolate(fine, x);
        const complex vb = a_coarse ? interpolate(fine, x) : coarse.values[i];
        out.lags.push_back(x);
        out.difference.push_back(va - vb);
        out.max_abs_difference = std::max(out.max_abs_difference, std::abs(va - vb));
        out.max_magnitude_difference = std::max(out.max_magnitude_difference, std::abs(std::abs(va) - std::abs(vb)));
    }
    return out;
}

} // namespace u2v
