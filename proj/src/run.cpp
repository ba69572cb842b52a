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

#include "u2v/run.hpp"
#include "u2v/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace u2v
{

namespace fs = std::filesystem;

namespace
{

constexpr std::uint64_t mc_stream = 0x6d63;
constexpr std::uint64_t cir_stream = 0xc1;

void write_file(const fs::path &path, const std::string &bytes)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw io_error("cannot write " + path.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f)
        throw io_error("write failed: " + path.string());
}

nlohmann::ordered_json optional_number(std::optional<double> v)
{
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

double max_abs_difference(const std::vector<complex> &a, const std::vector<complex> &b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_magnitude_difference(const std::vector<complex> &a, const std::vector<complex> &b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        m = std::max(m, std::abs(std::abs(a[i]) - std::abs(b[i])));
    return m;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string brief(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string cir_csv(const ChannelRealization &r)
{
    std::string out = "time,tap,delay,q,p,re,im\n";
    for (const CirSnapshot &s : r.snapshots)
        for (std::size_t tap = 0; tap < s.taps.size(); ++tap)
            for (int q = 0; q < s.q; ++q)
                for (int p = 0; p < s.p; ++p)
                {
                    const complex h = s.taps[tap].coefficients[static_cast<std::size_t>(q * s.p + p)];
                    out += fmt(s.time) + "," + std::to_string(tap) + "," + fmt(s.taps[tap].delay) + "," +
                           std::to_string(q) + "," + std::to_string(p) + "," + fmt(h.real()) + "," + fmt(h.imag()) +
                           "\n";
                }
    return out;
}

// Same columns as the CSV, each a little-endian IEEE double.
std::string cir_bin(const ChannelRealization &r)
{
    std::string out;
    auto put = [&](double v) {
        unsigned char b[8];
        std::uint64_t u;
        std::memcpy(&u, &v, 8);
        for (int i = 0; i < 8; ++i)
            b[i] = static_cast<unsigned char>(u >> (8 * i));
        out.append(reinterpret_cast<const char *>(b), 8);
    };
    for (const CirSnapshot &s : r.snapshots)
        for (std::size_t tap = 0; tap < s.taps.size(); ++tap)
            for (int q = 0; q < s.q; ++q)
                for (int p = 0; p < s.p; ++p)
                {
                    const complex h = s.taps[tap].coefficients[static_cast<std::size_t>(q * s.p + p)];
                    put(s.time);
                    put(static_cast<double>(tap));
                    put(s.taps[tap].delay);
                    put(q);
                    put(p);
                    put(h.real());
                    put(h.imag());
                }
    return out;
}

std::vector<double> time_grid(double duration, double step)
{
    const auto n = static_cast<std::size_t>(std::floor(duration / step + 1e-9));
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        t[i] = std::min(duration, static_cast<double>(i) * step);
    return t;
}

} // namespace

std::string anchor_label(double t)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    std::string s = buf;
    while (!s.empty() && s.back() == '0')
        s.pop_back();
    if (!s.empty() && s.back() == '.')
        s.pop_back();
    return s;
}

RunReport run(const ScenarioConfig &c, const RunOptions &options)
{
    validate(c);
    const CorrelationConfig &k = c.correlation;
    for (double a : k.anchors)
        if (a + k.max_lag > c.duration + 1e-9)
            throw std::invalid_argument("anchor " + anchor_label(a) + " s plus correlation.max_lag exceeds simulation.duration");

    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec || !fs::is_directory(options.out_dir))
        throw io_error("cannot create output directory " + options.out_dir.string());

    std::optional<CorrelationCurve> measured;
    if (options.compare)
        measured = ingest_reference_curve(*options.compare, CurveKind::acf);

    RunReport report;
    auto emit = [&](const std::string &name, const std::string &bytes) {
        const fs::path path = options.out_dir / name;
        write_file(path, bytes);
        report.files.push_back(path);
    };

    const ChannelModel model = build_model(c);
    CorrelationProblem reference = make_problem(model, build_scene_params(c), c.seed, k.scenes);
    reference.model.options.posture_enabled = false;
    reference.tx_element = k.tx_element;
    reference.rx_element = k.rx_element;
    reference.posture_timing = k.posture_timing;
    reference.antithetic = k.antithetic;
    CorrelationProblem posture = reference;
    posture.model.options.posture_enabled = true;

    struct Variant
    {
        const char *name;
        const CorrelationProblem *problem;
    };
    std::vector<Variant> variants;
    if (c.posture)
        variants.push_back({"posture", &posture});
    variants.push_back({"reference", &reference});

    const std::uint64_t mc_seed = make_rng(c.seed, {mc_stream})();
    const int n_mc = k.realizations;
    const bool want_acf = c.output.acf || options.compare.has_value();
    const std::vector<double> dts = lag_grid(k.max_lag, k.lag_step);
    const std::vector<double> spacings = lag_grid(k.max_spacing, k.spacing_step);

    // Reference engines are built first so the posture variant reuses their Doppler integrals.
    std::optional<CorrelationEngine> acf_ref, ccf_ref;
    if (want_acf)
        acf_ref.emplace(reference, k.anchors, acf_lags(dts), options.workers);
    if (c.output.ccf)
        ccf_ref.emplace(reference, k.anchors,
                        ccf_lags(spacings, k.spacing, reference.model.carrier.wavelength()), options.workers);

    for (const Variant &v : variants)
    {
        const bool is_ref = v.problem == &reference;
        std::optional<CorrelationEngine> acf_own, ccf_own;
        const CorrelationEngine *acf = nullptr, *ccf = nullptr;
        if (acf_ref)
        {
            if (!is_ref)
                acf_own.emplace(*v.problem, k.anchors, acf_ref->lags(), options.workers, &*acf_ref);
            acf = is_ref ? &*acf_ref : &*acf_own;
        }
        if (ccf_ref)
        {
            if (!is_ref)
                ccf_own.emplace(*v.problem, k.anchors, ccf_ref->lags(), options.workers, &*ccf_ref);
            ccf = is_ref ? &*ccf_ref : &*ccf_own;
        }

        VariantResult result{v.name, !is_ref, {}};
        for (std::size_t a = 0; a < k.anchors.size(); ++a)
        {
            const double t = k.anchors[a];
            AnchorCurves curves{t, {}, {}, {}, {}};
            const std::string suffix = std::string(v.name) + "_t" + anchor_label(t);
            if (acf)
            {
                curves.acf = CorrelationCurve{CurveKind::acf, dts, acf->analytic(a), {}, t, true};
                if (n_mc > 0)
                {
                    auto est = acf->monte_carlo(n_mc, mc_seed, options.workers, a);
                    curves.acf_mc =
                        CorrelationCurve{CurveKind::acf, dts, std::move(est.values), std::move(est.std_errors), t, true};
                }
                if (c.output.acf)
                {
                    emit("acf_" + suffix + ".csv", curve_csv(*curves.acf));
                    if (curves.acf_mc)
                        emit("acf_" + suffix + "_mc.csv", curve_csv(*curves.acf_mc));
                }
            }
            if (ccf)
            {
                curves.ccf = CorrelationCurve{CurveKind::ccf, spacings, ccf->analytic(a), {}, t, true};
                if (n_mc > 0)
                {
                    auto est = ccf->monte_carlo(n_mc, mc_seed, options.workers, a);
                    curves.ccf_mc = CorrelationCurve{CurveKind::ccf, spacings, std::move(est.values),
                                                     std::move(est.std_errors), t, true};
                }
                emit("ccf_" + suffix + ".csv", curve_csv(*curves.ccf));
                if (curves.ccf_mc)
                    emit("ccf_" + suffix + "_mc.csv", curve_csv(*curves.ccf_mc));
            }
            result.anchors.push_back(std::move(curves));
        }
        report.variants.push_back(std::move(result));
    }

    if (measured)
    {
        const CorrelationCurve &model_curve = *report.variants.front().anchors.front().acf;
        report.comparison = compare_curves(model_curve, *measured);
        CorrelationCurve diff{CurveKind::acf, report.comparison->lags, report.comparison->difference, {},
                              model_curve.anchor_time, false};
        emit("compare_acf.csv", curve_csv(diff));
    }

    if (c.output.cir)
    {
        const Scene &scene = reference.scenes.front();
        Rng phase_rng = make_rng(c.seed, {cir_stream, 0});
        Rng bd_rng = make_rng(c.seed, {cir_stream, 1});
        const ClusterSet phases = redraw_phases(scene.clusters, phase_rng);
        const ChannelRealization r = synthesize_realization(model, scene, phases, time_grid(c.duration, c.step), bd_rng);
        if (c.output.format == CirFormat::csv)
            emit("cir.csv", cir_csv(r));
        else
            emit("cir.bin", cir_bin(r));
    }

    // Summary.
    using json = nlohmann::ordered_json;
    json s;
    s["schema"] = config_schema_version;
    s["seed"] = c.seed;
    s["config_hash"] = config_hash(c);
    s["preset"] = c.preset;
    s["component"] = to_string(c.component);
    s["scenes"] = k.scenes;
    s["realizations"] = n_mc;
    json vars = json::array();
    for (const VariantResult &v : report.variants)
    {
        json jv;
        jv["name"] = v.name;
        jv["posture"] = v.posture;
        json anchors = json::array();
        for (const AnchorCurves &a : v.anchors)
        {
            json ja;
            ja["t"] = a.anchor;
            if (a.acf)
                ja["coherence_time"] = optional_number(coherence_time(*a.acf));
            if (a.acf && a.acf_mc)
            {
                ja["coherence_time_mc"] = optional_number(coherence_time(*a.acf_mc));
                ja["acf_mc_max_deviation"] = max_abs_difference(a.acf->values, a.acf_mc->values);
            }
            if (a.ccf && a.ccf_mc)
                ja["ccf_mc_max_deviation"] = max_abs_difference(a.ccf->values, a.ccf_mc->values);
            anchors.push_back(std::move(ja));
        }
        jv["anchors"] = std::move(anchors);
        vars.push_back(std::move(jv));
    }
    s["variants"] = std::move(vars);
    if (report.variants.size() == 2)
    {
        json diffs = json::array();
        for (std::size_t a = 0; a < k.anchors.size(); ++a)
        {
            const AnchorCurves &on = report.variants[0].anchors[a], &off = report.variants[1].anchors[a];
            json jd;
            jd["t"] = on.anchor;
            if (on.acf)
                jd["acf_max_difference"] = max_abs_difference(on.acf->values, off.acf->values);
            if (on.ccf)
            {
                jd["ccf_max_difference"] = max_abs_difference(on.ccf->values, off.ccf->values);
                jd["ccf_max_magnitude_difference"] = max_magnitude_difference(on.ccf->values, off.ccf->values);
            }
            diffs.push_back(std::move(jd));
        }
        s["posture_vs_reference"] = std::move(diffs);
    }
    if (report.comparison)
    {
        json jc;
        jc["reference"] = options.compare->filename().string();
        jc["anchor"] = k.anchors.front();
        jc["points"] = report.comparison->lags.size();
        jc["max_abs_difference"] = report.comparison->max_abs_difference;
        jc["max_magnitude_difference"] = report.comparison->max_magnitude_difference;
        s["comparison"] = std::move(jc);
    }
    json files = json::array();
    for (const auto &f : report.files)
        files.push_back(f.filename().string());
    s["files"] = std::move(files);
    report.summary = std::move(s);
    if (c.output.summary)
    {
        emit("summary.json", report.summary.dump(2) + "\n");
    }
    return report;
}

bool FigureReport::passed() const
{
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict &v) { return v.passed; });
}

const std::vector<std::string> &figure_names()
{
    static const std::vector<std::string> names{"fig3", "fig4", "fig5", "fig6"};
    return names;
}

ScenarioConfig figure_config(std::string_view figure, std::uint64_t seed)
{
    if (std::find(figure_names().begin(), figure_names().end(), figure) == figure_names().end())
        throw not_found_error("unknown figure '" + std::string(figure) + "' (expected fig3, fig4, fig5 or fig6)");
    ScenarioConfig c = preset_defaults("paper-fig3");
    c.seed = seed;
    c.posture = true;
    // Coherence-time gaps of a few percent need more scene draws than the default.
    c.correlation.scenes = 200;
    const bool los = figure == "fig3" || figure == "fig5";
    const bool ccf = figure == "fig5" || figure == "fig6";
    c.output.acf = !ccf;
    c.output.ccf = ccf;
    // Element spacing on the vehicle array, along its direction of travel.
    c.correlation.spacing = {Side::rx, Vec3{1.0, 0.0, 0.0}};
    c.tx_array.pattern = PatternKind::three_gpp;
    if (los)
    {
        c.component = Component::los;
        c.tx_array.boresight = SphericalAngles(1.5 * pi, -pi / 4.0);
        c.jitter = {0.3, 0.3};
    }
    else
    {
        // The NLoS figures follow a single scattering cluster.
        c.component = Component::nlos;
        c.clusters.n_paths = 1;
        c.tx_array.boresight = SphericalAngles(1.5 * pi, pi / 4.0);
        c.jitter = {0.6, 0.6};
    }
    return c;
}

FigureReport reproduce_figure(std::string_view figure, const RunOptions &options, std::optional<std::uint64_t> seed,
                              std::optional<int> realizations)
{
    ScenarioConfig c = figure_config(figure, seed.value_or(default_figure_seed));
    if (realizations)
        c.correlation.realizations = *realizations;

    FigureReport fr;
    fr.figure = std::string(figure);
    fr.run = run(c, options);
    const VariantResult &on = fr.run.variants.at(0), &off = fr.run.variants.at(1);

    auto find_anchor = [&](const VariantResult &v, double t) -> const AnchorCurves & {
        for (const AnchorCurves &a : v.anchors)
            if (a.anchor == t)
                return a;
        throw std::logic_error("missing anchor");
    };
    auto label = [](double t) { return "t" + anchor_label(t); };

    if (c.output.acf)
    {
        const double d0 = max_abs_difference(find_anchor(on, 0.0).acf->values, find_anchor(off, 0.0).acf->values);
        fr.verdicts.push_back({"acf_identical_t0", d0 <= 1e-9, "max |difference| " + brief(d0)});
        const bool los = c.component == Component::los;
        for (double t : {1.0, 2.0})
        {
            const auto tc_on = coherence_time(*find_anchor(on, t).acf);
            const auto tc_off = coherence_time(*find_anchor(off, t).acf);
            const bool ok = tc_on && tc_off && (los ? *tc_on < *tc_off : *tc_on > *tc_off);
            auto ms = [](std::optional<double> v) { return v ? brief(*v * 1e3) + " ms" : std::string("none"); };
            fr.verdicts.push_back({std::string(los ? "los" : "nlos") + "_coherence_" + (los ? "decreases_" : "increases_") + label(t),
                                   ok, "posture " + ms(tc_on) + ", reference " + ms(tc_off)});
        }
    }
    if (c.output.ccf)
    {
        // Compared in magnitude: max over anchors and spacings of ||rho_on| - |rho_off||.
        double worst = 0.0;
        for (std::size_t a = 0; a < on.anchors.size(); ++a)
            worst = std::max(worst, max_magnitude_difference(on.anchors[a].ccf->values, off.anchors[a].ccf->values));
        fr.verdicts.push_back({"ccf_difference_small", worst <= 0.1, "max magnitude difference " + brief(worst)});
    }

    nlohmann::ordered_json jv = nlohmann::ordered_json::array();
    for (const Verdict &v : fr.verdicts)
        jv.push_back({{"check", v.name}, {"passed", v.passed}, {"detail", v.detail}});
    fr.run.summary["figure"] = fr.figure;
    fr.run.summary["verdicts"] = std::move(jv);
    fr.run.summary["passed"] = fr.passed();
    if (c.output.summary)
        write_file(options.out_dir / "summary.json", fr.run.summary.dump(2) + "\n");
    return fr;
}

} // namespace u2v
