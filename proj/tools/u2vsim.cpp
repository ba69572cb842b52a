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

#include "u2v/errors.hpp"
#include "u2v/run.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>

namespace
{

enum exit_code
{
    ok = 0,
    config_error = 2,
    io_failure = 3,
    check_failure = 4,
};

struct SimulateArgs
{
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    int workers = 1;
    std::optional<std::string> format;
    bool acf = false, ccf = false, cir = false, summary = false;
    std::vector<double> anchors;
    std::optional<std::string> compare;
    std::optional<int> realizations;
};

u2v::ScenarioConfig load(const std::string &scenario)
{
    const auto &presets = u2v::preset_names();
    if (!std::filesystem::exists(scenario) && std::find(presets.begin(), presets.end(), scenario) != presets.end())
        return u2v::preset_defaults(scenario);
    return u2v::parse_scenario(scenario);
}

int simulate(const SimulateArgs &a)
{
    u2v::ScenarioConfig c = load(a.scenario);
    if (a.seed)
        c.seed = *a.seed;
    if (a.format)
        c.output.format = *a.format == "bin" ? u2v::CirFormat::bin : u2v::CirFormat::csv;
    if (a.acf || a.ccf || a.cir || a.summary)
        c.output = {a.cir, a.acf, a.ccf, true, c.output.format};
    if (!a.anchors.empty())
        c.correlation.anchors = a.anchors;
    if (a.realizations)
        c.correlation.realizations = *a.realizations;

    u2v::RunOptions opt;
    opt.out_dir = a.out_dir;
    opt.workers = a.workers;
    if (a.compare)
        opt.compare = *a.compare;
    const u2v::RunReport report = u2v::run(c, opt);
    for (const auto &f : report.files)
        std::cout << "wrote " << f.string() << "\n";
    if (report.comparison)
        std::printf("comparison: %zu points, max |difference| %.6g, max magnitude difference %.6g\n",
                    report.comparison->lags.size(), report.comparison->max_abs_difference,
                    report.comparison->max_magnitude_difference);
    return ok;
}

int reproduce(const std::string &figure, const SimulateArgs &a)
{
    u2v::RunOptions opt;
    opt.out_dir = a.out_dir;
    opt.workers = a.workers;
    const u2v::FigureReport fr = u2v::reproduce_figure(figure, opt, a.seed, a.realizations);
    for (const auto &v : fr.verdicts)
        std::printf("%s %s: %s\n", v.passed ? "PASS" : "FAIL", v.name.c_str(), v.detail.c_str());
    std::printf("%s %s\n", figure.c_str(), fr.passed() ? "passed" : "FAILED");
    return fr.passed() ? ok : check_failure;
}

int compare(const std::string &model, const std::string &reference, const std::string &kind,
            const std::optional<std::string> &out)
{
    const auto k = kind == "ccf" ? u2v::CurveKind::ccf : u2v::CurveKind::acf;
    const auto a = u2v::ingest_reference_curve(model, k);
    const auto b = u2v::ingest_reference_curve(reference, k);
    const auto cmp = u2v::compare_curves(a, b);
    std::printf("points %zu\nmax_abs_difference %.17g\nmax_magnitude_difference %.17g\n", cmp.lags.size(),
                cmp.max_abs_difference, cmp.max_magnitude_difference);
    if (out)
        u2v::write_curve_csv({k, cmp.lags, cmp.difference, {}, 0.0, false}, *out);
    return ok;
}

int validate_config(const std::string &path, bool print)
{
    const u2v::ScenarioConfig c = u2v::parse_scenario(path);
    if (print)
        std::cout << u2v::serialize(c);
    else
        std::cout << "ok " << u2v::config_hash(c) << "\n";
    return ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"u2vsim: UAV-to-vehicle MIMO channel simulator"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto common = [&](CLI::App *cmd) {
        cmd->add_option("--seed", sim.seed, "Override the scenario seed");
        cmd->add_option("--out-dir", sim.out_dir, "Output directory")->capture_default_str();
        cmd->add_option("--workers", sim.workers, "Monte Carlo worker threads")
            ->check(CLI::Range(1, 256))
            ->capture_default_str();
        cmd->add_option("--realizations", sim.realizations, "Monte Carlo realizations (0 skips Monte Carlo)")
            ->check(CLI::NonNegativeNumber);
    };

    auto *simulate_cmd = app.add_subcommand("simulate", "Run a scenario file or mobility preset");
    simulate_cmd->alias("run");
    simulate_cmd->add_option("scenario", sim.scenario, "Scenario TOML file or preset name")->required();
    common(simulate_cmd);
    simulate_cmd->add_option("--format", sim.format, "CIR dump format")->check(CLI::IsMember({"csv", "bin"}));
    simulate_cmd->add_flag("--acf", sim.acf, "Write ACF curves");
    simulate_cmd->add_flag("--ccf", sim.ccf, "Write CCF curves");
    simulate_cmd->add_flag("--cir", sim.cir, "Write a CIR time series");
    simulate_cmd->add_flag("--summary", sim.summary, "Write summary.json only (plus other selected outputs)");
    simulate_cmd->add_option("--anchor-times", sim.anchors, "Anchor times, s")->delimiter(',');
    simulate_cmd->add_option("--compare", sim.compare, "Reference ACF curve to compare against");

    std::string figure;
    auto *reproduce_cmd = app.add_subcommand("reproduce", "Reproduce a posture-effect figure");
    reproduce_cmd->add_option("figure", figure, "fig3, fig4, fig5 or fig6")
        ->required()
        ->check(CLI::IsMember(u2v::figure_names()));
    common(reproduce_cmd);

    std::string model_curve, reference_curve, kind = "acf";
    std::optional<std::string> diff_out;
    auto *compare_cmd = app.add_subcommand("compare", "Compare two correlation curve CSV files");
    compare_cmd->add_option("model", model_curve)->required();
    compare_cmd->add_option("reference", reference_curve)->required();
    compare_cmd->add_option("--kind", kind)->check(CLI::IsMember({"acf", "ccf"}))->capture_default_str();
    compare_cmd->add_option("--out", diff_out, "Write the difference curve here");

    std::string config_path;
    bool print = false;
    auto *validate_cmd = app.add_subcommand("validate-config", "Parse and validate a scenario file");
    validate_cmd->add_option("config", config_path)->required();
    validate_cmd->add_flag("--print", print, "Print the fully defaulted configuration");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try
    {
        if (*simulate_cmd)
            return simulate(sim);
        if (*reproduce_cmd)
            return reproduce(figure, sim);
        if (*compare_cmd)
            return compare(model_curve, reference_curve, kind, diff_out);
        return validate_config(config_path, print);
    }
    catch (const u2v::io_error &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return io_failure;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return config_error;
    }
}
