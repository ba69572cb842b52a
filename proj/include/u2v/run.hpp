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

#include "u2v/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace u2v
{

struct RunOptions
{
    std::filesystem::path out_dir = ".";
    int workers = 1;
    // Reference ACF curve (lag,re,im,abs) compared against the analytic ACF at the first anchor.
    std::optional<std::filesystem::path> compare;
};

// Curves of one model variant at one anchor time.
struct AnchorCurves
{
    double anchor = 0.0;
    std::optional<CorrelationCurve> acf, acf_mc, ccf, ccf_mc;
};

struct VariantResult
{
    std::string name; // "posture" or "reference"
    bool posture = false;
    std::vector<AnchorCurves> anchors;
};

struct RunReport
{
    std::vector<VariantResult> variants;
    std::optional<CurveComparison> comparison;
    nlohmann::ordered_json summary;
    std::vector<std::filesystem::path> files; // in write order
};

// Runs the configured outputs. With posture enabled the reference model (posture
// removed) is evaluated alongside on the same scenes. Output files depend only on
// (config, compare file); the worker count changes nothing but speed.
RunReport run(const ScenarioConfig &config, const RunOptions &options);

// Fixed-point text for file names: 1 -> "1", 0.25 -> "0.25".
std::string anchor_label(double t);

struct Verdict
{
    std::string name;
    bool passed = false;
    std::string detail;
};

struct FigureReport
{
    std::string figure;
    RunReport run;
    std::vector<Verdict> verdicts;
    bool passed() const;
};

inline constexpr std::uint64_t default_figure_seed = 1;

const std::vector<std::string> &figure_names();

// The scenario behind a paper figure (fig3..fig6).
ScenarioConfig figure_config(std::string_view figure, std::uint64_t seed = default_figure_seed);

// Runs the posture-on/off pair and evaluates the figure's direction-of-change checks;
// verdicts are added to the summary (and summary.json when enabled).
FigureReport reproduce_figure(std::string_view figure, const RunOptions &options,
                              std::optional<std::uint64_t> seed = std::nullopt,
                              std::optional<int> realizations = std::nullopt);

} // namespace u2v
