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
#include "u2v/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace u2v
{

inline constexpr int config_schema_version = 1;

struct ArrayConfig
{
    std::vector<Vec3> elements{Vec3{}};
    PatternKind pattern = PatternKind::isotropic_v;
    SphericalAngles boresight; // three_gpp only; array-frame azimuth/elevation, rad

    AntennaArray build() const;
    bool operator==(const ArrayConfig &) const = default;
};

struct CorrelationConfig
{
    int scenes = 50;
    int realizations = 1000;
    std::vector<double> anchors{0.0, 1.0, 2.0}; // s
    double max_lag = 0.1;                       // s
    double lag_step = 1e-3;                     // s
    double max_spacing = 2.0;                   // wavelengths
    double spacing_step = 0.05;                 // wavelengths
    SpacingAxis spacing;
    int tx_element = 0;
    int rx_element = 0;
    PostureTiming posture_timing = PostureTiming::anchor;
    bool antithetic = true;

    bool operator==(const CorrelationConfig &) const = default;
};

enum class CirFormat
{
    csv,
    bin
};

struct OutputConfig
{
    bool cir = false;
    bool acf = true;
    bool ccf = false;
    bool summary = true;
    CirFormat format = CirFormat::csv;
    bool operator==(const OutputConfig &) const = default;
};

struct ScenarioConfig
{
    int schema = config_schema_version;
    std::uint64_t seed = 1;
    // Mobility preset; empty means explicit [mobility.tx] / [mobility.rx] tables.
    std::string preset;
    std::optional<MobilitySpec> tx_mobility;
    std::optional<MobilitySpec> rx_mobility;

    double f0 = 2.4e9;
    double c0 = speed_of_light;
    ArrayConfig tx_array;
    ArrayConfig rx_array;

    ClusterParams clusters;
    double death_rate = 0.0;
    double birth_rate = 0.0;
    KFactorParams k_factor;
    GeometryJitter jitter;

    double duration = 2.5; // s
    double step = 1e-3;    // s
    int doppler_substeps = 16;
    Component component = Component::full;
    bool posture = true;

    CorrelationConfig correlation;
    OutputConfig output;

    bool operator==(const ScenarioConfig &) const = default;
};

// Defaults for a mobility preset (carrier, arrays and spreads tuned per preset).
ScenarioConfig preset_defaults(std::string_view preset);

// Strict parse: unknown keys, missing required fields and range violations throw
// parse_error naming the field path (or the line for TOML syntax errors).
ScenarioConfig parse_scenario_text(std::string_view text, std::string_view source = "<string>");
ScenarioConfig parse_scenario(const std::filesystem::path &path);

// Full config as TOML; parse_scenario_text(serialize(c)) == c.
std::string serialize(const ScenarioConfig &config);

// Throws parse_error with the offending field path.
void validate(const ScenarioConfig &config);

// FNV-1a 64 of the serialized config, hex.
std::string config_hash(const ScenarioConfig &config);

TerminalPair build_terminals(const ScenarioConfig &config);
ChannelModel build_model(const ScenarioConfig &config);
SceneParams build_scene_params(const ScenarioConfig &config);

std::string to_string(Component component);
std::string to_string(PatternKind kind);

} // namespace u2v
