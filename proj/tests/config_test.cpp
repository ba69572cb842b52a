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

#include <catch2/catch_amalgamated.hpp>

#include "u2v/config.hpp"
#include "u2v/errors.hpp"

#include <filesystem>
#include <fstream>

using namespace u2v;

namespace
{

std::string where_of(std::string_view text)
{
    try
    {
        parse_scenario_text(text);
    }
    catch (const parse_error &e)
    {
        return e.where();
    }
    return "<no error>";
}

constexpr std::string_view minimal = "seed = 3\npreset = \"paper-fig3\"\n";

} // namespace

TEST_CASE("minimal preset file takes the preset defaults")
{
    const ScenarioConfig c = parse_scenario_text(minimal);
    ScenarioConfig expected = preset_defaults("paper-fig3");
    expected.seed = 3;
    REQUIRE(c == expected);
    REQUIRE(c.f0 == 2.4e9);
    REQUIRE(c.clusters.n_paths == 20);
    REQUIRE(c.clusters.m_subpaths == 20);
    REQUIRE(c.correlation.posture_timing == PostureTiming::anchor);
    REQUIRE(parse_scenario_text("seed = 1\npreset = \"paper-fig7\"\n").f0 == 2.5e9);
    REQUIRE(parse_scenario_text("seed = 1\npreset = \"paper-fig8\"\n").f0 == 2.6e9);
}

TEST_CASE("overrides")
{
    const ScenarioConfig c = parse_scenario_text(R"(
seed = 12
preset = "straight-line"
[carrier]
f0 = 5.9e9
[clusters]
count = 4
subpaths = 6
[correlation]
anchors = [0.5]
realizations = 0
posture_timing = "instantaneous"
[output]
cir = true
format = "bin"
)");
    REQUIRE(c.seed == 12);
    REQUIRE(c.f0 == 5.9e9);
    REQUIRE(c.clusters.n_paths == 4);
    REQUIRE(c.clusters.m_subpaths == 6);
    REQUIRE(c.correlation.anchors == std::vector<double>{0.5});
    REQUIRE(c.correlation.realizations == 0);
    REQUIRE(c.correlation.posture_timing == PostureTiming::instantaneous);
    REQUIRE(c.output.cir);
    REQUIRE(c.output.format == CirFormat::bin);
}

TEST_CASE("errors name the offending field")
{
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\n[carrier]\nf0 = -1.0\n") == "carrier.f0");
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\n[carrier]\nfrequency = 2e9\n") == "carrier.frequency");
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\ncolour = 1\n") == "colour");
    REQUIRE(where_of("preset = \"paper-fig3\"\n") == "seed");
    REQUIRE(where_of("seed = -4\npreset = \"paper-fig3\"\n") == "seed");
    REQUIRE(where_of("seed = 1\npreset = \"nowhere\"\n") == "preset");
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\n[clusters]\ncount = 0\n") == "clusters.count");
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\n[simulation]\ncomponent = \"some\"\n") ==
            "simulation.component");
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\n[correlation]\nrealizations = 1\n") ==
            "correlation.realizations");
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\n[correlation]\nanchors = [3.0]\n") ==
            "correlation.anchors[0]");
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\n[arrays.tx]\nelements = [[0.0, 0.0]]\n") ==
            "arrays.tx.elements[0]");
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\n[correlation]\ntx_element = 3\n") ==
            "correlation.tx_element");
    REQUIRE(where_of("seed = 1\n[simulation]\nduration = 1.0\n") == "mobility.tx");
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\n\n[carrier\nf0 = 1\n") == "line 4");
    REQUIRE(where_of("seed = 1\npreset = \"paper-fig3\"\n[carrier]\nf0 = \"fast\"\n") == "carrier.f0");
}

TEST_CASE("explicit mobility tables")
{
    const ScenarioConfig c = parse_scenario_text(R"(
seed = 5
[simulation]
duration = 1.0
[correlation]
anchors = [0.0, 0.5]
[mobility.tx]
position = [0.0, 0.0, 120.0]
speed = 30.0
azimuth = [[0.0, 0.0], [0.5, 1.0]]
pitch = [[0.0, 0.0], [0.2, 1.5707]]
[mobility.rx]
position = [80.0, 10.0, 0.0]
speed = 15.0
azimuth = 1.5707963267948966
)");
    REQUIRE(c.preset.empty());
    REQUIRE(c.tx_mobility.has_value());
    const TerminalPair tp = build_terminals(c);
    REQUIRE(tp.tx.duration() == 1.0);
    REQUIRE(tp.tx.position(0.0) == Vec3{0.0, 0.0, 120.0});
    REQUIRE(tp.tx.heading(0.25).azimuth() == Catch::Approx(0.5));
    REQUIRE(tp.tx.posture(0.2).pitch() == Catch::Approx(1.5707));
    REQUIRE(tp.rx.velocity(0.3).y() == Catch::Approx(15.0));

    REQUIRE(where_of("seed = 5\npreset = \"static\"\n[mobility.tx]\nposition = [0.0, 0.0, 1.0]\n") == "mobility");
    REQUIRE(where_of("seed = 5\n[mobility.tx]\nspeed = 1.0\n[mobility.rx]\nposition = [1.0, 0.0, 0.0]\n") ==
            "mobility.tx.position");
    REQUIRE(where_of("seed = 5\n[mobility.tx]\nposition = [0.0, 0.0, 1.0]\nelevation = 1.6\n"
                     "[mobility.rx]\nposition = [1.0, 0.0, 0.0]\n") == "mobility.tx.elevation");
}

TEST_CASE("serialization round trip and hash")
{
    ScenarioConfig c = parse_scenario_text(minimal);
    c.tx_array.elements = {Vec3{}, Vec3{0.0, 0.0625, 0.0}};
    c.clusters.xpr = 1.0 / 3.0;
    c.correlation.anchors = {0.1, 0.7};
    c.output.ccf = true;
    const ScenarioConfig back = parse_scenario_text(serialize(c));
    REQUIRE(back == c);
    REQUIRE(serialize(back) == serialize(c));
    REQUIRE(config_hash(back) == config_hash(c));
    REQUIRE(config_hash(c).size() == 16);

    ScenarioConfig other = c;
    other.seed = 4;
    REQUIRE(config_hash(other) != config_hash(c));

    ScenarioConfig explicit_mob = parse_scenario_text(
        "seed = 2\n[mobility.tx]\nposition = [0.0, 0.0, 50.0]\nspeed = [[0.0, 10.0], [1.0, 20.0]]\n"
        "[mobility.rx]\nposition = [30.0, 0.0, 0.0]\n");
    REQUIRE(parse_scenario_text(serialize(explicit_mob)) == explicit_mob);
}

TEST_CASE("file loading")
{
    const auto dir = std::filesystem::temp_directory_path() / "u2v_config_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "s.toml";
    std::ofstream(path) << minimal;
    REQUIRE(parse_scenario(path).seed == 3);
    REQUIRE_THROWS_AS(parse_scenario(dir / "missing.toml"), io_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("model construction from a config")
{
    ScenarioConfig c = parse_scenario_text(minimal);
    c.posture = false;
    c.component = Component::nlos;
    const ChannelModel m = build_model(c);
    REQUIRE_FALSE(m.options.posture_enabled);
    REQUIRE(m.options.component == Component::nlos);
    REQUIRE(m.tx_array.pattern.kind == PatternKind::three_gpp);
    REQUIRE(m.carrier.f0() == 2.4e9);
    const SceneParams sp = build_scene_params(c);
    REQUIRE(sp.clusters.n_paths == 20);
    REQUIRE(sp.jitter == c.jitter);
    REQUIRE(to_string(Component::los) == "los");
}
