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

#include "u2v/config.hpp"
#include "u2v/errors.hpp"

#include <toml.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace u2v
{

std::string to_string(Component component)
{
    switch (component)
    {
    case Component::full:
        return "full";
    case Component::los:
        return "los";
    case Component::nlos:
        return "nlos";
    }
    return "?";
}

std::string to_string(PatternKind kind)
{
    switch (kind)
    {
    case PatternKind::isotropic_v:
        return "isotropic-v";
    case PatternKind::isotropic_h:
        return "isotropic-h";
    case PatternKind::three_gpp:
        return "3gpp";
    }
    return "?";
}

AntennaArray ArrayConfig::build() const
{
    FieldPattern p{pattern, RotationMatrix3{}};
    if (pattern == PatternKind::three_gpp)
        p.mounting = FieldPattern::mounting_towards(boresight);
    return AntennaArray(elements, p);
}

namespace
{

std::string join(const std::string &path, std::string_view key)
{
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

double as_number(const toml::node &node, const std::string &path)
{
    if (auto i = node.as_integer())
        return static_cast<double>(i->get());
    if (auto f = node.as_floating_point())
    {
        if (!std::isfinite(f->get()))
            throw parse_error(path, "must be finite");
        return f->get();
    }
    throw parse_error(path, "expected a number");
}

std::int64_t as_integer(const toml::node &node, const std::string &path)
{
    if (auto i = node.as_integer())
        return i->get();
    throw parse_error(path, "expected an integer");
}

const toml::array &as_array(const toml::node &node, const std::string &path)
{
    if (auto a = node.as_array())
        return *a;
    throw parse_error(path, "expected an array");
}

std::vector<double> as_numbers(const toml::node &node, const std::string &path, std::size_t expected = 0)
{
    const toml::array &a = as_array(node, path);
    if (expected && a.size() != expected)
        throw parse_error(path, "expected " + std::to_string(expected) + " numbers, got " + std::to_string(a.size()));
    std::vector<double> out;
    for (std::size_t i = 0; i < a.size(); ++i)
        out.push_back(as_number(*a.get(i), path + "[" + std::to_string(i) + "]"));
    return out;
}

Vec3 as_vec3(const toml::node &node, const std::string &path)
{
    const auto v = as_numbers(node, path, 3);
    return {v[0], v[1], v[2]};
}

// A schedule is a constant or a list of [time, value] knots.
PiecewiseLinear as_schedule(const toml::node &node, const std::string &path)
{
    if (node.is_number())
        return PiecewiseLinear(as_number(node, path));
    const toml::array &a = as_array(node, path);
    std::vector<Knot> knots;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        const auto kv = as_numbers(*a.get(i), path + "[" + std::to_string(i) + "]", 2);
        knots.push_back({kv[0], kv[1]});
    }
    try
    {
        return PiecewiseLinear(std::move(knots));
    }
    catch (const std::invalid_argument &e)
    {
        throw parse_error(path, e.what());
    }
}

// Tracks which keys of a table were consumed so leftovers can be rejected.
class Reader
{
public:
    Reader(const toml::table &table, std::string path) : table_(table), path_(std::move(path)) {}

    const toml::node *node(std::string_view key)
    {
        used_.insert(std::string(key));
        return table_.get(key);
    }
    std::string path(std::string_view key) const { return join(path_, key); }

    bool number(std::string_view key, double &out)
    {
        if (auto n = node(key))
        {
            out = as_number(*n, path(key));
            return true;
        }
        return false;
    }
    bool integer(std::string_view key, int &out)
    {
        if (auto n = node(key))
        {
            const auto v = as_integer(*n, path(key));
            if (v < INT32_MIN || v > INT32_MAX)
                throw parse_error(path(key), "integer out of range");
            out = static_cast<int>(v);
            return true;
        }
        return false;
    }
    bool boolean(std::string_view key, bool &out)
    {
        if (auto n = node(key))
        {
            auto b = n->as_boolean();
            if (!b)
                throw parse_error(path(key), "expected true or false");
            out = b->get();
            return true;
        }
        return false;
    }
    bool string(std::string_view key, std::string &out)
    {
        if (auto n = node(key))
        {
            auto s = n->as_string();
            if (!s)
                throw parse_error(path(key), "expected a string");
            out = s->get();
            return true;
        }
        return false;
    }
    bool vec3(std::string_view key, Vec3 &out)
    {
        if (auto n = node(key))
        {
            out = as_vec3(*n, path(key));
            return true;
        }
        return false;
    }
    bool pair(std::string_view key, double &a, double &b)
    {
        if (auto n = node(key))
        {
            const auto v = as_numbers(*n, path(key), 2);
            a = v[0];
            b = v[1];
            return true;
        }
        return false;
    }
    const toml::table *table(std::string_view key)
    {
        if (auto n = node(key))
        {
            if (auto t = n->as_table())
                return t;
            throw parse_error(path(key), "expected a table");
        }
        return nullptr;
    }

    void finish() const
    {
        for (auto &&[k, v] : table_)
            if (!used_.count(std::string(k.str())))
                throw parse_error(path(k.str()), "unknown key");
    }

private:
    const toml::table &table_;
    std::string path_;
    std::set<std::string> used_;
};

template <class E> E parse_enum(const std::string &value, const std::string &path,
                                std::initializer_list<std::pair<const char *, E>> options)
{
    std::string names;
    for (const auto &[name, e] : options)
    {
        if (value == name)
            return e;
        names += names.empty() ? name : std::string(", ") + name;
    }
    throw parse_error(path, "unknown value '" + value + "' (expected one of: " + names + ")");
}

void read_array(Reader &parent, std::string_view key, ArrayConfig &out)
{
    const toml::table *t = parent.table(key);
    if (!t)
        return;
    Reader r(*t, parent.path(key));
    if (auto n = r.node("elements"))
    {
        const toml::array &a = as_array(*n, r.path("elements"));
        out.elements.clear();
        for (std::size_t i = 0; i < a.size(); ++i)
            out.elements.push_back(as_vec3(*a.get(i), r.path("elements") + "[" + std::to_string(i) + "]"));
    }
    std::string pattern;
    if (r.string("pattern", pattern))
        out.pattern = parse_enum<PatternKind>(pattern, r.path("pattern"),
                                              {{"isotropic-v", PatternKind::isotropic_v},
                                               {"isotropic-h", PatternKind::isotropic_h},
                                               {"3gpp", PatternKind::three_gpp}});
    double az = out.boresight.azimuth(), el = out.boresight.elevation();
    if (r.pair("boresight", az, el))
    {
        try
        {
            out.boresight = SphericalAngles(az, el);
        }
        catch (const std::invalid_argument &e)
        {
            throw parse_error(r.path("boresight"), e.what());
        }
    }
    r.finish();
}

MobilitySpec read_mobility(const toml::table &t, const std::string &path)
{
    Reader r(t, path);
    MobilitySpec spec;
    if (!r.vec3("position", spec.initial_position))
        throw parse_error(r.path("position"), "missing required field");
    auto schedule = [&](std::string_view key, PiecewiseLinear &out) {
        if (auto n = r.node(key))
            out = as_schedule(*n, r.path(key));
    };
    schedule("speed", spec.speed);
    schedule("azimuth", spec.heading.azimuth);
    schedule("elevation", spec.heading.elevation);
    schedule("roll", spec.posture.roll);
    schedule("yaw", spec.posture.yaw);
    schedule("pitch", spec.posture.pitch);
    r.finish();
    return spec;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // Keep floats recognisable as floats in TOML.
    if (s.find_first_of(".eEn") == std::string::npos)
        s += ".0";
    return s;
}

std::string fmt(const Vec3 &v)
{
    return "[" + fmt(v.x()) + ", " + fmt(v.y()) + ", " + fmt(v.z()) + "]";
}

std::string fmt_schedule(const PiecewiseLinear &f)
{
    const auto &k = f.knots();
    if (k.size() == 1 && k[0].time == 0.0)
        return fmt(k[0].value);
    std::string s = "[";
    for (std::size_t i = 0; i < k.size(); ++i)
        s += (i ? ", [" : "[") + fmt(k[i].time) + ", " + fmt(k[i].value) + "]";
    return s + "]";
}

std::string fmt_list(const std::vector<double> &v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

const char *fmt_bool(bool b)
{
    return b ? "true" : "false";
}

void check(bool ok, const std::string &path, const std::string &what)
{
    if (!ok)
        throw parse_error(path, what);
}

void validate_mobility(const MobilitySpec &spec, const ScenarioConfig &c, const std::string &path)
{
    if (spec.speed.min_value() < 0.0)
        throw parse_error(path + ".speed", "must be >= 0");
    if (spec.heading.elevation.min_value() < -pi / 2.0 || spec.heading.elevation.max_value() > pi / 2.0)
        throw parse_error(path + ".elevation", "must lie in [-pi/2, pi/2]");
    MobilitySpec s = spec;
    s.duration = c.duration;
    s.step = c.step;
    try
    {
        MobilityProfile profile(std::move(s));
    }
    catch (const std::exception &e)
    {
        throw parse_error(path, e.what());
    }
}

MobilityProfile with_grid(const MobilityProfile &profile, double duration, double step)
{
    MobilitySpec spec = profile.spec();
    spec.duration = duration;
    spec.step = step;
    return MobilityProfile(std::move(spec));
}

} // namespace

ScenarioConfig preset_defaults(std::string_view preset)
{
    ScenarioConfig c;
    c.preset = std::string(preset);
    TerminalPair terminals = [&] {
        try
        {
            return preset_scenario(preset);
        }
        catch (const not_found_error &)
        {
            throw parse_error("preset", "unknown preset '" + std::string(preset) + "'");
        }
    }();
    c.duration = terminals.tx.duration();
    c.step = terminals.tx.step();
    if (preset == "paper-fig3")
    {
        c.tx_array.pattern = PatternKind::three_gpp;
        // Nose-mounted, tilted 45 degrees towards the ground.
        c.tx_array.boresight = SphericalAngles(0.0, -pi / 4.0);
        c.jitter = {0.3, 0.3};
    }
    else if (preset == "paper-fig7")
        c.f0 = 2.5e9;
    else if (preset == "paper-fig8")
        c.f0 = 2.6e9;
    return c;
}

ScenarioConfig parse_scenario_text(std::string_view text, std::string_view source)
{
    toml::table root;
    try
    {
        root = toml::parse(text, source);
    }
    catch (const toml::parse_error &e)
    {
        throw parse_error("line " + std::to_string(e.source().begin.line), std::string(e.description()));
    }

    Reader top(root, "");
    std::string preset;
    top.string("preset", preset);
    ScenarioConfig c = preset.empty() ? ScenarioConfig{} : preset_defaults(preset);

    if (top.integer("schema", c.schema) && c.schema != config_schema_version)
        throw parse_error("schema", "unsupported schema version " + std::to_string(c.schema) + " (expected " +
                                        std::to_string(config_schema_version) + ")");
    if (auto n = top.node("seed"))
    {
        const auto v = as_integer(*n, "seed");
        if (v < 0)
            throw parse_error("seed", "must be a non-negative integer");
        c.seed = static_cast<std::uint64_t>(v);
    }
    else
        throw parse_error("seed", "missing required field");

    if (auto t = top.table("carrier"))
    {
        Reader r(*t, "carrier");
        r.number("f0", c.f0);
        r.number("c0", c.c0);
        r.finish();
    }
    if (auto t = top.table("simulation"))
    {
        Reader r(*t, "simulation");
        r.number("duration", c.duration);
        r.number("step", c.step);
        r.integer("doppler_substeps", c.doppler_substeps);
        std::string comp;
        if (r.string("component", comp))
            c.component = parse_enum<Component>(
                comp, r.path("component"),
                {{"full", Component::full}, {"los", Component::los}, {"nlos", Component::nlos}});
        r.boolean("posture", c.posture);
        r.finish();
    }
    if (auto t = top.table("arrays"))
    {
        Reader r(*t, "arrays");
        read_array(r, "tx", c.tx_array);
        read_array(r, "rx", c.rx_array);
        r.finish();
    }
    if (auto t = top.table("mobility"))
    {
        if (!preset.empty())
            throw parse_error("mobility", "cannot be combined with a preset");
        Reader r(*t, "mobility");
        if (auto tx = r.table("tx"))
            c.tx_mobility = read_mobility(*tx, "mobility.tx");
        if (auto rx = r.table("rx"))
            c.rx_mobility = read_mobility(*rx, "mobility.rx");
        r.finish();
    }
    if (preset.empty())
    {
        if (!c.tx_mobility)
            throw parse_error("mobility.tx", "missing required field (or set `preset`)");
        if (!c.rx_mobility)
            throw parse_error("mobility.rx", "missing required field (or set `preset`)");
    }
    if (auto t = top.table("clusters"))
    {
        Reader r(*t, "clusters");
        ClusterParams &p = c.clusters;
        r.integer("count", p.n_paths);
        r.integer("subpaths", p.m_subpaths);
        r.pair("departure_spread", p.departure_spread.azimuth, p.departure_spread.elevation);
        r.pair("arrival_spread", p.arrival_spread.azimuth, p.arrival_spread.elevation);
        r.pair("departure_ray_spread", p.departure_ray_spread.azimuth, p.departure_ray_spread.elevation);
        r.pair("arrival_ray_spread", p.arrival_ray_spread.azimuth, p.arrival_ray_spread.elevation);
        r.pair("tx_distance", p.tx_distance_min, p.tx_distance_max);
        r.pair("rx_distance", p.rx_distance_min, p.rx_distance_max);
        r.number("last_to_first_power", p.last_to_first_power);
        r.number("xpr", p.xpr);
        r.vec3("scatterer_velocity", p.scatterer_velocity);
        r.number("death_rate", c.death_rate);
        r.number("birth_rate", c.birth_rate);
        r.finish();
    }
    if (auto t = top.table("k_factor"))
    {
        Reader r(*t, "k_factor");
        r.number("mean", c.k_factor.mean);
        r.number("std", c.k_factor.std_dev);
        r.number("correlation_time", c.k_factor.correlation_time);
        r.finish();
    }
    if (auto t = top.table("jitter"))
    {
        Reader r(*t, "jitter");
        r.number("rx_position_azimuth", c.jitter.rx_position_azimuth);
        r.number("rx_heading_azimuth", c.jitter.rx_heading_azimuth);
        r.finish();
    }
    if (auto t = top.table("correlation"))
    {
        Reader r(*t, "correlation");
        CorrelationConfig &k = c.correlation;
        r.integer("scenes", k.scenes);
        r.integer("realizations", k.realizations);
        if (auto n = r.node("anchors"))
            k.anchors = as_numbers(*n, r.path("anchors"));
        r.number("max_lag", k.max_lag);
        r.number("lag_step", k.lag_step);
        r.number("max_spacing", k.max_spacing);
        r.number("spacing_step", k.spacing_step);
        std::string side;
        if (r.string("spacing_side", side))
            k.spacing.side = parse_enum<Side>(side, r.path("spacing_side"), {{"tx", Side::tx}, {"rx", Side::rx}});
        r.vec3("spacing_axis", k.spacing.direction);
        r.integer("tx_element", k.tx_element);
        r.integer("rx_element", k.rx_element);
        std::string timing;
        if (r.string("posture_timing", timing))
            k.posture_timing = parse_enum<PostureTiming>(
                timing, r.path("posture_timing"),
                {{"anchor", PostureTiming::anchor}, {"instantaneous", PostureTiming::instantaneous}});
        r.boolean("antithetic", k.antithetic);
        r.finish();
    }
    if (auto t = top.table("output"))
    {
        Reader r(*t, "output");
        OutputConfig &o = c.output;
        r.boolean("cir", o.cir);
        r.boolean("acf", o.acf);
        r.boolean("ccf", o.ccf);
        r.boolean("summary", o.summary);
        std::string format;
        if (r.string("format", format))
            o.format = parse_enum<CirFormat>(format, r.path("format"), {{"csv", CirFormat::csv}, {"bin", CirFormat::bin}});
        r.finish();
    }
    top.finish();
    validate(c);
    return c;
}

ScenarioConfig parse_scenario(const std::filesystem::path &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw io_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_scenario_text(ss.str(), path.string());
}

void validate(const ScenarioConfig &c)
{
    check(c.schema == config_schema_version, "schema", "unsupported schema version");
    check(c.f0 > 0.0 && std::isfinite(c.f0), "carrier.f0", "must be > 0");
    check(c.c0 > 0.0 && std::isfinite(c.c0), "carrier.c0", "must be > 0");
    check(c.duration > 0.0, "simulation.duration", "must be > 0");
    check(c.step > 0.0 && c.step <= c.duration, "simulation.step", "must be > 0 and <= duration");
    check(c.doppler_substeps >= 1 && c.doppler_substeps <= 1024, "simulation.doppler_substeps",
          "must be in [1, 1024]");
    check(!c.tx_array.elements.empty(), "arrays.tx.elements", "need at least one element");
    check(!c.rx_array.elements.empty(), "arrays.rx.elements", "need at least one element");

    if (!c.preset.empty())
    {
        const auto &names = preset_names();
        check(std::find(names.begin(), names.end(), c.preset) != names.end(), "preset",
              "unknown preset '" + c.preset + "'");
        check(!c.tx_mobility && !c.rx_mobility, "mobility", "cannot be combined with a preset");
        if (preset_scenario(c.preset).tx.duration() < c.duration)
        {
            // Presets hold their last knot value, so longer runs are fine.
        }
    }
    else
    {
        check(c.tx_mobility.has_value(), "mobility.tx", "missing required field");
        check(c.rx_mobility.has_value(), "mobility.rx", "missing required field");
        validate_mobility(*c.tx_mobility, c, "mobility.tx");
        validate_mobility(*c.rx_mobility, c, "mobility.rx");
    }

    const ClusterParams &p = c.clusters;
    check(p.n_paths >= 1 && p.n_paths <= 1000, "clusters.count", "must be in [1, 1000]");
    check(p.m_subpaths >= 1 && p.m_subpaths <= 1000, "clusters.subpaths", "must be in [1, 1000]");
    auto spread_ok = [](const AngleSpread &s) { return s.azimuth >= 0.0 && s.elevation >= 0.0; };
    check(spread_ok(p.departure_spread), "clusters.departure_spread", "must be >= 0");
    check(spread_ok(p.arrival_spread), "clusters.arrival_spread", "must be >= 0");
    check(spread_ok(p.departure_ray_spread), "clusters.departure_ray_spread", "must be >= 0");
    check(spread_ok(p.arrival_ray_spread), "clusters.arrival_ray_spread", "must be >= 0");
    check(p.tx_distance_min > 0.0 && p.tx_distance_min <= p.tx_distance_max, "clusters.tx_distance",
          "need 0 < min <= max");
    check(p.rx_distance_min > 0.0 && p.rx_distance_min <= p.rx_distance_max, "clusters.rx_distance",
          "need 0 < min <= max");
    check(p.last_to_first_power > 0.0 && p.last_to_first_power <= 1.0, "clusters.last_to_first_power",
          "must be in (0, 1]");
    check(p.xpr > 0.0, "clusters.xpr", "must be > 0");
    check(c.death_rate >= 0.0, "clusters.death_rate", "must be >= 0");
    check(c.birth_rate >= 0.0, "clusters.birth_rate", "must be >= 0");

    check(c.k_factor.mean >= 0.0, "k_factor.mean", "must be >= 0");
    check(c.k_factor.std_dev >= 0.0, "k_factor.std", "must be >= 0");
    check(c.k_factor.correlation_time > 0.0, "k_factor.correlation_time", "must be > 0");
    check(c.jitter.rx_position_azimuth >= 0.0 && c.jitter.rx_position_azimuth <= pi, "jitter.rx_position_azimuth",
          "must be in [0, pi]");
    check(c.jitter.rx_heading_azimuth >= 0.0 && c.jitter.rx_heading_azimuth <= pi, "jitter.rx_heading_azimuth",
          "must be in [0, pi]");

    const CorrelationConfig &k = c.correlation;
    check(k.scenes >= 1, "correlation.scenes", "must be >= 1");
    check(k.realizations == 0 || k.realizations >= 2, "correlation.realizations", "must be 0 (analytic only) or >= 2");
    check(!k.anchors.empty(), "correlation.anchors", "need at least one anchor time");
    for (std::size_t i = 0; i < k.anchors.size(); ++i)
        check(k.anchors[i] >= 0.0 && k.anchors[i] <= c.duration, "correlation.anchors[" + std::to_string(i) + "]",
              "must lie in [0, duration]");
    check(k.max_lag >= 0.0, "correlation.max_lag", "must be >= 0");
    check(k.lag_step > 0.0, "correlation.lag_step", "must be > 0");
    check(k.max_spacing >= 0.0, "correlation.max_spacing", "must be >= 0");
    check(k.spacing_step > 0.0, "correlation.spacing_step", "must be > 0");
    check(k.spacing.direction.norm() > 1e-9, "correlation.spacing_axis", "must be non-zero");
    check(k.tx_element >= 0 && static_cast<std::size_t>(k.tx_element) < c.tx_array.elements.size(),
          "correlation.tx_element", "index out of range");
    check(k.rx_element >= 0 && static_cast<std::size_t>(k.rx_element) < c.rx_array.elements.size(),
          "correlation.rx_element", "index out of range");
}

std::string serialize(const ScenarioConfig &c)
{
    std::ostringstream o;
    o << "schema = " << c.schema << "\n";
    o << "seed = " << c.seed << "\n";
    if (!c.preset.empty())
        o << "preset = \"" << c.preset << "\"\n";
    o << "\n[carrier]\nf0 = " << fmt(c.f0) << "\nc0 = " << fmt(c.c0) << "\n";
    o << "\n[simulation]\nduration = " << fmt(c.duration) << "\nstep = " << fmt(c.step)
      << "\ndoppler_substeps = " << c.doppler_substeps << "\ncomponent = \"" << to_string(c.component)
      << "\"\nposture = " << fmt_bool(c.posture) << "\n";
    auto array = [&](const char *name, const ArrayConfig &a) {
        o << "\n[arrays." << name << "]\nelements = [";
        for (std::size_t i = 0; i < a.elements.size(); ++i)
            o << (i ? ", " : "") << fmt(a.elements[i]);
        o << "]\npattern = \"" << to_string(a.pattern) << "\"\nboresight = [" << fmt(a.boresight.azimuth()) << ", "
          << fmt(a.boresight.elevation()) << "]\n";
    };
    array("tx", c.tx_array);
    array("rx", c.rx_array);
    auto mobility = [&](const char *name, const MobilitySpec &m) {
        o << "\n[mobility." << name << "]\nposition = " << fmt(m.initial_position)
          << "\nspeed = " << fmt_schedule(m.speed) << "\nazimuth = " << fmt_schedule(m.heading.azimuth)
          << "\nelevation = " << fmt_schedule(m.heading.elevation) << "\nroll = " << fmt_schedule(m.posture.roll)
          << "\nyaw = " << fmt_schedule(m.posture.yaw) << "\npitch = " << fmt_schedule(m.posture.pitch) << "\n";
    };
    if (c.tx_mobility)
        mobility("tx", *c.tx_mobility);
    if (c.rx_mobility)
        mobility("rx", *c.rx_mobility);
    const ClusterParams &p = c.clusters;
    auto pair = [&](double a, double b) { return "[" + fmt(a) + ", " + fmt(b) + "]"; };
    o << "\n[clusters]\ncount = " << p.n_paths << "\nsubpaths = " << p.m_subpaths
      << "\ndeparture_spread = " << pair(p.departure_spread.azimuth, p.departure_spread.elevation)
      << "\narrival_spread = " << pair(p.arrival_spread.azimuth, p.arrival_spread.elevation)
      << "\ndeparture_ray_spread = " << pair(p.departure_ray_spread.azimuth, p.departure_ray_spread.elevation)
      << "\narrival_ray_spread = " << pair(p.arrival_ray_spread.azimuth, p.arrival_ray_spread.elevation)
      << "\ntx_distance = " << pair(p.tx_distance_min, p.tx_distance_max)
      << "\nrx_distance = " << pair(p.rx_distance_min, p.rx_distance_max)
      << "\nlast_to_first_power = " << fmt(p.last_to_first_power) << "\nxpr = " << fmt(p.xpr)
      << "\nscatterer_velocity = " << fmt(p.scatterer_velocity) << "\ndeath_rate = " << fmt(c.death_rate)
      << "\nbirth_rate = " << fmt(c.birth_rate) << "\n";
    o << "\n[k_factor]\nmean = " << fmt(c.k_factor.mean) << "\nstd = " << fmt(c.k_factor.std_dev)
      << "\ncorrelation_time = " << fmt(c.k_factor.correlation_time) << "\n";
    o << "\n[jitter]\nrx_position_azimuth = " << fmt(c.jitter.rx_position_azimuth)
      << "\nrx_heading_azimuth = " << fmt(c.jitter.rx_heading_azimuth) << "\n";
    const CorrelationConfig &k = c.correlation;
    o << "\n[correlation]\nscenes = " << k.scenes << "\nrealizations = " << k.realizations
      << "\nanchors = " << fmt_list(k.anchors) << "\nmax_lag = " << fmt(k.max_lag) << "\nlag_step = " << fmt(k.lag_step)
      << "\nmax_spacing = " << fmt(k.max_spacing) << "\nspacing_step = " << fmt(k.spacing_step)
      << "\nspacing_side = \"" << (k.spacing.side == Side::tx ? "tx" : "rx")
      << "\"\nspacing_axis = " << fmt(k.spacing.direction) << "\ntx_element = " << k.tx_element
      << "\nrx_element = " << k.rx_element << "\nposture_timing = \""
      << (k.posture_timing == PostureTiming::anchor ? "anchor" : "instantaneous")
      << "\"\nantithetic = " << fmt_bool(k.antithetic) << "\n";
    const OutputConfig &out = c.output;
    o << "\n[output]\ncir = " << fmt_bool(out.cir) << "\nacf = " << fmt_bool(out.acf) << "\nccf = " << fmt_bool(out.ccf)
      << "\nsummary = " << fmt_bool(out.summary) << "\nformat = \"" << (out.format == CirFormat::csv ? "csv" : "bin")
      << "\"\n";
    return o.str();
}

std::string config_hash(const ScenarioConfig &config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize(config))
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TerminalPair build_terminals(const ScenarioConfig &c)
{
    if (!c.preset.empty())
    {
        const TerminalPair p = preset_scenario(c.preset);
        return {with_grid(p.tx, c.duration, c.step), with_grid(p.rx, c.duration, c.step)};
    }
    MobilitySpec tx = *c.tx_mobility, rx = *c.rx_mobility;
    tx.duration = rx.duration = c.duration;
    tx.step = rx.step = c.step;
    return {MobilityProfile(std::move(tx)), MobilityProfile(std::move(rx))};
}

ChannelModel build_model(const ScenarioConfig &c)
{
    ChannelModel m;
    m.carrier = CarrierConfig(c.f0, c.c0);
    m.tx_array = c.tx_array.build();
    m.rx_array = c.rx_array.build();
    m.options.posture_enabled = c.posture;
    m.options.doppler_substeps = c.doppler_substeps;
    m.options.component = c.component;
    m.options.death_rate = c.death_rate;
    m.options.birth_rate = c.birth_rate;
    return m;
}

SceneParams build_scene_params(const ScenarioConfig &c)
{
    SceneParams p{build_terminals(c), c.clusters, c.k_factor, c.jitter};
    p.clusters.speed_of_light = c.c0;
    return p;
}

} // namespace u2v
