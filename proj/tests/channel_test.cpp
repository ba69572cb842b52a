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

#include "u2v/channel.hpp"
#include "u2v/errors.hpp"

#include <algorithm>
#include <cmath>

using namespace u2v;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

MobilitySpec line(const Vec3 &start, double speed, double azimuth, double duration = 1.0, double step = 1e-3)
{
    MobilitySpec s;
    s.initial_position = start;
    s.speed = PiecewiseLinear(speed);
    s.heading = {PiecewiseLinear(azimuth), PiecewiseLinear(0.0)};
    s.duration = duration;
    s.step = step;
    return s;
}

TerminalPair pair(const MobilitySpec &tx, const MobilitySpec &rx)
{
    return {MobilityProfile(tx), MobilityProfile(rx)};
}

double dist(const Vec3 &a, const Vec3 &b)
{
    return (a - b).norm();
}

SceneParams static_scene(int n_paths = 20, int m = 20)
{
    SceneParams p;
    p.terminals = preset_scenario("static");
    p.clusters.n_paths = n_paths;
    p.clusters.m_subpaths = m;
    return p;
}

} // namespace

TEST_CASE("carrier config")
{
    const CarrierConfig c(2.4e9);
    REQUIRE_THAT(c.wave_number(), WithinRel(50.3, 1e-3));
    REQUIRE_THAT(c.wavelength() * c.f0(), WithinRel(speed_of_light, 1e-15));
    REQUIRE_THROWS_AS(CarrierConfig(-1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(CarrierConfig(1e9, 0.0), std::invalid_argument);
}

TEST_CASE("LoS Doppler phase of a head-on approach")
{
    const CarrierConfig c(2.4e9);
    const TerminalPair tp = pair(line({0, 0, 0}, 50.0, 0.0), line({1000, 0, 0}, 0.0, 0.0));
    REQUIRE_THAT(doppler_phase_los(tp, c, 1e-3), WithinAbs(c.wave_number() * 0.05, 1e-9));
    REQUIRE_THAT(doppler_phase_los(tp, c, 1e-3), WithinAbs(2.515, 1e-3));
    for (double t : {0.0, 0.0137, 0.25, 0.5, 1.0})
        REQUIRE_THAT(doppler_phase_los(tp, c, t), WithinAbs(c.wave_number() * 50.0 * t, 1e-9));
}

TEST_CASE("LoS Doppler phase of a fly-by follows the path length")
{
    const CarrierConfig c(2.4e9);
    const TerminalPair tp = pair(line({0, 0, 150}, 50.0, 0.0), line({100, 0, 0}, 0.0, 0.0));
    for (double t : {0.3, 0.7, 1.0})
    {
        const double expected = c.wave_number() * (dist({0, 0, 150}, {100, 0, 0}) - dist({50.0 * t, 0, 150}, {100, 0, 0}));
        REQUIRE_THAT(doppler_phase_los(tp, c, t), WithinAbs(expected, 1e-6));
    }
}

TEST_CASE("static and co-moving scenes have no Doppler")
{
    const CarrierConfig c(2.4e9);
    const TerminalPair still = preset_scenario("static");
    for (double t : {0.0, 0.5, 1.0})
        REQUIRE(doppler_phase_los(still, c, t) == 0.0);

    ClusterParams cp;
    cp.n_paths = 2;
    cp.m_subpaths = 3;
    cp.tx_origin = {0, 0, 150};
    cp.rx_origin = {100, 0, 0};
    cp.scatterer_velocity = {10.0, 0.0, 0.0};
    const ClusterSet set = generate_clusters(cp, 3);
    const TerminalPair moving = pair(line({0, 0, 150}, 10.0, 0.0), line({100, 0, 0}, 10.0, 0.0));
    for (double t : {0.1, 0.9})
        REQUIRE_THAT(doppler_phase_nlos(moving, set.clusters[1], set.clusters[1].subpaths[2], c, t),
                     WithinAbs(0.0, 1e-12));
}

TEST_CASE("NLoS Doppler phase with fixed scatterers")
{
    const CarrierConfig c(2.4e9);
    const TerminalPair tp = pair(line({0, 0, 150}, 50.0, 0.3), line({100, 0, 0}, 20.0, pi / 2.0));
    ClusterParams cp;
    cp.n_paths = 3;
    cp.m_subpaths = 4;
    cp.tx_origin = {0, 0, 150};
    cp.rx_origin = {100, 0, 0};
    const ClusterSet set = generate_clusters(cp, 17);
    const SubPath &sp = set.clusters[2].subpaths[1];
    const Vec3 vtx = 50.0 * Vec3{std::cos(0.3), std::sin(0.3), 0.0};
    const Vec3 vrx{0.0, 20.0, 0.0};
    for (double t : {0.2, 1.0})
    {
        const Vec3 tx = Vec3{0, 0, 150} + vtx * t, rx = Vec3{100, 0, 0} + vrx * t;
        const double expected = c.wave_number() * (dist({0, 0, 150}, sp.tx_scatterer) + dist({100, 0, 0}, sp.rx_scatterer) -
                                                   dist(tx, sp.tx_scatterer) - dist(rx, sp.rx_scatterer));
        REQUIRE_THAT(doppler_phase_nlos(tp, set.clusters[2], sp, c, t), WithinAbs(expected, 1e-6));
    }
}

TEST_CASE("NLoS Doppler phase with constant geometry is linear in time")
{
    // Each terminal drives straight at its scatterer, so the unit vectors never change.
    const CarrierConfig c(2.4e9);
    const TerminalPair tp = pair(line({0, 0, 0}, 30.0, pi / 4.0), line({10, 0, 0}, 5.0, pi / 2.0));
    Cluster cl;
    cl.subpaths.resize(1);
    const Vec3 s_tx = Vec3{1.0, 1.0, 0.0} / std::sqrt(2.0);
    const Vec3 s_rx{0.0, 1.0, 0.0};
    cl.subpaths[0].tx_scatterer = s_tx * 1e6;
    cl.subpaths[0].rx_scatterer = Vec3{10, 0, 0} + s_rx * 1e6;
    const double rate = 30.0 + 5.0;
    for (double t : {0.001, 0.25, 1.0})
        REQUIRE_THAT(doppler_phase_nlos(tp, cl, cl.subpaths[0], c, t), WithinAbs(c.wave_number() * rate * t, 1e-9));
}

TEST_CASE("Doppler step halving on the fig3 preset")
{
    const CarrierConfig c(2.4e9);
    const TerminalPair tp = preset_scenario("paper-fig3");
    ClusterParams cp;
    cp.n_paths = 4;
    cp.m_subpaths = 2;
    cp.tx_origin = tp.tx.position(0.0);
    cp.rx_origin = tp.rx.position(0.0);
    const ClusterSet set = generate_clusters(cp, 2);
    for (double t : {0.5, 1.3, 2.5})
    {
        REQUIRE(std::abs(doppler_phase_los(tp, c, t, 16) - doppler_phase_los(tp, c, t, 32)) < 1e-6);
        for (const Cluster &cl : set.clusters)
            REQUIRE(std::abs(doppler_phase_nlos(tp, cl, cl.subpaths[0], c, t, 16) -
                             doppler_phase_nlos(tp, cl, cl.subpaths[0], c, t, 32)) < 1e-6);
    }
    REQUIRE_THROWS_AS(doppler_phase_los(tp, c, 2.6), std::out_of_range);
    REQUIRE_THROWS_AS(doppler_phase_los(tp, c, 1.0, 0), std::invalid_argument);
}

TEST_CASE("Doppler phase increments are bounded by the speeds")
{
    const CarrierConfig c(2.4e9);
    const TerminalPair tp = preset_scenario("paper-fig3");
    const double bound = c.wave_number() * 70.0 * 1e-3;
    double prev = 0.0;
    for (int i = 1; i <= 2500; i += 50)
    {
        const double phi = doppler_phase_los(tp, c, i * 1e-3);
        if (i > 1)
            REQUIRE(std::abs(phi - prev) < bound * 50.0);
        prev = phi;
    }
}

TEST_CASE("spatial phase")
{
    const CarrierConfig c(2.4e9);
    KinematicState s;
    const Vec3 dir = Vec3{0.3, -0.4, 0.5}.normalized();
    REQUIRE(spatial_phase(Vec3{}, Side::tx, s, dir, c) == 0.0);
    const Vec3 r{0.02, 0.05, -0.01};
    REQUIRE_THAT(spatial_phase(r, Side::tx, s, dir, c), WithinAbs(c.wave_number() * r.dot(dir), 1e-12));
    REQUIRE_THAT(spatial_phase(r, Side::rx, s, dir, c), WithinAbs(c.wave_number() * r.dot(dir), 1e-12));

    // Pitch pi/2 turns the y element offset onto z.
    s.posture = PostureAngles(0.0, 0.0, pi / 2.0);
    const Vec3 y{0.0, 0.1, 0.0};
    const Vec3 up{0.0, 0.0, 1.0};
    REQUIRE_THAT(spatial_phase(y, Side::tx, s, up, c), WithinAbs(c.wave_number() * 0.1, 1e-12));
    REQUIRE_THAT(spatial_phase(y, Side::tx, s, up, c, false), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(spatial_phase(y, Side::rx, s, up, c), WithinAbs(0.0, 1e-12));
}

TEST_CASE("fig3 preset spatial phases depend on posture at t = 1 s")
{
    const CarrierConfig c(2.4e9);
    const TerminalPair tp = preset_scenario("paper-fig3");
    const KinematicState s = sample_state(tp.tx, 1.0);
    const Vec3 r{0.0, 0.0625, 0.0};
    const Vec3 dir = (tp.rx.position(1.0) - tp.tx.position(1.0)).normalized();
    const double on = spatial_phase(r, Side::tx, s, dir, c, true);
    const double off = spatial_phase(r, Side::tx, s, dir, c, false);
    const Vec3 rotated = velocity_rotation_matrix(s.heading) * posture_matrix(s.posture) * r;
    REQUIRE_THAT(on, WithinAbs(c.wave_number() * rotated.dot(dir), 1e-12));
    REQUIRE(std::abs(on - off) > 1e-3);
}

TEST_CASE("LoS coefficient with isotropic patterns")
{
    ChannelModel m;
    m.tx_array = AntennaArray({Vec3{}, Vec3{0.03, 0.0, 0.0}});
    m.rx_array = AntennaArray({Vec3{}, Vec3{0.0, 0.05, 0.0}});
    const TerminalPair tp = preset_scenario("straight-line");
    for (double t : {0.0, 0.4, 1.0})
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
                REQUIRE_THAT(std::abs(los_coefficient(p, q, m, tp, 1.0, t)), WithinAbs(1.0, 1e-12));

    ChannelModel h = m;
    h.tx_array.pattern.kind = PatternKind::isotropic_h;
    h.rx_array.pattern.kind = PatternKind::isotropic_h;
    const complex v = los_coefficient(1, 1, m, tp, 0.7, 0.5);
    REQUIRE_THAT(std::abs(los_coefficient(1, 1, h, tp, 0.7, 0.5) + v), WithinAbs(0.0, 1e-12));
    // Static scene: constant up to the initial phase.
    const TerminalPair still = preset_scenario("static");
    REQUIRE(los_coefficient(0, 0, m, still, 0.7, 0.0) == los_coefficient(0, 0, m, still, 0.7, 1.0));
    REQUIRE_THAT(std::arg(los_coefficient(0, 0, m, still, 0.7, 0.3)), WithinAbs(0.7, 1e-12));
    REQUIRE_THROWS_AS(los_coefficient(2, 0, m, tp, 0.0, 0.0), std::out_of_range);

    const TerminalPair clash = pair(line({0, 0, 0}, 0.0, 0.0), line({0, 0, 0}, 0.0, 0.0));
    REQUIRE_THROWS_AS(los_coefficient(0, 0, m, clash, 0.0, 0.0), degenerate_geometry_error);
}

TEST_CASE("3GPP element pattern")
{
    const FieldPattern p = FieldPattern::three_gpp_towards({0.0, 0.0});
    REQUIRE_THAT(p(Vec3{1, 0, 0}).v, WithinRel(std::sqrt(std::pow(10.0, 0.8)), 1e-12));
    REQUIRE(p(Vec3{1, 0, 0}).h == 0.0);
    // 3 dB down at half the beamwidth off boresight.
    const double half = 32.5 * pi / 180.0;
    REQUIRE_THAT(20.0 * std::log10(p(Vec3{std::cos(half), std::sin(half), 0.0}).v), WithinAbs(8.0 - 3.0, 1e-9));
    // Floor of 30 dB below the peak behind the element.
    REQUIRE_THAT(20.0 * std::log10(p(Vec3{-1, 0, 0}).v), WithinAbs(8.0 - 30.0, 1e-9));
    const FieldPattern down = FieldPattern::three_gpp_towards({pi / 2.0, -pi / 4.0});
    const Vec3 b = angle_unit_vector({pi / 2.0, -pi / 4.0});
    REQUIRE_THAT(down(b).v, WithinRel(std::sqrt(std::pow(10.0, 0.8)), 1e-9));
}

TEST_CASE("posture off equals the reference model when posture is zero")
{
    ChannelModel on;
    on.tx_array = AntennaArray({Vec3{}, Vec3{0.0, 0.0625, 0.0}}, FieldPattern::three_gpp_towards({1.0, -0.3}));
    on.rx_array = AntennaArray({Vec3{}, Vec3{0.0625, 0.0, 0.0}});
    ChannelModel off = on;
    off.options.posture_enabled = false;

    SceneParams sp = static_scene(4, 5);
    sp.terminals = preset_scenario("straight-line");
    const Scene scene = build_scene(sp, 9);
    for (double t : {0.0, 0.5, 1.0})
    {
        const CirSnapshot a = cir_matrix(on, scene, t), b = cir_matrix(off, scene, t);
        for (std::size_t k = 0; k < a.taps.size(); ++k)
            REQUIRE(a.taps[k].coefficients == b.taps[k].coefficients);
    }

    SceneParams f3 = sp;
    f3.terminals = preset_scenario("paper-fig3");
    const Scene s3 = build_scene(f3, 9);
    const CirSnapshot a0 = cir_matrix(on, s3, 0.0), b0 = cir_matrix(off, s3, 0.0);
    REQUIRE(a0.taps[0].coefficients == b0.taps[0].coefficients);
    const CirSnapshot a1 = cir_matrix(on, s3, 1.0), b1 = cir_matrix(off, s3, 1.0);
    REQUIRE(std::abs(a1.at(0, 1) - b1.at(0, 1)) > 1e-3);
}

TEST_CASE("cir_matrix Ricean limits")
{
    ChannelModel m;
    m.rx_array = AntennaArray({Vec3{}, Vec3{0.05, 0.0, 0.0}});
    SceneParams sp = static_scene(3, 4);
    sp.terminals = preset_scenario("straight-line");
    const Scene scene = build_scene(sp, 4);

    const CirSnapshot los = cir_matrix(m, scene, 0.5, std::numeric_limits<double>::infinity());
    for (std::size_t k = 1; k < los.taps.size(); ++k)
        for (const complex &v : los.taps[k].coefficients)
            REQUIRE(v == complex{});
    for (int q = 0; q < 2; ++q)
        REQUIRE(los.at(q, 0) == los_coefficient(0, q, m, scene.terminals, scene.clusters.los_init_phase, 0.5));

    const CirSnapshot nlos = cir_matrix(m, scene, 0.5, 0.0);
    for (const complex &v : nlos.taps[0].coefficients)
        REQUIRE(v == complex{});
    complex sum = 0.0;
    for (const Cluster &c : scene.clusters.clusters)
        sum += std::sqrt(c.power) * nlos_coefficient(0, 1, c, m, scene.terminals, 0.5);
    REQUIRE_THAT(std::abs(nlos.at(1, 0) - sum), WithinAbs(0.0, 1e-12));
    REQUIRE(nlos.taps.size() == 4);
    REQUIRE_THROWS_AS(cir_matrix(m, scene, 0.5, -1.0), std::invalid_argument);
}

TEST_CASE("tap delays are path lengths over c")
{
    ChannelModel m;
    SceneParams sp = static_scene(3, 2);
    sp.terminals = preset_scenario("paper-fig3");
    const Scene scene = build_scene(sp, 5);
    const double t = 1.7;
    const CirSnapshot snap = cir_matrix(m, scene, t);
    const Vec3 tx = scene.terminals.tx.position(t), rx = scene.terminals.rx.position(t);
    REQUIRE_THAT(snap.taps[0].delay, WithinRel(dist(tx, rx) / speed_of_light, 1e-12));
    for (std::size_t n = 0; n < 3; ++n)
    {
        const Cluster &c = scene.clusters.clusters[n];
        const double len = dist(tx, c.tx_scatterer) + dist(c.tx_scatterer, c.rx_scatterer) + dist(c.rx_scatterer, rx);
        REQUIRE_THAT(snap.taps[n + 1].delay, WithinRel(len / speed_of_light, 1e-12));
        REQUIRE(snap.taps[n + 1].delay >= 0.0);
    }
}

TEST_CASE("single sub-path NLoS coefficient")
{
    ChannelModel m;
    SceneParams sp = static_scene(1, 1);
    sp.clusters.xpr = 1e300;
    const Scene scene = build_scene(sp, 12);
    REQUIRE_THAT(std::abs(nlos_coefficient(0, 0, scene.clusters.clusters[0], m, scene.terminals, 0.2)),
                 WithinAbs(1.0, 1e-12));
    Cluster dead = scene.clusters.clusters[0];
    dead.alive = false;
    REQUIRE(nlos_coefficient(0, 0, dead, m, scene.terminals, 0.2) == complex{});
}

TEST_CASE("NLoS amplitude is Rayleigh over phase draws")
{
    ChannelModel m;
    const Scene scene = build_scene(static_scene(1, 20), 31);
    Rng rng = make_rng(2024);
    const int draws = 10000;
    std::vector<double> amp;
    amp.reserve(draws);
    double power = 0.0;
    for (int i = 0; i < draws; ++i)
    {
        const ClusterSet phases = redraw_phases(scene.clusters, rng);
        const complex h = nlos_coefficient(0, 0, phases.clusters[0], m, scene.terminals, 0.0);
        amp.push_back(std::abs(h));
        power += std::norm(h);
    }
    REQUIRE_THAT(power / draws, WithinAbs(1.0, 0.05));

    // Kolmogorov-Smirnov against the Rayleigh CDF 1 - exp(-r^2 / (2 sigma^2)), sigma^2 = 1/2.
    std::sort(amp.begin(), amp.end());
    double d = 0.0;
    for (int i = 0; i < draws; ++i)
    {
        const double cdf = 1.0 - std::exp(-amp[i] * amp[i]);
        d = std::max({d, std::abs(cdf - static_cast<double>(i) / draws), std::abs(cdf - static_cast<double>(i + 1) / draws)});
    }
    // Critical value for p = 0.01.
    REQUIRE(d < 1.628 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("mean channel power is one")
{
    ChannelModel m;
    m.options.doppler_substeps = 1;
    SceneParams sp = static_scene();
    sp.terminals = preset_scenario("paper-fig3");
    const std::vector<Scene> scenes = build_scenes(sp, 6, 200);
    double power = 0.0;
    int count = 0;
    for (const Scene &s : scenes)
        for (double t : {0.0, 0.3, 0.6})
        {
            power += std::norm(cir_matrix(m, s, t).at(0, 0));
            ++count;
        }
    REQUIRE_THAT(power / count, WithinAbs(1.0, 0.05));
}

TEST_CASE("LoS plus one ray interferes like two phasors")
{
    ChannelModel m;
    SceneParams sp = static_scene(1, 1);
    sp.terminals = preset_scenario("straight-line");
    sp.clusters.xpr = 1e300;
    sp.k_factor = {1.0, 0.0, 0.1};
    const Scene scene = build_scene(sp, 8);
    const Cluster &c = scene.clusters.clusters[0];
    const SubPath &ray = c.subpaths[0];

    auto tx_at = [](double t) { return Vec3{50.0 * t, 0.0, 150.0}; };
    auto rx_at = [](double t) { return Vec3{200.0, 50.0 + 20.0 * t, 0.0}; };
    auto los_len = [&](double t) { return dist(tx_at(t), rx_at(t)); };
    auto ray_len = [&](double t) {
        return dist(tx_at(t), ray.tx_scatterer) + dist(ray.tx_scatterer, ray.rx_scatterer) + dist(ray.rx_scatterer, rx_at(t));
    };
    const double k = m.carrier.wave_number();
    const double phi0 = c.random_init_phase + ray.init_phases[0] - scene.clusters.los_init_phase;

    std::vector<double> times;
    for (int i = 0; i <= 1000; ++i)
        times.push_back(i * 1e-3);
    Rng unused = make_rng(0);
    const ChannelRealization r = synthesize_realization(m, scene, scene.clusters, times, unused);
    double lowest = 2.0;
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        const double t = times[i];
        const double delta = phi0 - k * (ray_len(t) - ray_len(0.0) - los_len(t) + los_len(0.0));
        const double expected = 0.5 * std::norm(1.0 + std::polar(1.0, delta));
        const double got = std::norm(r.snapshots[i].at(0, 0));
        REQUIRE_THAT(got, WithinAbs(expected, 1e-5));
        lowest = std::min(lowest, got);
    }
    REQUIRE(lowest < 0.01);
}

TEST_CASE("transfer function")
{
    CirSnapshot snap;
    snap.q = snap.p = 1;
    const complex a{0.6, -0.2};
    const double gap = 2e-7;
    snap.taps = {Tap{1e-6, {a}}, Tap{1e-6 + gap, {a}}};
    REQUIRE(transfer_function(snap, 0.0)[0] == snap.at(0, 0));
    for (int mth = 0; mth < 4; ++mth)
    {
        const double f = (2.0 * mth + 1.0) / (2.0 * gap);
        REQUIRE(std::abs(transfer_function(snap, f)[0]) < 1e-9);
        REQUIRE_THAT(std::abs(transfer_function(snap, mth / gap)[0]), WithinAbs(2.0 * std::abs(a), 1e-9));
    }
    snap.taps.pop_back();
    for (double f : {0.0, 1e5, 3.3e7})
        REQUIRE_THAT(std::abs(transfer_function(snap, f)[0]), WithinAbs(std::abs(a), 1e-12));
}

TEST_CASE("realization synthesis matches direct evaluation")
{
    ChannelModel m;
    m.tx_array = AntennaArray({Vec3{}, Vec3{0.0, 0.06, 0.0}}, FieldPattern::three_gpp_towards({4.7, -0.7}));
    m.rx_array = AntennaArray({Vec3{}, Vec3{0.06, 0.0, 0.0}});
    SceneParams sp = static_scene(3, 4);
    sp.terminals = preset_scenario("paper-fig3");
    const Scene scene = build_scene(sp, 15);
    Rng rng = make_rng(3);
    const std::vector<double> times{0.0, 0.9, 1.4};
    const ChannelRealization r = synthesize_realization(m, scene, scene.clusters, times, rng);
    REQUIRE(r.snapshots.size() == 3);
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        const CirSnapshot d = cir_matrix(m, scene, times[i]);
        for (int q = 0; q < 2; ++q)
            for (int p = 0; p < 2; ++p)
                REQUIRE_THAT(std::abs(r.snapshots[i].at(q, p) - d.at(q, p)), WithinAbs(0.0, 1e-9));
    }
}
