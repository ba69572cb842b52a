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

#include "u2v/channel.hpp"
#include "u2v/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace u2v
{

CarrierConfig::CarrierConfig(double f0, double c0) : f0_(f0), c0_(c0)
{
    if (!(f0 > 0.0) || !std::isfinite(f0))
        throw std::invalid_argument("carrier frequency must be positive");
    if (!(c0 > 0.0) || !std::isfinite(c0))
        throw std::invalid_argument("propagation speed must be positive");
}

RotationMatrix3 FieldPattern::mounting_towards(const SphericalAngles &boresight)
{
    return rotation_about_z(boresight.azimuth()) * rotation_about_y(-boresight.elevation());
}

FieldPattern FieldPattern::three_gpp_towards(const SphericalAngles &boresight)
{
    return {PatternKind::three_gpp, mounting_towards(boresight)};
}

FieldComponents FieldPattern::operator()(const Vec3 &direction) const
{
    switch (kind)
    {
    case PatternKind::isotropic_v:
        return {1.0, 0.0};
    case PatternKind::isotropic_h:
        return {0.0, 1.0};
    case PatternKind::three_gpp:
        break;
    }
    // Element frame: boresight along +x, zenith angle measured from +z.
    const Vec3 d = mounting.transposed() * direction;
    const double n = d.norm();
    const double zenith_deg = std::acos(std::clamp(d.z() / n, -1.0, 1.0)) * 180.0 / pi;
    const double azimuth_deg = std::atan2(d.y(), d.x()) * 180.0 / pi;
    const double a_v = -std::min(12.0 * std::pow((zenith_deg - 90.0) / 65.0, 2), 30.0);
    const double a_h = -std::min(12.0 * std::pow(azimuth_deg / 65.0, 2), 30.0);
    const double a_db = -std::min(-(a_v + a_h), 30.0);
    constexpr double max_gain_dbi = 8.0;
    return {std::sqrt(std::pow(10.0, (max_gain_dbi + a_db) / 10.0)), 0.0};
}

AntennaArray::AntennaArray(std::vector<Vec3> element_positions, FieldPattern field_pattern)
    : elements(std::move(element_positions)), pattern(field_pattern)
{
    if (elements.empty())
        throw std::invalid_argument("antenna array needs at least one element");
}

std::uint64_t scene_seed(std::uint64_t seed, int index)
{
    Rng rng = make_rng(seed, {0x5ce1e, static_cast<std::uint64_t>(index)});
    return rng();
}

Scene build_scene(const SceneParams &params, std::uint64_t seed)
{
    TerminalPair terminals = params.terminals;
    const GeometryJitter &j = params.jitter;
    if (j.rx_position_azimuth != 0.0 || j.rx_heading_azimuth != 0.0)
    {
        Rng rng = make_rng(seed, {0x9e0});
        const double rot = j.rx_position_azimuth * (2.0 * uniform01(rng) - 1.0);
        const double head = j.rx_heading_azimuth * (2.0 * uniform01(rng) - 1.0);
        terminals.rx = rotate_about_vertical(terminals.rx, terminals.tx.spec().initial_position, rot, head);
    }

    ClusterParams cp = params.clusters;
    cp.tx_origin = terminals.tx.position(0.0);
    cp.rx_origin = terminals.rx.position(0.0);
    const double horizon = std::max(terminals.tx.duration(), terminals.rx.duration());
    RiceanProcess k(params.k_factor.mean, params.k_factor.std_dev, params.k_factor.correlation_time, horizon,
                    make_rng(seed, {0x4b})(), terminals.tx.step());
    return Scene{terminals, generate_clusters(cp, seed), std::move(k), seed};
}

std::vector<Scene> build_scenes(const SceneParams &params, std::uint64_t seed, int count)
{
    if (count < 1)
        throw std::invalid_argument("scene count must be >= 1");
    std::vector<Scene> scenes;
    scenes.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        scenes.push_back(build_scene(params, scene_seed(seed, i)));
    return scenes;
}

RotationMatrix3 array_frame(const KinematicState &state, Side side, bool posture_enabled)
{
    const RotationMatrix3 heading = velocity_rotation_matrix(state.heading);
    if (side == Side::rx || !posture_enabled)
        return heading;
    return heading * posture_matrix(state.posture);
}

PathGeometry los_geometry(const Vec3 &tx_pos, const Vec3 &rx_pos)
{
    const Vec3 d = rx_pos - tx_pos;
    const double len = d.norm();
    if (len < 1e-9)
        throw degenerate_geometry_error("Tx and Rx positions coincide");
    const Vec3 s = d / len;
    return {s, -s, len};
}

PathGeometry nlos_geometry(const Vec3 &tx_pos, const Vec3 &rx_pos, const Vec3 &tx_scatterer, const Vec3 &rx_scatterer)
{
    const Vec3 a = tx_scatterer - tx_pos;
    const Vec3 b = rx_scatterer - rx_pos;
    const double la = a.norm(), lb = b.norm();
    if (la < 1e-9 || lb < 1e-9)
        throw degenerate_geometry_error("scatterer coincides with a terminal");
    return {a / la, b / lb, la + (rx_scatterer - tx_scatterer).norm() + lb};
}

namespace
{

struct PathEndpoints
{
    bool los = true;
    Vec3 tx_scatterer, rx_scatterer, velocity;
};

struct TerminalSample
{
    Vec3 tx_pos, tx_vel, rx_pos, rx_vel;
};

TerminalSample terminals_at(const TerminalPair &terminals, double t)
{
    return {terminals.tx.position(t), terminals.tx.velocity(t), terminals.rx.position(t), terminals.rx.velocity(t)};
}

void check_substeps(int substeps)
{
    if (substeps < 1)
        throw std::invalid_argument("doppler_substeps must be >= 1");
}

// Path endpoints flattened for the integration loop.
struct PathTable
{
    std::vector<double> ax, ay, az, bx, by, bz, vx, vy, vz;
    std::vector<char> los;
    std::vector<std::size_t> los_index;

    explicit PathTable(const std::vector<PathEndpoints> &paths)
    {
        for (const auto &p : paths)
        {
            ax.push_back(p.tx_scatterer.x());
            ay.push_back(p.tx_scatterer.y());
            az.push_back(p.tx_scatterer.z());
            bx.push_back(p.rx_scatterer.x());
            by.push_back(p.rx_scatterer.y());
            bz.push_back(p.rx_scatterer.z());
            vx.push_back(p.velocity.x());
            vy.push_back(p.velocity.y());
            vz.push_back(p.velocity.z());
            los.push_back(p.los ? 1 : 0);
        }
        // LoS rows get a placeholder far-away scatterer and are overwritten after the main loop.
        for (std::size_t i = 0; i < los.size(); ++i)
            if (los[i])
            {
                los_index.push_back(i);
                ax[i] = ay[i] = az[i] = bx[i] = by[i] = bz[i] = 1e12;
            }
    }

    // Integrand of every path at time t into f.
    void evaluate(const TerminalSample &ts, double t, std::vector<double> &f) const
    {
        const double tpx = ts.tx_pos.x(), tpy = ts.tx_pos.y(), tpz = ts.tx_pos.z();
        const double rpx = ts.rx_pos.x(), rpy = ts.rx_pos.y(), rpz = ts.rx_pos.z();
        const double tvx = ts.tx_vel.x(), tvy = ts.tx_vel.y(), tvz = ts.tx_vel.z();
        const double rvx = ts.rx_vel.x(), rvy = ts.rx_vel.y(), rvz = ts.rx_vel.z();
        const std::size_t n = los.size();
        double *__restrict out = f.data();
        const double *__restrict pax = ax.data(), *__restrict pay = ay.data(), *__restrict paz = az.data();
        const double *__restrict pbx = bx.data(), *__restrict pby = by.data(), *__restrict pbz = bz.data();
        const double *__restrict pvx = vx.data(), *__restrict pvy = vy.data(), *__restrict pvz = vz.data();
        for (std::size_t i = 0; i < n; ++i)
        {
            const double sx = pvx[i] * t, sy = pvy[i] * t, sz = pvz[i] * t;
            const double dax = pax[i] + sx - tpx, day = pay[i] + sy - tpy, daz = paz[i] + sz - tpz;
            const double dbx = pbx[i] + sx - rpx, dby = pby[i] + sy - rpy, dbz = pbz[i] + sz - rpz;
            const double la = std::sqrt(dax * dax + day * day + daz * daz);
            const double lb = std::sqrt(dbx * dbx + dby * dby + dbz * dbz);
            out[i] = ((tvx - pvx[i]) * dax + (tvy - pvy[i]) * day + (tvz - pvz[i]) * daz) / la +
                     ((rvx - pvx[i]) * dbx + (rvy - pvy[i]) * dby + (rvz - pvz[i]) * dbz) / lb;
        }
        for (std::size_t i : los_index)
        {
            const double dx = rpx - tpx, dy = rpy - tpy, dz = rpz - tpz;
            const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
            if (len < 1e-9)
                throw degenerate_geometry_error("Tx and Rx positions coincide");
            out[i] = ((tvx - rvx) * dx + (tvy - rvy) * dy + (tvz - rvz) * dz) / len;
        }
        // A scatterer on top of a terminal shows up as 0/0.
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(out[i]))
                throw degenerate_geometry_error("scatterer coincides with a terminal");
    }
};

// Cumulative trapezoid of the Doppler integrands on the fixed grid tau_k = k * step / substeps,
// read out at the requested (ascending) times. Returns [path][time].
std::vector<double> integrate_doppler(const TerminalPair &terminals, const CarrierConfig &carrier,
                                      const std::vector<PathEndpoints> &paths, const std::vector<double> &times,
                                      int substeps)
{
    check_substeps(substeps);
    const double step = terminals.tx.step();
    const double k = carrier.wave_number();
    const std::size_t n_paths = paths.size(), n_times = times.size();
    std::vector<double> out(n_paths * n_times, 0.0);
    if (n_paths == 0 || n_times == 0)
        return out;
    const PathTable table(paths);

    const auto sub = static_cast<std::size_t>(substeps);
    auto grid_time = [&](std::size_t idx) {
        return step * (static_cast<double>(idx / sub) + static_cast<double>(idx % sub) / substeps);
    };

    std::vector<double> acc(n_paths, 0.0), f_prev(n_paths), f(n_paths);
    std::size_t idx = 0;
    double tau = 0.0;
    table.evaluate(terminals_at(terminals, 0.0), 0.0, f_prev);
    for (std::size_t ti = 0; ti < n_times; ++ti)
    {
        const double t = times[ti];
        if (!(t >= 0.0))
            throw std::invalid_argument("Doppler phase requested at negative time");
        if (ti > 0 && t < times[ti - 1])
            throw std::invalid_argument("Doppler phase times must be ascending");
        while (true)
        {
            const double next = grid_time(idx + 1);
            if (next > t + 1e-12)
                break;
            const double half_h = 0.5 * (next - tau);
            table.evaluate(terminals_at(terminals, next), next, f);
            for (std::size_t p = 0; p < n_paths; ++p)
                acc[p] += half_h * (f_prev[p] + f[p]);
            std::swap(f, f_prev);
            ++idx;
            tau = next;
        }
        if (t > tau)
        {
            const double half_h = 0.5 * (t - tau);
            table.evaluate(terminals_at(terminals, t), t, f);
            for (std::size_t p = 0; p < n_paths; ++p)
                out[p * n_times + ti] = k * (acc[p] + half_h * (f_prev[p] + f[p]));
        }
        else
        {
            for (std::size_t p = 0; p < n_paths; ++p)
                out[p * n_times + ti] = k * acc[p];
        }
    }
    return out;
}

void check_time(const TerminalPair &terminals, double t)
{
    const double duration = std::min(terminals.tx.duration(), terminals.rx.duration());
    if (!(t >= 0.0) || t > duration * (1.0 + 1e-12))
        throw std::out_of_range("time " + std::to_string(t) + " s outside the simulation window");
}

PathEndpoints endpoints(const Cluster &cluster, const SubPath &sp)
{
    return {false, sp.tx_scatterer, sp.rx_scatterer, cluster.scatterer_velocity};
}

// F_tx^T P F_rx products in VV, VH, HV, HH order.
std::array<double, n_pol> pattern_products(const FieldComponents &tx, const FieldComponents &rx)
{
    return {tx.v * rx.v, tx.v * rx.h, tx.h * rx.v, tx.h * rx.h};
}

std::array<complex, n_pol> nlos_factors(const Cluster &c, const SubPath &sp)
{
    const double cross = std::sqrt(1.0 / sp.xpr);
    const complex common = std::polar(1.0, c.random_init_phase);
    return {common * std::polar(1.0, sp.init_phases[0]), common * std::polar(cross, sp.init_phases[1]),
            common * std::polar(cross, sp.init_phases[2]), common * std::polar(1.0, sp.init_phases[3])};
}

std::array<complex, n_pol> los_factors(double init_phase)
{
    const complex e = std::polar(1.0, init_phase);
    return {e, 0.0, 0.0, -e};
}

complex combine(const std::array<complex, n_pol> &factors, const std::array<double, n_pol> &products)
{
    complex s = 0.0;
    for (int i = 0; i < n_pol; ++i)
        s += factors[i] * products[i];
    return s;
}

struct TapWeights
{
    double los = 0.0;
    double nlos = 0.0;
};

TapWeights tap_weights(double k_factor, Component component)
{
    TapWeights w;
    if (std::isinf(k_factor))
        w = {1.0, 0.0};
    else
        w = {std::sqrt(k_factor / (k_factor + 1.0)), std::sqrt(1.0 / (k_factor + 1.0))};
    if (component == Component::los)
        w.nlos = 0.0;
    if (component == Component::nlos)
        w.los = 0.0;
    return w;
}

double cluster_delay_at(const Cluster &c, const TerminalSample &ts, double t, double c0)
{
    const Vec3 shift = c.scatterer_velocity * t;
    return nlos_geometry(ts.tx_pos, ts.rx_pos, c.tx_scatterer + shift, c.rx_scatterer + shift).length / c0;
}

// Coefficient of one sub-path (without the tap weight) given its Doppler phase.
complex subpath_term(const Vec3 &r_tx, const Vec3 &r_rx, const ChannelModel &model, const KinematicState &tx,
                     const KinematicState &rx, const PathGeometry &g, double doppler,
                     const std::array<complex, n_pol> &factors)
{
    const bool posture = model.options.posture_enabled;
    const RotationMatrix3 tx_frame = array_frame(tx, Side::tx, posture);
    const RotationMatrix3 rx_frame = array_frame(rx, Side::rx, posture);
    const FieldComponents f_tx = model.tx_array.pattern(tx_frame.transposed() * g.s_tx);
    const FieldComponents f_rx = model.rx_array.pattern(rx_frame.transposed() * g.s_rx);
    const double phase = doppler + spatial_phase(r_tx, Side::tx, tx, g.s_tx, model.carrier, posture) +
                         spatial_phase(r_rx, Side::rx, rx, g.s_rx, model.carrier, posture);
    return combine(factors, pattern_products(f_tx, f_rx)) * std::polar(1.0, phase);
}

void check_element(int index, const AntennaArray &array, const char *what)
{
    if (index < 0 || static_cast<std::size_t>(index) >= array.size())
        throw std::out_of_range(std::string(what) + " element index out of range");
}

} // namespace

double doppler_phase_los(const TerminalPair &terminals, const CarrierConfig &carrier, double t, int substeps)
{
    check_time(terminals, t);
    return integrate_doppler(terminals, carrier, {PathEndpoints{}}, {t}, substeps)[0];
}

double doppler_phase_nlos(const TerminalPair &terminals, const Cluster &cluster, const SubPath &subpath,
                          const CarrierConfig &carrier, double t, int substeps)
{
    check_time(terminals, t);
    return integrate_doppler(terminals, carrier, {endpoints(cluster, subpath)}, {t}, substeps)[0];
}

double spatial_phase(const Vec3 &element, Side side, const KinematicState &state, const Vec3 &direction,
                     const CarrierConfig &carrier, bool posture_enabled)
{
    const RotationMatrix3 frame = array_frame(state, side, posture_enabled);
    return carrier.wave_number() * (frame * element).dot(direction);
}

complex los_coefficient(int p, int q, const ChannelModel &model, const TerminalPair &terminals, double init_phase,
                        double t)
{
    check_element(p, model.tx_array, "Tx");
    check_element(q, model.rx_array, "Rx");
    const KinematicState tx = sample_state(terminals.tx, t);
    const KinematicState rx = sample_state(terminals.rx, t);
    const PathGeometry g = los_geometry(tx.position, rx.position);
    const double doppler = doppler_phase_los(terminals, model.carrier, t, model.options.doppler_substeps);
    return subpath_term(model.tx_array.elements[p], model.rx_array.elements[q], model, tx, rx, g, doppler,
                        los_factors(init_phase));
}

complex nlos_coefficient(int p, int q, const Cluster &cluster, const ChannelModel &model,
                         const TerminalPair &terminals, double t)
{
    check_element(p, model.tx_array, "Tx");
    check_element(q, model.rx_array, "Rx");
    if (!cluster.alive || cluster.subpaths.empty())
        return 0.0;
    const KinematicState tx = sample_state(terminals.tx, t);
    const KinematicState rx = sample_state(terminals.rx, t);
    std::vector<PathEndpoints> paths;
    for (const auto &sp : cluster.subpaths)
        paths.push_back(endpoints(cluster, sp));
    const std::vector<double> doppler =
        integrate_doppler(terminals, model.carrier, paths, {t}, model.options.doppler_substeps);
    complex sum = 0.0;
    const Vec3 shift = cluster.scatterer_velocity * t;
    for (std::size_t m = 0; m < cluster.subpaths.size(); ++m)
    {
        const SubPath &sp = cluster.subpaths[m];
        const PathGeometry g = nlos_geometry(tx.position, rx.position, sp.tx_scatterer + shift, sp.rx_scatterer + shift);
        sum += subpath_term(model.tx_array.elements[p], model.rx_array.elements[q], model, tx, rx, g, doppler[m],
                            nlos_factors(cluster, sp));
    }
    return sum * std::sqrt(1.0 / static_cast<double>(cluster.subpaths.size()));
}

complex CirSnapshot::at(int q_index, int p_index) const
{
    complex s = 0.0;
    for (const auto &tap : taps)
        s += tap.coefficients[static_cast<std::size_t>(q_index * p + p_index)];
    return s;
}

CirSnapshot cir_matrix(const ChannelModel &model, const Scene &scene, double t, std::optional<double> k_factor)
{
    const TerminalPair &terminals = scene.terminals;
    check_time(terminals, t);
    const int P = static_cast<int>(model.tx_array.size());
    const int Q = static_cast<int>(model.rx_array.size());
    const double k = k_factor ? *k_factor : sample_k_factor(scene.k_factor, t);
    if (!(k >= 0.0))
        throw std::invalid_argument("K-factor must be non-negative");
    const TapWeights w = tap_weights(k, model.options.component);

    CirSnapshot snap;
    snap.time = t;
    snap.q = Q;
    snap.p = P;
    snap.k_factor = k;

    const KinematicState tx = sample_state(terminals.tx, t);
    const KinematicState rx = sample_state(terminals.rx, t);
    const TerminalSample ts{tx.position, tx.velocity, rx.position, rx.velocity};

    // Doppler phases do not depend on the element pair; integrate each path once.
    std::vector<PathEndpoints> paths{PathEndpoints{}};
    for (const auto &c : scene.clusters.clusters)
        for (const auto &sp : c.subpaths)
            paths.push_back(endpoints(c, sp));
    const std::vector<double> doppler =
        integrate_doppler(terminals, model.carrier, paths, {t}, model.options.doppler_substeps);

    const PathGeometry los = los_geometry(tx.position, rx.position);
    Tap los_tap{los.length / model.carrier.c0(), std::vector<complex>(static_cast<std::size_t>(Q * P))};
    for (int q = 0; q < Q; ++q)
        for (int p = 0; p < P; ++p)
            los_tap.coefficients[static_cast<std::size_t>(q * P + p)] =
                w.los * subpath_term(model.tx_array.elements[p], model.rx_array.elements[q], model, tx, rx, los,
                                     doppler[0], los_factors(scene.clusters.los_init_phase));
    snap.taps.push_back(std::move(los_tap));

    std::size_t path = 1;
    for (const auto &c : scene.clusters.clusters)
    {
        Tap tap{cluster_delay_at(c, ts, t, model.carrier.c0()), std::vector<complex>(static_cast<std::size_t>(Q * P))};
        const double weight = c.alive ? w.nlos * std::sqrt(c.power / static_cast<double>(c.subpaths.size())) : 0.0;
        const Vec3 shift = c.scatterer_velocity * t;
        for (std::size_t m = 0; m < c.subpaths.size(); ++m, ++path)
        {
            if (weight == 0.0)
                continue;
            const SubPath &sp = c.subpaths[m];
            const PathGeometry g =
                nlos_geometry(tx.position, rx.position, sp.tx_scatterer + shift, sp.rx_scatterer + shift);
            for (int q = 0; q < Q; ++q)
                for (int p = 0; p < P; ++p)
                    tap.coefficients[static_cast<std::size_t>(q * P + p)] +=
                        weight * subpath_term(model.tx_array.elements[p], model.rx_array.elements[q], model, tx, rx,
                                              g, doppler[path], nlos_factors(c, sp));
        }
        snap.taps.push_back(std::move(tap));
    }
    return snap;
}

std::vector<complex> transfer_function(const CirSnapshot &snapshot, double f)
{
    std::vector<complex> out(static_cast<std::size_t>(snapshot.q * snapshot.p), 0.0);
    for (const auto &tap : snapshot.taps)
    {
        const complex phasor = std::polar(1.0, -two_pi * f * tap.delay);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += tap.coefficients[i] * phasor;
    }
    return out;
}

PathTracks::PathTracks(const ChannelModel &model, const Scene &scene, std::vector<double> times,
                       const PathTracks *doppler_source, const std::vector<double> &posture_times)
    : times_(std::move(times))
{
    const TerminalPair &terminals = scene.terminals;
    if (!posture_times.empty() && posture_times.size() != times_.size())
        throw std::invalid_argument("posture_times must match times");
    for (std::size_t i = 0; i < times_.size(); ++i)
    {
        check_time(terminals, times_[i]);
        if (i > 0 && times_[i] < times_[i - 1])
            throw std::invalid_argument("track times must be ascending");
    }
    const auto &clusters = scene.clusters.clusters;
    m_ = scene.clusters.subpaths_per_cluster();

    std::vector<PathEndpoints> paths{PathEndpoints{}};
    for (const auto &c : clusters)
    {
        if (static_cast<int>(c.subpaths.size()) != m_)
            throw std::invalid_argument("all clusters must have the same number of sub-paths");
        for (const auto &sp : c.subpaths)
            paths.push_back(endpoints(c, sp));
    }
    n_paths_ = paths.size();
    const std::size_t T = times_.size();
    if (doppler_source)
    {
        if (doppler_source->times_ != times_ || doppler_source->n_paths_ != n_paths_)
            throw std::invalid_argument("Doppler source tracks do not match this scene and time grid");
        doppler_ = doppler_source->doppler_;
    }
    else
        doppler_ = integrate_doppler(terminals, model.carrier, paths, times_, model.options.doppler_substeps);

    tx_local_.resize(n_paths_ * T);
    rx_local_.resize(n_paths_ * T);
    los_delay_.resize(T);
    cluster_delay_.resize(clusters.size() * T);
    k_.resize(T);
    const bool posture = model.options.posture_enabled;
    const double c0 = model.carrier.c0();
    for (std::size_t ti = 0; ti < T; ++ti)
    {
        const double t = times_[ti];
        KinematicState tx = sample_state(terminals.tx, t);
        const KinematicState rx = sample_state(terminals.rx, t);
        if (!posture_times.empty() && posture_times[ti] != t)
            tx.posture = sample_state(terminals.tx, posture_times[ti]).posture;
        const TerminalSample ts{tx.position, tx.velocity, rx.position, rx.velocity};
        const RotationMatrix3 tx_to_local = array_frame(tx, Side::tx, posture).transposed();
        const RotationMatrix3 rx_to_local = array_frame(rx, Side::rx, posture).transposed();

        const PathGeometry los = los_geometry(tx.position, rx.position);
        tx_local_[ti] = tx_to_local * los.s_tx;
        rx_local_[ti] = rx_to_local * los.s_rx;
        los_delay_[ti] = los.length / c0;

        std::size_t path = 1;
        for (std::size_t n = 0; n < clusters.size(); ++n)
        {
            const Cluster &c = clusters[n];
            const Vec3 shift = c.scatterer_velocity * t;
            cluster_delay_[n * T + ti] = cluster_delay_at(c, ts, t, c0);
            for (const auto &sp : c.subpaths)
            {
                const PathGeometry g =
                    nlos_geometry(tx.position, rx.position, sp.tx_scatterer + shift, sp.rx_scatterer + shift);
                tx_local_[path * T + ti] = tx_to_local * g.s_tx;
                rx_local_[path * T + ti] = rx_to_local * g.s_rx;
                ++path;
            }
        }
        k_[ti] = sample_k_factor(scene.k_factor, t);
    }
}

void PathTracks::drop_directions()
{
    std::vector<Vec3>().swap(tx_local_);
    std::vector<Vec3>().swap(rx_local_);
}

PairBasis::PairBasis(const ChannelModel &model, const Scene &scene, const PathTracks &tracks, const Vec3 &tx_element,
                     const Vec3 &rx_element)
    : n_times_(tracks.n_times()), n_paths_(tracks.n_paths())
{
    auto has_v = [](PatternKind k) { return k != PatternKind::isotropic_h; };
    auto has_h = [](PatternKind k) { return k == PatternKind::isotropic_h; };
    const PatternKind kt = model.tx_array.pattern.kind, kr = model.rx_array.pattern.kind;
    const std::array<bool, n_pol> possible{has_v(kt) && has_v(kr), has_v(kt) && has_h(kr), has_h(kt) && has_v(kr),
                                           has_h(kt) && has_h(kr)};
    for (int pol = 0; pol < n_pol; ++pol)
        slot_[static_cast<std::size_t>(pol)] = possible[static_cast<std::size_t>(pol)] ? static_cast<int>(n_slots_++) : -1;
    terms_.assign(n_paths_ * n_times_ * n_slots_, 0.0);
    path_active_.assign(n_paths_, false);
    const double k = model.carrier.wave_number();
    const double f = model.options.frequency;
    const auto &clusters = scene.clusters.clusters;
    const int M = tracks.subpaths_per_cluster();

    for (std::size_t path = 0; path < n_paths_; ++path)
    {
        const Cluster *cluster = path == 0 ? nullptr : &clusters[(path - 1) / static_cast<std::size_t>(M)];
        if (cluster && !cluster->alive)
            continue;
        for (std::size_t ti = 0; ti < n_times_; ++ti)
        {
            const TapWeights w = tap_weights(tracks.k_factor(ti), model.options.component);
            double weight, delay;
            if (cluster)
            {
                weight = w.nlos * std::sqrt(cluster->power / static_cast<double>(M));
                delay = tracks.cluster_delay((path - 1) / static_cast<std::size_t>(M), ti);
            }
            else
            {
                weight = w.los;
                delay = tracks.los_delay(ti);
            }
            if (weight == 0.0)
                continue;
            const Vec3 &s_tx = tracks.tx_local(path, ti);
            const Vec3 &s_rx = tracks.rx_local(path, ti);
            const auto products = pattern_products(model.tx_array.pattern(s_tx), model.rx_array.pattern(s_rx));
            const double phase = tracks.doppler(path, ti) + k * (tx_element.dot(s_tx) + rx_element.dot(s_rx)) -
                                 two_pi * f * delay;
            const complex e = std::polar(weight, phase);
            for (int pol = 0; pol < n_pol; ++pol)
            {
                if (products[pol] == 0.0 || slot_[pol] < 0)
                    continue;
                terms_[(path * n_times_ + ti) * n_slots_ + static_cast<std::size_t>(slot_[pol])] = e * products[pol];
            }
            path_active_[path] = true;
        }
    }
}

std::vector<std::array<complex, n_pol>> realization_factors(const ClusterSet &phases)
{
    std::vector<std::array<complex, n_pol>> out;
    out.push_back(los_factors(phases.los_init_phase));
    for (const auto &c : phases.clusters)
        for (const auto &sp : c.subpaths)
            out.push_back(nlos_factors(c, sp));
    return out;
}

std::vector<std::array<double, n_pol>> factor_power(const ClusterSet &set)
{
    std::vector<std::array<double, n_pol>> out;
    out.push_back({1.0, 0.0, 0.0, 1.0});
    for (const auto &c : set.clusters)
        for (const auto &sp : c.subpaths)
            out.push_back({1.0, 1.0 / sp.xpr, 1.0 / sp.xpr, 1.0});
    return out;
}

complex synthesize(const PairBasis &basis, const std::vector<std::array<complex, n_pol>> &factors, std::size_t ti)
{
    complex s = 0.0;
    for (std::size_t path = 0; path < basis.n_paths(); ++path)
    {
        if (!basis.path_active(path))
            continue;
        for (int pol = 0; pol < n_pol; ++pol)
            if (basis.pol_active(pol))
                s += factors[path][pol] * basis.term(path, ti, pol);
    }
    return s;
}

ChannelRealization synthesize_realization(const ChannelModel &model, const Scene &scene, const ClusterSet &phases,
                                          const std::vector<double> &times, Rng &birth_death_rng)
{
    const ModelOptions &opt = model.options;
    const bool evolving = opt.death_rate > 0.0 || opt.birth_rate > 0.0;

    // Cluster set at every time index; births append, deaths only clear `alive`.
    std::vector<ClusterSet> states;
    states.reserve(times.size());
    ClusterSet current = phases;
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        if (evolving && i > 0)
            current = birth_death_step(current, times[i] - times[i - 1], opt.death_rate, opt.birth_rate,
                                       birth_death_rng);
        states.push_back(current);
    }

    Scene full = scene;
    full.clusters = current;
    const PathTracks tracks(model, full, times);
    const int P = static_cast<int>(model.tx_array.size());
    const int Q = static_cast<int>(model.rx_array.size());
    const double k = model.carrier.wave_number();
    const std::size_t T = times.size();
    const int M = tracks.subpaths_per_cluster();

    ChannelRealization out;
    out.seed = scene.seed;
    out.snapshots.reserve(T);
    for (std::size_t ti = 0; ti < T; ++ti)
    {
        const ClusterSet &set = states[ti];
        const TapWeights w = tap_weights(tracks.k_factor(ti), opt.component);
        CirSnapshot snap;
        snap.time = times[ti];
        snap.q = Q;
        snap.p = P;
        snap.k_factor = tracks.k_factor(ti);

        auto path_term = [&](std::size_t path, const std::array<complex, n_pol> &factors, int q, int p) {
            const Vec3 &s_tx = tracks.tx_local(path, ti);
            const Vec3 &s_rx = tracks.rx_local(path, ti);
            const auto products = pattern_products(model.tx_array.pattern(s_tx), model.rx_array.pattern(s_rx));
            const double phase = tracks.doppler(path, ti) + k * (model.tx_array.elements[p].dot(s_tx) +
                                                                 model.rx_array.elements[q].dot(s_rx));
            return combine(factors, products) * std::polar(1.0, phase);
        };

        Tap los{tracks.los_delay(ti), std::vector<complex>(static_cast<std::size_t>(Q * P))};
        for (int q = 0; q < Q; ++q)
            for (int p = 0; p < P; ++p)
                los.coefficients[static_cast<std::size_t>(q * P + p)] =
                    w.los * path_term(0, los_factors(set.los_init_phase), q, p);
        snap.taps.push_back(std::move(los));

        for (std::size_t n = 0; n < current.clusters.size(); ++n)
        {
            Tap tap{tracks.cluster_delay(n, ti), std::vector<complex>(static_cast<std::size_t>(Q * P))};
            const bool born = n < set.clusters.size();
            const Cluster *c = born ? &set.clusters[n] : nullptr;
            if (c && c->alive && w.nlos != 0.0)
            {
                const double weight = w.nlos * std::sqrt(c->power / static_cast<double>(M));
                for (int m = 0; m < M; ++m)
                {
                    const std::size_t path = 1 + n * static_cast<std::size_t>(M) + static_cast<std::size_t>(m);
                    const auto factors = nlos_factors(*c, c->subpaths[static_cast<std::size_t>(m)]);
                    for (int q = 0; q < Q; ++q)
                        for (int p = 0; p < P; ++p)
                            tap.coefficients[static_cast<std::size_t>(q * P + p)] +=
                                weight * path_term(path, factors, q, p);
                }
            }
            snap.taps.push_back(std::move(tap));
        }
        out.snapshots.push_back(std::move(snap));
    }
    return out;
}

} // namespace u2v
