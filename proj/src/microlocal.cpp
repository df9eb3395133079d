#include "sarms/microlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "sarms/constants.hpp"
#include "sarms/error.hpp"

namespace sarms {

ResidualTriple intersection_residuals(const Vec3& x, const Vec3& y, double s, double r,
                                      const AcquisitionGeometry& g)
{
    const Vec3 t = transmitter_position(g, s);
    const Vec3 q = receiver_position(g, r);
    const double xt = distance(x, t), xq = distance(x, q);
    const double yt = distance(y, t), yq = distance(y, q);
    if (xt < kFocusEps || xq < kFocusEps || yt < kFocusEps || yq < kFocusEps)
        throw DegenerateGeometry("point coincides with an antenna position");

    const double d = g.delta();
    // Projections onto the (unnormalised) aperture directions (delta, 1, 0)
    // and (1, 0, 0), divided by the distance to the respective antenna.
    auto tx_cos = [&](const Vec3& p, double dist) {
        return (d * (p.x - 2.0 * s * d) + (p.y - 2.0 * s)) / dist;
    };
    auto rx_cos = [&](const Vec3& p, double dist) { return (p.x - 2.0 * r) / dist; };

    ResidualTriple out;
    out.R1 = (xt + xq) - (yt + yq);
    out.R2 = tx_cos(x, xt) - tx_cos(y, yt);
    out.R3 = rx_cos(x, xq) - rx_cos(y, yq);
    return out;
}

AbcTriple abc(double phi, double theta, double phi_p, double theta_p)
{
    AbcTriple t;
    t.A = std::cos(phi) - std::cos(phi_p);
    t.B = std::sin(phi) * std::cos(theta) - std::sin(phi_p) * std::cos(theta_p);
    t.C = std::sin(phi_p) * std::cos(theta_p) * std::cos(phi) - std::sin(phi) * std::cos(phi_p) * std::cos(theta);
    return t;
}

double determinant(double rho, double alpha, double phi_p, double theta_p, double delta)
{
    const double ch = std::cosh(rho), sh = std::sinh(rho);
    const double s2 = std::sin(2.0 * alpha), c2 = std::cos(2.0 * alpha);
    const double sa = std::sin(alpha);
    return ch * sh + sh * std::cos(phi_p) * (delta * s2 + c2) +
           ch * std::sin(phi_p) * std::cos(theta_p) * (s2 + 2.0 * delta * sa * sa);
}

double determinant_perpendicular(double rho, double alpha, double phi_p, double theta_p)
{
    const double ch = std::cosh(rho), sh = std::sinh(rho);
    return ch * sh + sh * std::cos(2.0 * alpha) * std::cos(phi_p) +
           ch * std::sin(2.0 * alpha) * std::sin(phi_p) * std::cos(theta_p);
}

double determinant_lower_bound(double rho, double delta)
{
    const double ch = std::cosh(rho), sh = std::sinh(rho);
    const double ad = std::abs(delta);
    return ch * sh - (1.0 + ad) * sh - (1.0 + 2.0 * ad) * ch;
}

double rho_min(double delta, double margin)
{
    return std::log(5.0 + 8.0 * std::abs(delta)) + margin;
}

double rho_of_point(const Vec3& x, double s, double r, const AcquisitionGeometry& g)
{
    const EllipseFrame f = ellipse_frame(g, s, r);
    const double sum = distance(x, transmitter_position(g, s)) + distance(x, receiver_position(g, r));
    return std::acosh(std::max(1.0, sum / (2.0 * f.D)));
}

double min_gate_time(double s, double r, const AcquisitionGeometry& g, double rho_min_value)
{
    const EllipseFrame f = ellipse_frame(g, s, r);
    return 2.0 * f.D / kSpeedOfLight * std::cosh(rho_min_value);
}

std::size_t GatingReport::n_compliant() const
{
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const GatingEntry& e) { return e.roi_compliant; }));
}

namespace {

// Slab test for the closed segment [a, b] against a closed box.
bool segment_hits_box(const Vec3& a, const Vec3& b, const Box& box)
{
    double t0 = 0.0, t1 = 1.0;
    for (int ax = 0; ax < 3; ++ax) {
        const double d = b[ax] - a[ax];
        if (std::abs(d) < 1e-300) {
            if (a[ax] < box.lo[ax] || a[ax] > box.hi[ax]) return false;
            continue;
        }
        double u0 = (box.lo[ax] - a[ax]) / d;
        double u1 = (box.hi[ax] - a[ax]) / d;
        if (u0 > u1) std::swap(u0, u1);
        t0 = std::max(t0, u0);
        t1 = std::min(t1, u1);
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace

double min_rho_over_box(const Box& roi, double s, double r, const AcquisitionGeometry& g, std::size_t per_face)
{
    const EllipseFrame f = ellipse_frame(g, s, r);
    const Vec3 t = transmitter_position(g, s);
    const Vec3 q = receiver_position(g, r);
    // rho vanishes on the focal segment, and an interior minimum of the range
    // sum can only occur there; otherwise the minimum lies on the boundary.
    if (segment_hits_box(t, q, roi)) return 0.0;

    const std::size_t n = std::max<std::size_t>(per_face, 2);
    double best = std::numeric_limits<double>::infinity();
    double slack = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
        const int u = (ax + 1) % 3, v = (ax + 2) % 3;
        const double du = (roi.hi[u] - roi.lo[u]) / static_cast<double>(n - 1);
        const double dv = (roi.hi[v] - roi.lo[v]) / static_cast<double>(n - 1);
        // The range sum is 2-Lipschitz, and every face point is within half a
        // cell diagonal of a sample: subtracting a full diagonal keeps the
        // sampled minimum a guaranteed lower bound.
        slack = std::max(slack, std::hypot(du, dv));
        for (int side = 0; side < 2; ++side) {
            Vec3 p;
            p[ax] = side == 0 ? roi.lo[ax] : roi.hi[ax];
            for (std::size_t a = 0; a < n; ++a) {
                p[u] = roi.lo[u] + du * static_cast<double>(a);
                for (std::size_t b = 0; b < n; ++b) {
                    p[v] = roi.lo[v] + dv * static_cast<double>(b);
                    best = std::min(best, distance(p, t) + distance(p, q));
                }
            }
        }
    }
    const double sum = std::max(2.0 * f.D, best - slack);
    return std::acosh(sum / (2.0 * f.D));
}

GatingReport roi_gating_report(const AcquisitionGeometry& g, const Box& roi, double rho_min_value,
                               RoiSampling sampling)
{
    g.validate();
    if (roi.empty()) throw EmptyRoi("region of interest has non-positive extent");

    GatingReport rep;
    rep.rho_min = rho_min_value;
    rep.n_tx = g.n_tx;
    rep.n_rx = g.n_rx;
    rep.plane_warning = roi.lo.z <= g.z0 && roi.hi.z >= g.z0;
    rep.entries.resize(g.n_tx * g.n_rx);

    const long long total = static_cast<long long>(rep.entries.size());
#pragma omp parallel for schedule(dynamic)
    for (long long idx = 0; idx < total; ++idx) {
        const std::size_t j = static_cast<std::size_t>(idx) / g.n_rx;
        const std::size_t k = static_cast<std::size_t>(idx) % g.n_rx;
        GatingEntry& e = rep.entries[static_cast<std::size_t>(idx)];
        e.j = j;
        e.k = k;
        e.s = g.s_at(j);
        e.r = g.r_at(k);
        e.D = ellipse_frame(g, e.s, e.r).D;
        e.t_min = min_gate_time(e.s, e.r, g, rho_min_value);
        e.min_rho = min_rho_over_box(roi, e.s, e.r, g, sampling.per_face);
        e.roi_compliant = e.min_rho > rho_min_value;
    }
    rep.global_min_rho_over_roi = std::numeric_limits<double>::infinity();
    for (const auto& e : rep.entries) rep.global_min_rho_over_roi = std::min(rep.global_min_rho_over_roi, e.min_rho);
    return rep;
}

GatingReport fast_time_report(const AcquisitionGeometry& g, double rho_min_value)
{
    g.validate();
    GatingReport rep;
    rep.rho_min = rho_min_value;
    rep.n_tx = g.n_tx;
    rep.n_rx = g.n_rx;
    rep.entries.resize(g.n_tx * g.n_rx);
    for (std::size_t j = 0; j < g.n_tx; ++j) {
        for (std::size_t k = 0; k < g.n_rx; ++k) {
            GatingEntry& e = rep.entries[j * g.n_rx + k];
            e.j = j;
            e.k = k;
            e.s = g.s_at(j);
            e.r = g.r_at(k);
            e.D = ellipse_frame(g, e.s, e.r).D;
            e.t_min = min_gate_time(e.s, e.r, g, rho_min_value);
            e.roi_compliant = true;
            e.min_rho = std::numeric_limits<double>::infinity();
        }
    }
    rep.global_min_rho_over_roi = std::numeric_limits<double>::infinity();
    return rep;
}

namespace {

struct AngleSample {
    double alpha, phi_p, theta_p;
};

std::vector<AngleSample> draw_angles(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ua(0.0, 2.0 * kPi), up(0.0, kPi);
    std::vector<AngleSample> out(n);
    for (auto& a : out) {
        a.alpha = ua(rng);
        a.phi_p = up(rng);
        a.theta_p = ua(rng);
    }
    return out;
}

double min_over(const std::vector<AngleSample>& samples, double rho, double delta)
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& a : samples) m = std::min(m, determinant(rho, a.alpha, a.phi_p, a.theta_p, delta));
    return m;
}

}  // namespace

DeltaSweepRow determinant_sweep(double delta, double rho, std::size_t n_samples, unsigned seed)
{
    const auto samples = draw_angles(n_samples, seed);
    DeltaSweepRow row;
    row.rho = rho;
    row.n_samples = n_samples;
    row.min_delta = std::numeric_limits<double>::infinity();
    for (const auto& a : samples) {
        const double v = determinant(rho, a.alpha, a.phi_p, a.theta_p, delta);
        row.min_delta = std::min(row.min_delta, v);
        if (!(v > 0.0)) ++row.n_nonpositive;
    }
    return row;
}

double empirical_rho_threshold(double delta, std::size_t n_samples, unsigned seed, double tol)
{
    const auto samples = draw_angles(n_samples, seed);
    double lo = 0.0, hi = rho_min(delta, 0.0);
    while (min_over(samples, hi, delta) <= 0.0) hi *= 2.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (min_over(samples, mid, delta) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace sarms
