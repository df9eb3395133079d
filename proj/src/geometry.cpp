#include "sarms/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sarms/constants.hpp"
#include "sarms/error.hpp"

namespace sarms {

void AcquisitionGeometry::validate() const
{
    if (!(beta > 0.0 && beta < kPi))
        throw std::invalid_argument("beta must lie strictly between 0 and pi, got " + std::to_string(beta));
    if (!std::isfinite(z0))
        throw std::invalid_argument("plane altitude must be finite");
    if (!(s_max > s_min))
        throw std::invalid_argument("transmitter extent requires s_max > s_min");
    if (!(r_max > r_min))
        throw std::invalid_argument("receiver extent requires r_max > r_min");
    if (n_tx < 1 || n_rx < 1)
        throw std::invalid_argument("sample counts must be positive");
}

double AcquisitionGeometry::delta() const
{
    return std::cos(beta) / std::sin(beta);
}

namespace {

double linspace_at(double lo, double hi, std::size_t n, std::size_t i)
{
    if (n == 1) return 0.5 * (lo + hi);
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    return lo + t * (hi - lo);
}

}  // namespace

double AcquisitionGeometry::s_at(std::size_t j) const { return linspace_at(s_min, s_max, n_tx, j); }
double AcquisitionGeometry::r_at(std::size_t k) const { return linspace_at(r_min, r_max, n_rx, k); }

std::vector<double> AcquisitionGeometry::s_samples() const
{
    std::vector<double> out(n_tx);
    for (std::size_t j = 0; j < n_tx; ++j) out[j] = s_at(j);
    return out;
}

std::vector<double> AcquisitionGeometry::r_samples() const
{
    std::vector<double> out(n_rx);
    for (std::size_t k = 0; k < n_rx; ++k) out[k] = r_at(k);
    return out;
}

Vec3 transmitter_position(const AcquisitionGeometry& g, double s)
{
    return {2.0 * s * g.delta(), 2.0 * s, g.z0};
}

Vec3 receiver_position(const AcquisitionGeometry& g, double r)
{
    return {2.0 * r, 0.0, g.z0};
}

EllipseFrame ellipse_frame(const AcquisitionGeometry& g, double s, double r, double eps_D)
{
    EllipseFrame f;
    f.delta = g.delta();
    f.s = s;
    f.r = r;
    f.z0 = g.z0;
    const double u = r - s * f.delta;
    f.D = std::sqrt(s * s + u * u);
    if (!(f.D >= eps_D))
        throw DegenerateGeometry("transmitter and receiver coincide (D = " + std::to_string(f.D) + ")");
    f.alpha = std::atan2(s, u);
    f.center = {s * f.delta + r, s, g.z0};
    return f;
}

// The rotation by alpha about the vertical axis sends the receiver focus to
// +x and the transmitter focus to -x.
Vec3 to_local(const Vec3& x, const EllipseFrame& f)
{
    const double ca = std::cos(f.alpha);
    const double sa = std::sin(f.alpha);
    const double dx = x.x - f.center.x;
    const double dy = x.y - f.center.y;
    return {ca * dx - sa * dy, sa * dx + ca * dy, x.z - f.z0};
}

Vec3 from_local(const Vec3& xl, const EllipseFrame& f)
{
    const double ca = std::cos(f.alpha);
    const double sa = std::sin(f.alpha);
    return {f.center.x + ca * xl.x + sa * xl.y, f.center.y - sa * xl.x + ca * xl.y, xl.z + f.z0};
}

ProlatePoint to_prolate(const Vec3& xl, double D)
{
    if (!(D > 0.0)) throw DegenerateGeometry("prolate coordinates need D > 0");
    const double dm = norm(xl - Vec3{-D, 0.0, 0.0});
    const double dp = norm(xl - Vec3{D, 0.0, 0.0});
    ProlatePoint p;
    const double ch = std::max(1.0, (dm + dp) / (2.0 * D));
    p.rho = std::acosh(ch);
    const double cphi = std::clamp((dm - dp) / (2.0 * D), -1.0, 1.0);
    const double sh = std::sinh(p.rho);
    if (sh > 1e-6) {
        // atan2 keeps full precision near the focal axis where acos does not.
        const double transverse = std::hypot(xl.y, xl.z);
        p.phi = std::atan2(transverse / (D * sh), xl.x / (D * ch));
    } else {
        p.phi = std::acos(cphi);
    }
    if (sh * std::sin(p.phi) < kProlateThetaEps) {
        p.theta = 0.0;
    } else {
        double th = std::atan2(xl.z, xl.y);
        if (th < 0.0) th += 2.0 * kPi;
        if (th >= 2.0 * kPi) th = 0.0;
        p.theta = th;
    }
    return p;
}

Vec3 from_prolate(const ProlatePoint& p, double D)
{
    const double sr = std::sinh(p.rho);
    return {D * std::cosh(p.rho) * std::cos(p.phi),
            D * sr * std::sin(p.phi) * std::cos(p.theta),
            D * sr * std::sin(p.phi) * std::sin(p.theta)};
}

}  // namespace sarms
