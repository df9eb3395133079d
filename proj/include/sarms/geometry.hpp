#pragma once

#include <cstddef>
#include <vector>

#include "sarms/vec3.hpp"

namespace sarms {

/// Two straight-line apertures lying in the horizontal plane z = z0.
///
/// The transmitter travels along gamma1(s) = (2 s cot(beta), 2 s, z0) and the
/// receiver along gamma2(r) = (2 r, 0, z0); beta is the angle between the two
/// lines. Slow-time samples are spread uniformly over the closed intervals
/// [s_min, s_max] and [r_min, r_max].
struct AcquisitionGeometry {
    double beta = 1.5707963267948966;
    double z0 = 0.0;
    double s_min = 0.0;
    double s_max = 1.0;
    double r_min = 0.0;
    double r_max = 1.0;
    std::size_t n_tx = 1;
    std::size_t n_rx = 1;

    /// Throws std::invalid_argument when any invariant is violated.
    void validate() const;

    double delta() const;  // cot(beta)

    double s_at(std::size_t j) const;
    double r_at(std::size_t k) const;
    std::vector<double> s_samples() const;
    std::vector<double> r_samples() const;
};

Vec3 transmitter_position(const AcquisitionGeometry& g, double s);
Vec3 receiver_position(const AcquisitionGeometry& g, double r);

inline constexpr double kDefaultEpsD = 1e-12;

/// Frame attached to the ellipsoid of constant bistatic range for one (s, r)
/// pair: origin at the foci midpoint, first axis through the foci.
struct EllipseFrame {
    double delta = 0.0;
    double alpha = 0.0;
    double D = 0.0;
    Vec3 center;
    double z0 = 0.0;
    double s = 0.0;
    double r = 0.0;
};

/// Throws DegenerateGeometry when the half focal distance is below eps_D.
EllipseFrame ellipse_frame(const AcquisitionGeometry& g, double s, double r,
                           double eps_D = kDefaultEpsD);

Vec3 to_local(const Vec3& x, const EllipseFrame& frame);
Vec3 from_local(const Vec3& xl, const EllipseFrame& frame);

struct ProlatePoint {
    double rho = 0.0;
    double phi = 0.0;
    double theta = 0.0;
};

inline constexpr double kProlateThetaEps = 1e-14;

/// Prolate spheroidal coordinates of a local point with foci (+-D, 0, 0).
/// Throws DegenerateGeometry for D <= 0.
ProlatePoint to_prolate(const Vec3& xl, double D);
Vec3 from_prolate(const ProlatePoint& p, double D);

}  // namespace sarms
