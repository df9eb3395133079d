#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "sarms/geometry.hpp"
#include "sarms/vec3.hpp"

namespace sarms {

inline constexpr double kFocusEps = 1e-9;

/// Left-minus-right of the three scalar equations whose common solutions y
/// are the points whose data singularities coincide with those of x.
struct ResidualTriple {
    double R1 = 0.0;  // bistatic range sum mismatch [m]
    double R2 = 0.0;  // transmitter direction-cosine mismatch
    double R3 = 0.0;  // receiver direction-cosine mismatch
};

ResidualTriple intersection_residuals(const Vec3& x, const Vec3& y, double s, double r,
                                      const AcquisitionGeometry& g);

struct AbcTriple {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
};

AbcTriple abc(double phi, double theta, double phi_p, double theta_p);

/// Determinant of the linear system for (A, B, C), valid for any line angle.
double determinant(double rho, double alpha, double phi_p, double theta_p, double delta);
/// Same determinant written for perpendicular apertures (delta = 0).
double determinant_perpendicular(double rho, double alpha, double phi_p, double theta_p);
/// Explicit lower bound used to prove positivity.
double determinant_lower_bound(double rho, double delta);

/// Sufficient bound for perpendicular apertures: Delta > 0 whenever rho > ln 6.
inline const double rho_min_perpendicular_ln6 = std::log(6.0);
inline constexpr double kRhoMargin = 1e-6;

/// ln(5 + 8|delta|) + margin: for any rho at or above this value Delta > 0.
double rho_min(double delta, double margin = kRhoMargin);

double rho_of_point(const Vec3& x, double s, double r, const AcquisitionGeometry& g);

/// Earliest admissible fast time (seconds) for a pair.
double min_gate_time(double s, double r, const AcquisitionGeometry& g, double rho_min);

struct Box {
    Vec3 lo;
    Vec3 hi;
    bool empty() const { return !(hi.x > lo.x && hi.y > lo.y && hi.z > lo.z); }
    Vec3 center() const { return (lo + hi) * 0.5; }
    bool contains(const Vec3& p) const
    {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
    }
};

struct GatingEntry {
    double s = 0.0;
    double r = 0.0;
    std::size_t j = 0;
    std::size_t k = 0;
    double D = 0.0;
    double t_min = 0.0;
    bool roi_compliant = false;
    double min_rho = 0.0;  // minimum of rho over the ROI for this pair
};

struct GatingReport {
    double rho_min = 0.0;
    std::size_t n_tx = 0;
    std::size_t n_rx = 0;
    std::vector<GatingEntry> entries;  // index j * n_rx + k
    double global_min_rho_over_roi = 0.0;
    bool plane_warning = false;  // ROI reaches the transceiver plane

    const GatingEntry& at(std::size_t j, std::size_t k) const { return entries[j * n_rx + k]; }
    std::size_t n_compliant() const;
};

struct RoiSampling {
    std::size_t per_face = 32;  // samples per edge of each face grid
};

/// Minimum of rho over an axis-aligned box for one pair.
double min_rho_over_box(const Box& roi, double s, double r, const AcquisitionGeometry& g,
                        std::size_t per_face = 32);

/// Throws EmptyRoi for a degenerate box.
GatingReport roi_gating_report(const AcquisitionGeometry& g, const Box& roi, double rho_min,
                               RoiSampling sampling = {});

/// Report that applies only the fast-time gate: every pair is marked compliant.
GatingReport fast_time_report(const AcquisitionGeometry& g, double rho_min);

/// Smallest rho on a bisection grid at which every sampled determinant is positive.
double empirical_rho_threshold(double delta, std::size_t n_samples, unsigned seed = 12345,
                               double tol = 1e-6);

struct DeltaSweepRow {
    double rho = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_nonpositive = 0;
    double min_delta = 0.0;
};

/// Samples Delta on random (alpha, phi', theta') at a fixed rho.
DeltaSweepRow determinant_sweep(double delta, double rho, std::size_t n_samples, unsigned seed = 12345);

}  // namespace sarms
