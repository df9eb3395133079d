#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sarms/geometry.hpp"
#include "sarms/microlocal.hpp"
#include "sarms/vec3.hpp"

namespace sarms {

enum class Classification { true_point, mirror, extra };

std::string to_string(Classification c);

struct ArtefactSolution {
    Vec3 y;
    double residual_norm = 0.0;
    Classification classification = Classification::extra;
    bool degenerate_band = false;  // y lies near the focal axis (sin(phi') small)
};

struct OracleOptions {
    std::size_t grid_n = 48;
    double tol = 1e-8;
    double cluster_radius = 0.0;   // <= 0 selects 1e-4 of the search-box diagonal
    double length_scale = 0.0;     // <= 0 selects the bistatic range of x
    std::size_t max_iterations = 100;
    double degenerate_sin_phi = 1e-3;
};

struct OracleDiagnostics {
    std::size_t lattice_points = 0;
    std::size_t seeds = 0;
    std::size_t converged = 0;
    std::size_t no_convergence = 0;  // seeds dropped after exhausting the iteration budget
    std::size_t stalled = 0;         // seeds that settled in a non-zero local minimum
    double cell_diagonal = 0.0;
    double cluster_radius = 0.0;
};

struct OracleResult {
    std::vector<ArtefactSolution> solutions;
    OracleDiagnostics diagnostics;

    std::size_t count(Classification c) const;
};

/// Normalised residual sqrt(R1^2/L^2 + R2^2 + R3^2), evaluated with the oracle's
/// own geometry code (unit direction vectors instead of scalar projections).
double oracle_residual_norm(const Vec3& x, const Vec3& y, double s, double r, const AcquisitionGeometry& g,
                            double length_scale);

/// Every y in search_box solving the three intersection equations for x.
OracleResult find_artifacts(const Vec3& x, double s, double r, const AcquisitionGeometry& g,
                            const Box& search_box, const OracleOptions& opt = {});

/// Box that contains the whole ellipsoid of constant bistatic range through x.
Box ellipsoid_search_box(const Vec3& x, double s, double r, const AcquisitionGeometry& g, double pad = 1.05);

struct ScanRow {
    double rho = 0.0;
    Vec3 x;
    std::size_t n_solutions = 0;
    std::size_t n_extra = 0;
    std::size_t n_extra_degenerate = 0;
    bool has_true_point = false;
    bool has_mirror = false;
};

/// Places x at each prolate radius (phi, theta fixed) and counts extra solutions.
std::vector<ScanRow> artefact_scan(const AcquisitionGeometry& g, double s, double r,
                                   const std::vector<double>& rho_values, double phi = 1.0,
                                   double theta = 4.0, const OracleOptions& opt = {});

}  // namespace sarms
