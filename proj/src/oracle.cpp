#include "sarms/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "sarms/error.hpp"

namespace sarms {

std::string to_string(Classification c)
{
    switch (c) {
    case Classification::true_point: return "true_point";
    case Classification::mirror: return "mirror";
    case Classification::extra: return "extra";
    }
    return "extra";
}

std::size_t OracleResult::count(Classification c) const
{
    return static_cast<std::size_t>(std::count_if(solutions.begin(), solutions.end(),
                                                  [c](const ArtefactSolution& a) { return a.classification == c; }));
}

namespace {

using Vec = std::array<double, 3>;

struct Antennas {
    Vec3 tx, rx;
    Vec3 tx_dir, rx_dir;  // unit aperture directions
};

Antennas antennas(double s, double r, const AcquisitionGeometry& g)
{
    Antennas a;
    a.tx = transmitter_position(g, s);
    a.rx = receiver_position(g, r);
    const Vec3 d1{g.delta(), 1.0, 0.0};
    a.tx_dir = d1 / norm(d1);
    a.rx_dir = {1.0, 0.0, 0.0};
    return a;
}

struct Signature {
    double range_sum;
    double tx_cos;
    double rx_cos;
};

std::optional<Signature> signature(const Vec3& p, const Antennas& a)
{
    const Vec3 ut = p - a.tx, ur = p - a.rx;
    const double nt = norm(ut), nr = norm(ur);
    if (nt < kFocusEps || nr < kFocusEps) return std::nullopt;
    return Signature{nt + nr, dot(ut, a.tx_dir) / nt, dot(ur, a.rx_dir) / nr};
}

// Residual vector scaled so the three components are commensurate. The
// transmitter cosine is rescaled by |(delta, 1, 0)| to match the scalar
// projection form used elsewhere, which keeps residual norms comparable.
struct Problem {
    Antennas ant;
    Signature ref;
    double L;
    double tx_scale;

    std::optional<Vec> residual(const Vec3& y) const
    {
        const auto sy = signature(y, ant);
        if (!sy) return std::nullopt;
        return Vec{(ref.range_sum - sy->range_sum) / L, tx_scale * (ref.tx_cos - sy->tx_cos), ref.rx_cos - sy->rx_cos};
    }
};

double norm2(const Vec& v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve3(std::array<Vec, 3> m, Vec b, Vec& out)
{
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (std::abs(m[piv][c]) < 1e-300) return false;
        std::swap(m[c], m[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < 3; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 3; ++k) m[r][k] -= f * m[c][k];
            b[r] -= f * b[c];
        }
    }
    for (int c = 2; c >= 0; --c) {
        double acc = b[c];
        for (int k = c + 1; k < 3; ++k) acc -= m[c][k] * out[k];
        out[c] = acc / m[c][c];
    }
    return true;
}

struct Refined {
    Vec3 y;
    double norm;
};

// Damped Gauss-Newton with a central-difference Jacobian. Throws
// NoConvergence when the iteration budget is exhausted while still making
// progress; returns the stalled point otherwise.
Refined refine(const Problem& pb, Vec3 y, double fd_step, double tol, std::size_t max_iter)
{
    auto F = pb.residual(y);
    if (!F) return {y, std::numeric_limits<double>::infinity()};
    double f2 = norm2(*F);
    const double target2 = (0.01 * tol) * (0.01 * tol);

    for (std::size_t it = 0; it < max_iter; ++it) {
        if (f2 < target2) return {y, std::sqrt(f2)};

        std::array<Vec, 3> J{};
        for (int c = 0; c < 3; ++c) {
            Vec3 yp = y, ym = y;
            yp[c] += fd_step;
            ym[c] -= fd_step;
            const auto fp = pb.residual(yp), fm = pb.residual(ym);
            if (!fp || !fm) return {y, std::sqrt(f2)};
            for (int r = 0; r < 3; ++r) J[r][c] = ((*fp)[r] - (*fm)[r]) / (2.0 * fd_step);
        }
        Vec step{};
        Vec rhs{-(*F)[0], -(*F)[1], -(*F)[2]};
        if (!solve3(J, rhs, step)) return {y, std::sqrt(f2)};

        double lambda = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings < 40; ++halvings, lambda *= 0.5) {
            const Vec3 cand{y.x + lambda * step[0], y.y + lambda * step[1], y.z + lambda * step[2]};
            const auto Fc = pb.residual(cand);
            if (Fc && norm2(*Fc) < f2) {
                y = cand;
                F = Fc;
                f2 = norm2(*Fc);
                accepted = true;
                break;
            }
        }
        if (!accepted) return {y, std::sqrt(f2)};
    }
    if (f2 < tol * tol) return {y, std::sqrt(f2)};
    throw NoConvergence("refinement exceeded its iteration budget");
}

}  // namespace

double oracle_residual_norm(const Vec3& x, const Vec3& y, double s, double r, const AcquisitionGeometry& g,
                            double length_scale)
{
    Problem pb;
    pb.ant = antennas(s, r, g);
    const auto ref = signature(x, pb.ant);
    if (!ref) throw DegenerateGeometry("reference point coincides with an antenna position");
    pb.ref = *ref;
    pb.L = length_scale > 0.0 ? length_scale : ref->range_sum;
    pb.tx_scale = std::sqrt(1.0 + g.delta() * g.delta());
    const auto F = pb.residual(y);
    if (!F) throw DegenerateGeometry("candidate point coincides with an antenna position");
    return std::sqrt(norm2(*F));
}

OracleResult find_artifacts(const Vec3& x, double s, double r, const AcquisitionGeometry& g,
                            const Box& box, const OracleOptions& opt)
{
    if (opt.grid_n < 16) throw std::invalid_argument("oracle lattice needs grid_n >= 16");
    if (!(opt.tol > 0.0)) throw std::invalid_argument("oracle tolerance must be positive");
    if (box.empty()) throw EmptyRoi("search box has non-positive extent");
    if (!box.contains(x)) throw std::invalid_argument("reference point lies outside the search box");

    const EllipseFrame frame = ellipse_frame(g, s, r);

    Problem pb;
    pb.ant = antennas(s, r, g);
    const auto ref = signature(x, pb.ant);
    if (!ref) throw DegenerateGeometry("reference point coincides with an antenna position");
    pb.ref = *ref;
    pb.L = opt.length_scale > 0.0 ? opt.length_scale : ref->range_sum;
    pb.tx_scale = std::sqrt(1.0 + g.delta() * g.delta());

    const std::size_t n = opt.grid_n;
    const Vec3 ext = box.hi - box.lo;
    const Vec3 h = ext / static_cast<double>(n - 1);
    const double cell_diag = norm(h);
    const double cluster_radius = opt.cluster_radius > 0.0 ? opt.cluster_radius : 1e-4 * norm(ext);
    const double fd_step = 1e-6 * norm(ext);

    OracleResult result;
    auto& diag = result.diagnostics;
    diag.lattice_points = n * n * n;
    diag.cell_diagonal = cell_diag;
    diag.cluster_radius = cluster_radius;

    auto lattice_point = [&](std::size_t i, std::size_t j, std::size_t k) {
        return Vec3{box.lo.x + h.x * static_cast<double>(i), box.lo.y + h.y * static_cast<double>(j),
                    box.lo.z + h.z * static_cast<double>(k)};
    };
    auto idx = [n](std::size_t i, std::size_t j, std::size_t k) { return (i * n + j) * n + k; };

    std::vector<double> field(n * n * n);
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < nn; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                const auto F = pb.residual(lattice_point(static_cast<std::size_t>(i), j, k));
                field[idx(static_cast<std::size_t>(i), j, k)] =
                    F ? std::sqrt(norm2(*F)) : std::numeric_limits<double>::infinity();
            }
        }
    }

    // Seeds: lattice points not exceeded by any of their 26 neighbours.
    std::vector<Vec3> seeds;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                const double v = field[idx(i, j, k)];
                if (!std::isfinite(v)) continue;
                bool is_min = true;
                for (int di = -1; di <= 1 && is_min; ++di) {
                    for (int dj = -1; dj <= 1 && is_min; ++dj) {
                        for (int dk = -1; dk <= 1; ++dk) {
                            if (di == 0 && dj == 0 && dk == 0) continue;
                            const long long a = static_cast<long long>(i) + di;
                            const long long b = static_cast<long long>(j) + dj;
                            const long long c = static_cast<long long>(k) + dk;
                            if (a < 0 || b < 0 || c < 0 || a >= nn || b >= nn || c >= nn) continue;
                            if (field[idx(static_cast<std::size_t>(a), static_cast<std::size_t>(b),
                                          static_cast<std::size_t>(c))] < v) {
                                is_min = false;
                                break;
                            }
                        }
                    }
                }
                if (is_min) seeds.push_back(lattice_point(i, j, k));
            }
        }
    }
    diag.seeds = seeds.size();

    struct Outcome {
        bool ok = false;
        bool no_conv = false;
        Refined sol{};
    };
    std::vector<Outcome> outcomes(seeds.size());
    const long long ns = static_cast<long long>(seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (long long q = 0; q < ns; ++q) {
        Outcome& o = outcomes[static_cast<std::size_t>(q)];
        try {
            o.sol = refine(pb, seeds[static_cast<std::size_t>(q)], fd_step, opt.tol, opt.max_iterations);
            o.ok = true;
        } catch (const NoConvergence&) {
            o.no_conv = true;
        }
    }

    // Accept converged points inside the box (padded by one cell).
    std::vector<Refined> roots;
    const Box padded{box.lo - h, box.hi + h};
    for (const auto& o : outcomes) {
        if (o.no_conv) {
            ++diag.no_convergence;
            continue;
        }
        if (!o.ok) continue;
        if (o.sol.norm < opt.tol && padded.contains(o.sol.y)) {
            ++diag.converged;
            roots.push_back(o.sol);
        } else {
            ++diag.stalled;
        }
    }

    std::sort(roots.begin(), roots.end(), [](const Refined& a, const Refined& b) { return a.norm < b.norm; });
    const Vec3 xm = mirror(x, g.z0);
    for (const auto& root : roots) {
        const bool merged = std::any_of(result.solutions.begin(), result.solutions.end(),
                                        [&](const ArtefactSolution& c) { return distance(c.y, root.y) < cluster_radius; });
        if (merged) continue;
        ArtefactSolution sol;
        sol.y = root.y;
        sol.residual_norm = root.norm;
        if (distance(root.y, x) < cluster_radius)
            sol.classification = Classification::true_point;
        else if (distance(root.y, xm) < cluster_radius)
            sol.classification = Classification::mirror;
        else
            sol.classification = Classification::extra;
        const ProlatePoint pp = to_prolate(to_local(root.y, frame), frame.D);
        sol.degenerate_band = std::sin(pp.phi) < opt.degenerate_sin_phi;
        result.solutions.push_back(sol);
    }
    return result;
}

Box ellipsoid_search_box(const Vec3& x, double s, double r, const AcquisitionGeometry& g, double pad)
{
    const EllipseFrame f = ellipse_frame(g, s, r);
    const double sum = distance(x, transmitter_position(g, s)) + distance(x, receiver_position(g, r));
    // Semi-major axis of the ellipsoid through x is half the range sum.
    const double a = pad * 0.5 * sum;
    return Box{{f.center.x - a, f.center.y - a, g.z0 - a}, {f.center.x + a, f.center.y + a, g.z0 + a}};
}

std::vector<ScanRow> artefact_scan(const AcquisitionGeometry& g, double s, double r,
                                   const std::vector<double>& rho_values, double phi, double theta,
                                   const OracleOptions& opt)
{
    if (!std::is_sorted(rho_values.begin(), rho_values.end()))
        throw std::invalid_argument("rho values must be sorted ascending");
    const EllipseFrame f = ellipse_frame(g, s, r);
    std::vector<ScanRow> rows;
    rows.reserve(rho_values.size());
    for (const double rho : rho_values) {
        ScanRow row;
        row.rho = rho;
        row.x = from_local(from_prolate({rho, phi, theta}, f.D), f);
        const Box box = ellipsoid_search_box(row.x, s, r, g);
        const OracleResult res = find_artifacts(row.x, s, r, g, box, opt);
        row.n_solutions = res.solutions.size();
        for (const auto& sol : res.solutions) {
            if (sol.classification == Classification::extra) {
                ++row.n_extra;
                if (sol.degenerate_band) ++row.n_extra_degenerate;
            }
            row.has_true_point |= sol.classification == Classification::true_point;
            row.has_mirror |= sol.classification == Classification::mirror;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sarms
