#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "sarms/microlocal.hpp"
#include "sarms/oracle.hpp"
#include "test_util.hpp"

using namespace sarms;
using testutil::geometry;

namespace {

// Symmetric box about the transceiver plane so both x and its mirror fit.
Box plane_symmetric_box(double half, double z0)
{
    return Box{{-half, -half, z0 - half}, {half, half, z0 + half}};
}

}  // namespace

TEST_CASE("perpendicular example: exactly the true point and its mirror")
{
    const auto g = geometry(90.0, 0.0);
    const Vec3 x{1.0, 1.0, -5.0};
    const auto res = find_artifacts(x, 1.0, 1.0, g, plane_symmetric_box(10.0, 0.0));
    REQUIRE(res.solutions.size() == 2);
    CHECK(res.count(Classification::true_point) == 1);
    CHECK(res.count(Classification::mirror) == 1);
    CHECK(res.count(Classification::extra) == 0);
    for (const auto& s : res.solutions) CHECK(s.residual_norm < 1e-8);
}

TEST_CASE("no extra solutions above the perpendicular bound")
{
    const auto g = geometry(90.0, 0.0);
    const double s = 0.7, r = 1.2;
    const auto f = ellipse_frame(g, s, r);
    for (double rho : {std::log(6.0) + 0.05, 2.5}) {
        const Vec3 x = from_local(from_prolate({rho, 1.1, 4.2}, f.D), f);
        const auto res = find_artifacts(x, s, r, g, ellipsoid_search_box(x, s, r, g));
        CHECK(res.count(Classification::extra) == 0);
        CHECK(res.count(Classification::true_point) == 1);
        CHECK(res.count(Classification::mirror) == 1);
    }
}

TEST_CASE("mirror symmetry of the solution set")
{
    const auto g = geometry(60.0, 2.0);
    const Vec3 x{3.0, 4.0, -3.0};
    const double s = 0.6, r = 0.9;
    const Box box = ellipsoid_search_box(x, s, r, g);
    const auto a = find_artifacts(x, s, r, g, box);
    const auto b = find_artifacts(mirror(x, g.z0), s, r, g, box);
    REQUIRE(a.solutions.size() == b.solutions.size());
    CHECK(a.count(Classification::true_point) == b.count(Classification::mirror));
    CHECK(a.count(Classification::mirror) == b.count(Classification::true_point));
    for (const auto& sa : a.solutions) {
        bool matched = false;
        for (const auto& sb : b.solutions) matched |= distance(sa.y, sb.y) < 1e-6;
        CHECK(matched);
    }
}

TEST_CASE("property: soundness against the independent residual code")
{
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> ua(0.2, 1.5), up(0.3, 2.8), ut(3.3, 6.1);
    for (double b : testutil::kBetas) {
        const auto g = geometry(b, 4.0);
        const double s = ua(rng), r = ua(rng);
        const auto f = ellipse_frame(g, s, r);
        const Vec3 x = from_local(from_prolate({rho_min(g.delta()) + 0.3, up(rng), ut(rng)}, f.D), f);
        const auto res = find_artifacts(x, s, r, g, ellipsoid_search_box(x, s, r, g));
        const double L = distance(x, transmitter_position(g, s)) + distance(x, receiver_position(g, r));
        for (const auto& sol : res.solutions) {
            const auto t = intersection_residuals(x, sol.y, s, r, g);
            const double n = std::sqrt(t.R1 * t.R1 / (L * L) + t.R2 * t.R2 + t.R3 * t.R3);
            CHECK(n < 1e-8);
            CHECK(n == doctest::Approx(sol.residual_norm).epsilon(1e-3).scale(1e-12));
        }
    }
}

TEST_CASE("property: planted solutions are recovered at lattice scale")
{
    std::mt19937_64 rng(52);
    for (std::size_t n : {16u, 24u}) {
        for (double b : testutil::kBetas) {
            const auto g = geometry(b, 1.0);
            const double s = 0.8, r = 1.1;
            const Vec3 x{2.0 + testutil::random_point(rng, 1.0).x, 1.5, -4.0};
            OracleOptions opt;
            opt.grid_n = n;
            const auto res = find_artifacts(x, s, r, g, plane_symmetric_box(9.0, 1.0), opt);
            INFO("grid_n = " << n << ", beta = " << b);
            CHECK(res.count(Classification::true_point) == 1);
            CHECK(res.count(Classification::mirror) == 1);
        }
    }
}

TEST_CASE("property: shrinking the tolerance never adds clusters")
{
    const auto g = geometry(120.0, 0.0);
    const double s = 0.5, r = 0.5;
    const auto f = ellipse_frame(g, s, r);
    const Vec3 x = from_local(from_prolate({0.6, 1.4, 4.0}, f.D), f);
    const Box box = ellipsoid_search_box(x, s, r, g);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
        OracleOptions opt;
        opt.tol = tol;
        const auto res = find_artifacts(x, s, r, g, box, opt);
        CHECK(res.solutions.size() <= prev);
        prev = res.solutions.size();
    }
}

TEST_CASE("oracle residual matches the microlocal residual")
{
    const auto g = geometry(30.0, 1.0);
    const Vec3 x{2.0, 3.0, -4.0}, y{2.5, 2.0, -3.0};
    const auto t = intersection_residuals(x, y, 0.4, 0.9, g);
    const double L = 7.5;
    CHECK(oracle_residual_norm(x, y, 0.4, 0.9, g, L) ==
          doctest::Approx(std::sqrt(t.R1 * t.R1 / (L * L) + t.R2 * t.R2 + t.R3 * t.R3)).epsilon(1e-12));
}

TEST_CASE("artefact scan")
{
    const auto g = geometry(90.0, 0.0);
    const double rm = rho_min(g.delta());
    const std::vector<double> rhos = {0.3, 0.8, rm + 0.05, rm + 0.5};
    OracleOptions opt;
    opt.grid_n = 32;
    const auto rows = artefact_scan(g, 0.6, 0.9, rhos, 1.0, 4.0, opt);
    REQUIRE(rows.size() == rhos.size());
    for (const auto& row : rows) {
        std::printf("scan rho=%.4f solutions=%zu extra=%zu (degenerate band %zu)\n", row.rho, row.n_solutions,
                    row.n_extra, row.n_extra_degenerate);
        CHECK(row.has_true_point);
        if (row.rho > rm) {
            CHECK(row.n_extra == 0);
            CHECK(row.has_mirror);
        }
    }
    const auto again = artefact_scan(g, 0.6, 0.9, rhos, 1.0, 4.0, opt);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(again[i].n_solutions == rows[i].n_solutions);
        CHECK(again[i].n_extra == rows[i].n_extra);
    }
    CHECK_THROWS_AS(artefact_scan(g, 0.6, 0.9, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("oracle preconditions")
{
    const auto g = geometry(90.0, 0.0);
    const Box box = plane_symmetric_box(5.0, 0.0);
    OracleOptions opt;
    opt.grid_n = 8;
    CHECK_THROWS_AS(find_artifacts({1, 1, -2}, 1.0, 1.0, g, box, opt), std::invalid_argument);
    CHECK_THROWS_AS(find_artifacts({10, 1, -2}, 1.0, 1.0, g, box), std::invalid_argument);
    opt = {};
    opt.tol = 0.0;
    CHECK_THROWS_AS(find_artifacts({1, 1, -2}, 1.0, 1.0, g, box, opt), std::invalid_argument);
}

TEST_CASE("a point close to the plane keeps its mirror as a separate solution")
{
    // x and mirror(x) are 0.81 m apart, less than two lattice cells of the
    // search box; they must still be reported as two roots.
    auto g = geometry(97.54, 1.0, 0.0, 2.0, 0.0, 2.0, 2);
    const Vec3 x{5.468, 5.153, 0.595};
    const double s = 0.444, r = 0.333;
    const auto res = find_artifacts(x, s, r, g, ellipsoid_search_box(x, s, r, g));
    CHECK(res.diagnostics.cell_diagonal > distance(x, mirror(x, g.z0)) / 2.0);
    REQUIRE(res.solutions.size() == 2);
    CHECK(res.count(Classification::true_point) == 1);
    CHECK(res.count(Classification::mirror) == 1);
    MESSAGE("lattice points " << res.diagnostics.lattice_points << ", seeds " << res.diagnostics.seeds << ", converged "
                              << res.diagnostics.converged);
}
