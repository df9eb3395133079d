#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "sarms/constants.hpp"
#include "sarms/error.hpp"
#include "sarms/microlocal.hpp"
#include "test_util.hpp"

using namespace sarms;
using testutil::geometry;

TEST_CASE("residuals vanish for identical points")
{
    const auto g = geometry(60.0, 1.0);
    const Vec3 x{1.0, 2.0, -3.0};
    const auto t = intersection_residuals(x, x, 0.7, 1.1, g);
    CHECK(t.R1 == 0.0);
    CHECK(t.R2 == 0.0);
    CHECK(t.R3 == 0.0);
}

TEST_CASE("residuals vanish for the mirror point")
{
    for (double b : testutil::kBetas) {
        const auto g = geometry(b, 0.0);
        const auto t = intersection_residuals({1.0, 2.0, -3.0}, {1.0, 2.0, 3.0}, 0.4, 1.7, g);
        CHECK(std::abs(t.R1) < 1e-12);
        CHECK(std::abs(t.R2) < 1e-12);
        CHECK(std::abs(t.R3) < 1e-12);
    }
}

TEST_CASE("residuals for a displaced point: hand-computed values")
{
    // beta = 90 deg, s = r = 1: gamma1 = (0,2,0), gamma2 = (2,0,0).
    const auto g = geometry(90.0, 0.0);
    const Vec3 x{1.0, 2.0, -3.0}, y{1.1, 2.0, -3.0};
    const auto t = intersection_residuals(x, y, 1.0, 1.0, g);
    const double xt = std::sqrt(1.0 + 0.0 + 9.0), xr = std::sqrt(1.0 + 4.0 + 9.0);
    const double yt = std::sqrt(1.21 + 0.0 + 9.0), yr = std::sqrt(0.81 + 4.0 + 9.0);
    CHECK(t.R1 == doctest::Approx((xt + xr) - (yt + yr)).epsilon(1e-13));
    CHECK(t.R2 == doctest::Approx(0.0 / xt - 0.0 / yt).epsilon(1e-13));
    CHECK(t.R3 == doctest::Approx(-1.0 / xr - (-0.9) / yr).epsilon(1e-13));
    CHECK(std::abs(t.R1) > 1e-3);
    CHECK(std::abs(t.R3) > 1e-3);
}

TEST_CASE("residuals reject points on an antenna")
{
    const auto g = geometry(90.0, 0.0);
    CHECK_THROWS_AS(intersection_residuals(receiver_position(g, 1.0), {1, 1, 1}, 1.0, 1.0, g), DegenerateGeometry);
    CHECK_THROWS_AS(intersection_residuals({1, 1, 1}, transmitter_position(g, 1.0), 1.0, 1.0, g), DegenerateGeometry);
}

TEST_CASE("property: residual zeros at y = x and y = mirror(x)")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ua(0.1, 2.0);
    for (double b : testutil::kBetas) {
        const auto g = geometry(b, 4.0);
        for (int i = 0; i < 500; ++i) {
            const double s = ua(rng), r = ua(rng);
            Vec3 x = testutil::random_point(rng, 15.0);
            if (std::abs(x.z - g.z0) < 0.1) x.z -= 1.0;
            for (const Vec3& y : {x, mirror(x, g.z0)}) {
                const auto t = intersection_residuals(x, y, s, r, g);
                CHECK(std::abs(t.R1) < 1e-12);
                CHECK(std::abs(t.R2) < 1e-12);
                CHECK(std::abs(t.R3) < 1e-12);
            }
        }
    }
}

TEST_CASE("property: equal range sums give equal rho")
{
    std::mt19937_64 rng(32);
    const auto g = geometry(60.0, 2.0);
    const double s = 0.8, r = 1.3;
    const auto f = ellipse_frame(g, s, r);
    std::uniform_real_distribution<double> up(0.05, kPi - 0.05), ut(0.0, 2.0 * kPi), ur(0.1, 4.0);
    for (int i = 0; i < 300; ++i) {
        const double rho = ur(rng);
        const Vec3 x = from_local(from_prolate({rho, up(rng), ut(rng)}, f.D), f);
        const Vec3 y = from_local(from_prolate({rho, up(rng), ut(rng)}, f.D), f);
        CHECK(std::abs(intersection_residuals(x, y, s, r, g).R1) < 1e-10 * std::max(1.0, f.D * std::cosh(rho)));
        CHECK(std::abs(rho_of_point(x, s, r, g) - rho_of_point(y, s, r, g)) < 1e-10);
    }
}

TEST_CASE("abc examples and identity")
{
    auto t = abc(0.4, 1.1, 0.4, 1.1);
    CHECK(t.A == 0.0);
    CHECK(t.B == 0.0);
    CHECK(std::abs(t.C) < 1e-16);

    t = abc(kPi / 2, 0.0, kPi / 2, kPi);
    CHECK(std::abs(t.A) < 1e-15);
    CHECK(t.B == doctest::Approx(2.0));
    CHECK(std::abs(t.C) < 1e-15);

    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> up(0.0, kPi), ut(0.0, 2.0 * kPi);
    for (int i = 0; i < 10000; ++i) {
        const double p = up(rng), th = ut(rng), pp = up(rng), tp = ut(rng);
        const auto v = abc(p, th, pp, tp);
        const double c_identity = std::sin(pp) * std::cos(tp) * v.A - std::cos(pp) * v.B;
        CHECK(std::abs(v.C - c_identity) < 1e-12);
    }
}

TEST_CASE("determinant examples")
{
    for (double rho : {0.3, 1.0, 2.5})
        for (double alpha : {0.2, 1.3, 2.9})
            for (double delta : {0.0, 1.7, -0.6})
                CHECK(determinant(rho, alpha, kPi / 2, kPi / 2, delta) ==
                      doctest::Approx(std::cosh(rho) * std::sinh(rho)).epsilon(1e-12));
    CHECK(determinant(0.0, 0.0, 1.0, 2.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("determinant equals a 3x3 determinant of the (A, B, C) system up to sign")
{
    // Rows of the linear system for (A, B, C) in the general-angle case.
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> ua(0.0, 2.0 * kPi), up(0.0, kPi), ur(0.0, 3.0), ud(-2.0, 2.0);
    for (int i = 0; i < 2000; ++i) {
        const double rho = ur(rng), a = ua(rng), pp = up(rng), tp = ua(rng), d = ud(rng);
        const double ch = std::cosh(rho), sh = std::sinh(rho), ca = std::cos(a), sa = std::sin(a);
        const double m[3][3] = {{sh * (d * ca - sa), ch * (ca + d * sa), -(ca + d * sa)},
                                {sh * ca, ch * sa, sa},
                                {std::sin(pp) * std::cos(tp), -std::cos(pp), -1.0}};
        const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        const double ref = determinant(rho, a, pp, tp, d);
        CHECK(std::abs(std::abs(det) - std::abs(ref)) < 1e-9 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("property: general determinant reduces to the perpendicular form at delta = 0")
{
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> ua(0.0, 2.0 * kPi), up(0.0, kPi), ur(0.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double rho = ur(rng), a = ua(rng), pp = up(rng), tp = ua(rng);
        const double d0 = determinant(rho, a, pp, tp, 0.0), d1 = determinant_perpendicular(rho, a, pp, tp);
        worst = std::max(worst, std::abs(d0 - d1) / std::max(1.0, std::abs(d1)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("property: determinant lower-bound chain")
{
    std::mt19937_64 rng(36);
    std::uniform_real_distribution<double> ua(0.0, 2.0 * kPi), up(0.0, kPi), ur(0.0, 5.0);
    for (double delta : {0.0, 1.0 / std::tan(kPi / 6), 1.0 / std::tan(kPi / 3), 1.0 / std::tan(2 * kPi / 3)}) {
        for (int i = 0; i < 20000; ++i) {
            const double rho = ur(rng);
            const double v = determinant(rho, ua(rng), up(rng), ua(rng), delta);
            CHECK(v >= determinant_lower_bound(rho, delta) - 1e-12 * std::cosh(rho) * std::cosh(rho));
        }
    }
}

TEST_CASE("property: determinant positivity above the bounds")
{
    const std::size_t n = 100000;
    auto perp = determinant_sweep(0.0, rho_min_perpendicular_ln6 + 1e-6, n, 41);
    CHECK(perp.n_nonpositive == 0);
    for (double b : testutil::kBetas) {
        const double delta = 1.0 / std::tan(b * kPi / 180.0);
        const auto row = determinant_sweep(delta, rho_min(delta), n, 42);
        INFO("beta = " << b);
        CHECK(row.n_nonpositive == 0);
        CHECK(row.min_delta > 0.0);
    }
}

TEST_CASE("rho_min values")
{
    CHECK(rho_min(0.0) == doctest::Approx(std::log(5.0) + 1e-6).epsilon(1e-15));
    CHECK(rho_min(0.0, 0.0) == doctest::Approx(std::log(5.0)));
    CHECK(rho_min_perpendicular_ln6 == doctest::Approx(std::log(6.0)));
    CHECK(rho_min(1.0) == doctest::Approx(std::log(13.0) + 1e-6));
    CHECK(rho_min(-1.0) == rho_min(1.0));
    const auto row = determinant_sweep(1.0, std::log(13.0) + 1e-6, 100000, 43);
    CHECK(row.n_nonpositive == 0);
}

TEST_CASE("empirical rho threshold lies below both sufficient bounds")
{
    const double t0 = empirical_rho_threshold(0.0, 20000);
    std::printf("empirical rho threshold (delta = 0): %.6f  [ln 5 = %.6f, ln 6 = %.6f]\n", t0, std::log(5.0), std::log(6.0));
    CHECK(t0 > 0.0);
    CHECK(t0 <= std::log(5.0));
    for (double b : {30.0, 60.0, 120.0}) {
        const double delta = 1.0 / std::tan(b * kPi / 180.0);
        const double t = empirical_rho_threshold(delta, 20000);
        std::printf("empirical rho threshold (beta = %.0f): %.6f  [bound %.6f]\n", b, t, rho_min(delta, 0.0));
        CHECK(t <= rho_min(delta, 0.0));
    }
}

TEST_CASE("rho_of_point examples")
{
    const auto g = geometry(90.0, 0.0);
    const auto f = ellipse_frame(g, 0.5, 0.5);
    CHECK(rho_of_point(f.center, 0.5, 0.5, g) == doctest::Approx(0.0).epsilon(1e-7));

    const Vec3 x{0.0, 0.0, -14.0};
    const double d1 = distance(x, transmitter_position(g, 0.5)), d2 = distance(x, receiver_position(g, 0.5));
    CHECK(rho_of_point(x, 0.5, 0.5, g) == doctest::Approx(std::acosh((d1 + d2) / (2.0 * std::sqrt(0.5)))).epsilon(1e-13));

    double prev = -1.0;
    const Vec3 dir = Vec3{0.3, -0.5, -0.8} / norm(Vec3{0.3, -0.5, -0.8});
    for (int i = 1; i < 50; ++i) {
        const double rho = rho_of_point(f.center + dir * (0.5 * i), 0.5, 0.5, g);
        CHECK(rho > prev);
        prev = rho;
    }
    CHECK_THROWS_AS(rho_of_point(x, 0.0, 0.0, g), DegenerateGeometry);
}

TEST_CASE("min_gate_time examples")
{
    const auto g = geometry(90.0, 0.0);
    const double D = std::sqrt(2.0);
    CHECK(min_gate_time(1.0, 1.0, g, 0.0) == doctest::Approx(2.0 * D / kSpeedOfLight).epsilon(1e-14));
    CHECK(min_gate_time(1.0, 1.0, g, std::log(6.0)) == doctest::Approx(2.0 * D / kSpeedOfLight * 37.0 / 12.0).epsilon(1e-14));
    CHECK(min_gate_time(2.0, 2.0, g, 1.3) == doctest::Approx(2.0 * min_gate_time(1.0, 1.0, g, 1.3)).epsilon(1e-14));
    CHECK(min_gate_time(1.0, 1.0, g, 1.4) > min_gate_time(1.0, 1.0, g, 1.3));
}

TEST_CASE("property: gate consistency between delay and rho")
{
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> ua(0.1, 1.5);
    for (double b : testutil::kBetas) {
        const auto g = geometry(b, 4.0);
        const double rm = rho_min(g.delta());
        for (int i = 0; i < 1000; ++i) {
            const double s = ua(rng), r = ua(rng);
            const Vec3 x = testutil::random_point(rng, 6.0);
            const double t = (distance(x, transmitter_position(g, s)) + distance(x, receiver_position(g, r))) / kSpeedOfLight;
            CHECK((t > min_gate_time(s, r, g, rm)) == (rho_of_point(x, s, r, g) > rm));
        }
    }
}

TEST_CASE("ROI gating report")
{
    auto g = geometry(90.0, 4.0, 0.5, 1.5, 0.5, 1.5, 4);
    const double rm = rho_min(g.delta());

    SUBCASE("far ROI is compliant everywhere")
    {
        const Box roi{{30.0, 30.0, -20.0}, {34.0, 34.0, -16.0}};
        const auto rep = roi_gating_report(g, roi, rm);
        CHECK(rep.n_compliant() == rep.entries.size());
        CHECK_FALSE(rep.plane_warning);
        for (const auto& e : rep.entries) {
            CHECK(e.t_min == doctest::Approx(2.0 * e.D / kSpeedOfLight * std::cosh(rm)).epsilon(1e-14));
            CHECK(e.min_rho > rm);
        }
    }
    SUBCASE("ROI containing the focal midpoint is non-compliant")
    {
        const auto f = ellipse_frame(g, g.s_at(0), g.r_at(0));
        const Box roi{f.center - Vec3{0.1, 0.1, 0.1}, f.center + Vec3{0.1, 0.1, 0.1}};
        const auto rep = roi_gating_report(g, roi, rm);
        CHECK_FALSE(rep.at(0, 0).roi_compliant);
        CHECK(rep.at(0, 0).min_rho == 0.0);
        CHECK(rep.plane_warning);
    }
    SUBCASE("sampled minimum is a lower bound on rho inside the box")
    {
        const Box roi{{-1.0, 2.0, -3.0}, {1.5, 4.0, 0.0}};
        const auto rep = roi_gating_report(g, roi, rm);
        std::mt19937_64 rng(38);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (const auto& e : rep.entries) {
            for (int i = 0; i < 200; ++i) {
                const Vec3 p{roi.lo.x + u(rng) * 2.5, roi.lo.y + u(rng) * 2.0, roi.lo.z + u(rng) * 3.0};
                CHECK(rho_of_point(p, e.s, e.r, g) >= e.min_rho - 1e-12);
            }
        }
    }
    SUBCASE("desk scene box at 14 m standoff produces a report")
    {
        auto gd = geometry(90.0, 4.0, 0.05, 1.05, 0.05, 1.05, 16);
        const Box roi{{8.0, 8.0, 0.0}, {12.0, 12.0, 2.0}};
        const auto rep = roi_gating_report(gd, roi, rho_min(gd.delta()));
        CHECK(rep.entries.size() == 256);
        CHECK(rep.n_compliant() == 256);
        CHECK(rep.global_min_rho_over_roi > rho_min(gd.delta()));
    }
    SUBCASE("empty ROI throws")
    {
        CHECK_THROWS_AS(roi_gating_report(g, Box{{0, 0, 0}, {0, 1, 1}}, rm), EmptyRoi);
    }
}

TEST_CASE("property: t_min strictly increasing in D and rho_min")
{
    const auto g = geometry(60.0, 0.0, 0.1, 2.0, 0.1, 2.0, 10);
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double t = min_gate_time(0.1 * i, 0.1 * i, g, 1.5);
        CHECK(t > prev);
        prev = t;
    }
    prev = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double t = min_gate_time(0.7, 0.9, g, 0.2 * i);
        CHECK(t > prev);
        prev = t;
    }
}
