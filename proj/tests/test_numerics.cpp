#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "warpbench/errors.hpp"
#include "warpbench/grid.hpp"
#include "warpbench/math_util.hpp"
#include "warpbench/profile.hpp"
#include "warpbench/quadrature.hpp"

using namespace warpbench;

TEST_CASE("sphere area and ball volume closed forms") {
    CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * pi).epsilon(1e-14));
    CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * pi).epsilon(1e-14));
    CHECK(unit_sphere_area(4) == doctest::Approx(2.0 * pi * pi).epsilon(1e-14));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature on smooth integrands") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, pi) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0) ==
          doctest::Approx(std::sqrt(pi)).epsilon(1e-12));
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
    // orientation flip
    CHECK(integrate([](double x) { return x; }, 1.0, 0.0) ==
          doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("tail integration") {
    CHECK(integrate_to_inf([](double x) { return 1.0 / (x * x); }, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate_to_inf([](double x) { return std::exp(-x); }, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-10));
    // The 1/x substitution maps a slow power tail onto an integrable endpoint
    // singularity, which caps the achievable accuracy a little below rel_tol.
    CHECK(integrate_to_inf([](double x) { return std::pow(x, -1.5); }, 2.0) ==
          doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(1e-8));
    CHECK(power_tail_integral(2.0, -3.0, 4.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    CHECK_THROWS_AS(power_tail_integral(1.0, -0.5, 1.0), Divergent);
}

TEST_CASE("cumulative integrals match analytic prefixes") {
    std::vector<double> nodes;
    for (int i = 0; i <= 64; ++i) nodes.push_back(0.031 * i);
    auto cum = cumulative_integral([](double x) { return std::cos(x); }, nodes);
    for (size_t i = 0; i < nodes.size(); ++i)
        CHECK(cum[i] == doctest::Approx(std::sin(nodes[i]) - std::sin(nodes[0]))
                            .epsilon(1e-12));
}

TEST_CASE("log grid construction and lookup") {
    auto g = RadialGrid::log_uniform({1e-6, 1e4, 4096});
    CHECK(g->size() == 4096);
    CHECK(g->r_min() == 1e-6);
    CHECK(g->r_max() == 1e4);
    CHECK(g->node(g->cell_of(3.7)) <= 3.7);
    CHECK(g->node(g->cell_of(3.7) + 1) >= 3.7);
}

TEST_CASE("radial field interpolation, pole and tail continuations") {
    auto g = RadialGrid::log_uniform({1e-6, 1e4, 4096});
    auto f = RadialField::sample(g, [](double r) { return r * r / (1.0 + r); }, 0.0);
    for (double r : {2e-5, 0.37, 5.0, 811.0}) {
        CHECK(f.eval(r) == doctest::Approx(r * r / (1.0 + r)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(f.eval(2e4), OutOfGrid);
    f.set_tail({1.0, 1.0});  // ~ r at large r
    CHECK(f.eval(2e4) == doctest::Approx(2e4).epsilon(1e-3));
    f.set_pole_power({1.0, 2.0});  // ~ r^2 near 0
    CHECK(f.eval(1e-8) == doctest::Approx(1e-16).epsilon(1e-3));
}

TEST_CASE("sixth-order stencils") {
    const double dx = 0.01;
    std::vector<double> v(64);
    for (size_t i = 0; i < v.size(); ++i) v[i] = std::sin(dx * static_cast<double>(i));
    const double x = dx * 30;
    CHECK(fd6_first(v, 30, dx) == doctest::Approx(std::cos(x)).epsilon(1e-11));
    CHECK(fd6_second(v, 30, dx) == doctest::Approx(-std::sin(x)).epsilon(1e-9));
}

TEST_CASE("line fits and suffix maxima") {
    std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    auto [a, b] = fit_line(x, y);
    CHECK(a == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(fit_line_residual(x, y, a, b) < 1e-13);

    std::vector<double> v{1, 5, 2, 4, 3};
    suffix_max(v);
    CHECK(v == std::vector<double>{5, 5, 4, 4, 3});
}

TEST_CASE("deterministic double formatting") {
    CHECK(fmt_double(0.1) == "0.10000000000000001");
    CHECK(fmt_double(1.0) == "1");
    CHECK(fmt_double(4.0 * pi) == fmt_double(4.0 * pi));
}

TEST_CASE("analytic profiles: values and exact derivative identities") {
    auto hyper = WarpingProfile::hyperbolic(2.0);
    CHECK(hyper.w(1.0) == doctest::Approx(std::sinh(2.0) / 2.0).epsilon(1e-15));
    CHECK(hyper.dw(1.0) == doctest::Approx(std::cosh(2.0)).epsilon(1e-15));
    CHECK(hyper.dw_minus_one(1.0) ==
          doctest::Approx(std::cosh(2.0) - 1.0).epsilon(1e-14));
    CHECK(hyper.d3w_origin() == doctest::Approx(4.0).epsilon(1e-15));

    auto cone = WarpingProfile::cone(0.5, 1.0);
    CHECK(cone.dw(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cone.d2w(0.0) == 0.0);
    CHECK(cone.d3w_origin() == doctest::Approx(-1.0).epsilon(1e-15));

    auto pert = WarpingProfile::perturbed(0.1, 1.0);
    CHECK(pert.d3w_origin() == doctest::Approx(0.6).epsilon(1e-15));

    // central-difference oracle for first/second derivatives
    for (const auto& p : {hyper, cone, pert}) {
        for (double r : {0.3, 1.1, 2.7}) {
            const double h = 1e-5;
            const double dw_fd = (p.w(r + h) - p.w(r - h)) / (2 * h);
            const double d2w_fd = (p.w(r + h) - 2 * p.w(r) + p.w(r - h)) / (h * h);
            CHECK(p.dw(r) == doctest::Approx(dw_fd).epsilon(1e-8));
            CHECK(p.d2w(r) == doctest::Approx(d2w_fd).epsilon(1e-5));
            CHECK(p.dw_minus_one(r) ==
                  doctest::Approx(p.dw(r) - 1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("profile parameter validation") {
    CHECK_THROWS_AS(WarpingProfile::hyperbolic(-1.0), BadParameters);
    CHECK_THROWS_AS(WarpingProfile::cone(0.0), BadParameters);
    CHECK_THROWS_AS(WarpingProfile::perturbed(-3.0), NonPositiveWarp);
}

TEST_CASE("tabulated spline reproduces a smooth profile") {
    auto pert = WarpingProfile::perturbed(0.1, 1.0);
    std::vector<double> r{0.0}, wv{0.0};
    for (int i = 1; i <= 3000; ++i) {
        const double t = 50.0 * i / 3000.0;
        r.push_back(t);
        wv.push_back(pert.w(t));
    }
    auto tab = WarpingProfile::tabulated(r, wv, TailSpec{true, 1.0, 1.0, 0.0});
    for (double t : {0.5, 1.7, 12.0, 45.0}) {
        CHECK(tab.w(t) == doctest::Approx(pert.w(t)).epsilon(1e-9));
        CHECK(tab.dw(t) == doctest::Approx(pert.dw(t)).epsilon(1e-6));
        CHECK(tab.d2w(t) == doctest::Approx(pert.d2w(t)).epsilon(2e-3));
    }
    CHECK(tab.w(100.0) == doctest::Approx(100.0).epsilon(1e-6));  // tail model

    std::vector<double> bad_r{0.0, 1.0, 2.0, 3.0}, bad_w{0.1, 1.0, 2.0, 3.0};
    CHECK_THROWS_AS(WarpingProfile::tabulated(bad_r, bad_w, TailSpec{}),
                    PoleConditionViolated);
}

TEST_CASE("rescaled profiles satisfy s w(r/s)") {
    for (double s : {0.5, 2.0}) {
        auto base = WarpingProfile::perturbed(0.1, 1.0);
        auto sc = base.rescaled(s);
        for (double r : {0.2, 1.0, 3.0, 10.0})
            CHECK(sc.w(r) == doctest::Approx(s * base.w(r / s)).epsilon(1e-13));

        auto hb = WarpingProfile::hyperbolic(1.0);
        auto hs = hb.rescaled(s);
        for (double r : {0.2, 1.0, 3.0})
            CHECK(hs.w(r) == doctest::Approx(s * hb.w(r / s)).epsilon(1e-13));

        auto cb = WarpingProfile::cone(0.5, 1.0);
        auto cs = cb.rescaled(s);
        for (double r : {0.2, 1.0, 3.0, 10.0})
            CHECK(cs.w(r) == doctest::Approx(s * cb.w(r / s)).epsilon(1e-13));
    }
}
