#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "warpbench/errors.hpp"
#include "warpbench/manifold.hpp"
#include "warpbench/math_util.hpp"
#include "warpbench/profile.hpp"
#include "warpbench/transport.hpp"

using namespace warpbench;

namespace {

//! Weight -a exp(-r^2): bounded, settles to 0, and keeps the weighted Ricci
//! curvature of the smoothed cone non-negative for a <= 0.1.
RadialFunction gaussian_well(double a) {
    return {[a](double r) { return -a * std::exp(-r * r); },
            [a](double r) { return 2 * a * r * std::exp(-r * r); },
            [a](double r) { return 2 * a * (1 - 2 * r * r) * std::exp(-r * r); }};
}

//! Positive bump test datum 1 + A exp(-((r-c)/s)^2) with derivatives.
RadialFunction bump_datum(double A, double c, double s) {
    return {[=](double r) {
                const double z = (r - c) / s;
                return 1 + A * std::exp(-z * z);
            },
            [=](double r) {
                const double z = (r - c) / s;
                return -2 * A * z / s * std::exp(-z * z);
            },
            [=](double r) {
                const double z = (r - c) / s;
                return A * (4 * z * z - 2) / (s * s) * std::exp(-z * z);
            }};
}

double max_riccati(const TransportResult& T) {
    double m = -std::numeric_limits<double>::infinity();
    for (double r : T.riccati_residuals) m = std::max(m, r);
    return m;
}

}  // namespace

TEST_CASE("scaling identity: gap and normalization closed forms") {
    const auto M = build_manifold(3, WarpingProfile::euclidean());

    // unit ball: area 4pi equals n x volume 4pi/3 already
    auto P1 = make_ball_problem(M, 1.0);
    CHECK(scaling_gap(P1) <= 1e-14);
    auto P1n = normalize_scaling(P1);
    CHECK(P1n.h.v(0.0) == doctest::Approx(1.0).epsilon(1e-13));

    // radius 2: the two sides scale as c vs c^{n/(n-1)}, so c = (1/2)^2
    auto P2 = make_ball_problem(M, 2.0);
    CHECK(scaling_gap(P2) == doctest::Approx(0.5).epsilon(1e-12));
    auto P2n = normalize_scaling(P2);
    CHECK(scaling_gap(P2n) <= 1e-13);
    CHECK(P2n.h.v(0.0) == doctest::Approx(0.25).epsilon(1e-13));

    // idempotence
    auto P2nn = normalize_scaling(P2n);
    CHECK(std::abs(P2nn.h.v(0.7) - P2n.h.v(0.7)) <= 1e-12 * P2n.h.v(0.7));

    CHECK_THROWS_AS((void)make_ball_problem(M, -1.0), BadParameters);
    CHECK_THROWS_AS((void)make_ball_problem(M, 2e4), BallExitsGrid);
    CHECK_THROWS_AS((void)make_ball_problem(M, 1.0, RadialFunction::constant(0.0),
                                            RadialFunction::constant(-1.0)),
                    BadParameters);
}

TEST_CASE("radial Neumann solution: euclidean closed form") {
    const auto M = build_manifold(3, WarpingProfile::euclidean());
    auto P = make_ball_problem(M, 1.0);
    auto T = solve_neumann_radial(P);

    // u = r^2/2 up to the u(0) = 0 gauge
    for (double r : {0.001, 0.05, 0.3, 0.5, 0.9, 0.999}) {
        CHECK(T.du(r) == doctest::Approx(r).epsilon(1e-13));
        CHECK(T.d2u(r) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(T.u.eval(r) == doctest::Approx(0.5 * r * r).epsilon(1e-8));
    }
    CHECK(T.d2u(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(T.u_prime_R == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(T.U_set.first == 0.0);
    CHECK(T.U_set.second == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(T.u_convex);

    // unnormalized problem is refused
    auto Pbad = make_ball_problem(M, 2.0);
    CHECK_THROWS_AS((void)solve_neumann_radial(Pbad), NotNormalized);

    // radius 2 after normalization: u' = r/2
    auto T2 = solve_neumann_radial(normalize_scaling(Pbad));
    CHECK(T2.du(1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(T2.U_set.second == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("radial Neumann solution: independent fixed-step oracle") {
    // cone with a gaussian dip in h; compare u' against a plain Simpson
    // integration of the defining identity u' = N / (e^{-f} h w^{n-1})
    const auto M = build_manifold(3, WarpingProfile::cone(0.7, 1.0));
    RadialFunction h{[](double r) { return 1 + 0.5 * std::exp(-r * r); },
                     [](double r) { return -r * std::exp(-r * r); },
                     [](double r) { return (2 * r * r - 1) * std::exp(-r * r); }};
    auto P = normalize_scaling(
        make_ball_problem(M, 2.0, RadialFunction::constant(0.0), h));
    auto T = solve_neumann_radial(P);
    CHECK(std::abs(T.u_prime_R - 1.0) <= 1e-8);

    auto src = [&](double t) {
        const double hv = P.h.v(t);
        return (3 * std::pow(hv, 1.5) - std::abs(P.h.d1(t))) *
               std::pow(M.profile.w(t), 2);
    };
    double N = 0;
    const int m = 200000;
    const double dt = P.R / m;
    double worst = 0;
    for (int i = 0; i < m; ++i) {
        const double t0 = i * dt;
        N += dt / 6 * (src(t0) + 4 * src(t0 + dt / 2) + src(t0 + dt));
        if (i % 10000 == 9999) {
            const double r = t0 + dt;
            const double g = P.h.v(r) * std::pow(M.profile.w(r), 2);
            worst = std::max(worst, std::abs(T.du(r) - N / g));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("constant weight shifts leave the solution invariant") {
    const auto M = build_manifold(3, WarpingProfile::euclidean());
    auto T0 = solve_neumann_radial(make_ball_problem(M, 1.0));
    auto Tc = solve_neumann_radial(
        make_ball_problem(M, 1.0, RadialFunction::constant(0.7)));
    for (double r : {0.1, 0.45, 0.8, 0.99})
        CHECK(Tc.du(r) == doctest::Approx(T0.du(r)).epsilon(1e-13));
    CHECK(Tc.U_set.second == doctest::Approx(T0.U_set.second).epsilon(1e-12));
}

TEST_CASE("transport determinant: euclidean equality at every sample") {
    const auto M = build_manifold(3, WarpingProfile::euclidean());
    auto P = make_ball_problem(M, 1.0);
    auto T = solve_neumann_radial(P);

    const double worst = transport_sweep(P, T);
    CHECK(T.jacobian_samples.size() == 32 * 512);
    CHECK_FALSE(T.conjugate_point);

    double dev = 0.0;
    for (const auto& s : T.jacobian_samples) {
        dev = std::max(dev, std::abs(s.detP / s.bound - 1.0));
        // flat case closed form: both sides are (1+t)^n
        CHECK(s.detP == doctest::Approx(std::pow(1.0 + s.t, 3)).epsilon(1e-11));
    }
    CHECK(dev <= 1e-9);
    CHECK(worst <= 1e-9);
    CHECK(max_riccati(T) <= 1e-9);
}

TEST_CASE("transport determinant bound holds on non-negatively curved profiles") {
    struct Case {
        WarpingProfile profile;
        int n;
        RadialFunction f;
    };
    const std::vector<Case> cases = {
        {WarpingProfile::cone(0.8, 1.0), 3, RadialFunction::constant(0.0)},
        {WarpingProfile::cone(0.5, 1.0), 4, RadialFunction::constant(0.0)},
        {WarpingProfile::cone(0.8, 1.0), 3, gaussian_well(0.1)},
        // gaussian weight on flat space: curvature from the weight alone
        {WarpingProfile::euclidean(), 3,
         RadialFunction{[](double r) { return 0.2 * r * r; },
                        [](double r) { return 0.4 * r; }, [](double) { return 0.4; }}},
    };
    for (const auto& c : cases) {
        CAPTURE(c.profile.describe());
        const auto M = build_manifold(c.n, c.profile);
        auto P = normalize_scaling(make_ball_problem(M, 1.0, c.f));
        REQUIRE(P.ric_f_nonneg);
        auto T = solve_neumann_radial(P);
        const double worst = transport_sweep(P, T);
        CHECK(worst <= 1e-9);  // sweep itself asserts, belt and braces
        CHECK_FALSE(T.conjugate_point);
        CHECK(max_riccati(T) <= 1e-6);
        // with a unit datum the weighted Laplacian comparison caps the
        // bound by the flat-equality profile (1+t)^n
        if (c.f.v(0.5) == 0.0)
            for (const auto& s : T.jacobian_samples)
                CHECK(s.detP <= std::pow(1.0 + s.t, c.n) * (1 + 1e-9));
    }
}

TEST_CASE("transport determinant matches a finite-difference map oracle") {
    // negatively curved profile: the bound gate is off, but detP itself must
    // match d/dx [x + t u'(x)] x (w(x + t u'(x)) / w(x))^{n-1}
    const auto M = build_manifold(3, WarpingProfile::hyperbolic(1.0));
    auto P = normalize_scaling(make_ball_problem(M, 1.0));
    REQUIRE_FALSE(P.ric_f_nonneg);
    auto T = solve_neumann_radial(P);

    double worst = 0;
    for (double x : {0.2, 0.45, 0.7, 0.9}) {
        bool conj = false;
        const auto samples = transport_jacobian(P, T, x, 4.0, 64, &conj);
        REQUIRE_FALSE(conj);
        const double fd = 1e-5;
        const double u2 = (T.du(x + fd) - T.du(x - fd)) / (2 * fd);
        const double v = T.du(x);
        for (size_t k = 7; k < samples.size(); k += 16) {
            const double t = samples[k].t;
            const double jw = M.profile.w(x + t * v) / M.profile.w(x);
            worst = std::max(worst,
                             std::abs(samples[k].detP / ((1 + u2 * t) * jw * jw) - 1));
        }
    }
    CHECK(worst <= 1e-8);

    // the comparison inequality genuinely fails under negative curvature
    CHECK(riccati_residual(P, T, 0.5) > 1e-3);
}

TEST_CASE("conjugate points are recorded and stop the sampling") {
    const auto M = build_manifold(3, WarpingProfile::euclidean());
    auto P = normalize_scaling(make_ball_problem(
        M, 1.0, RadialFunction::constant(0.0), bump_datum(2.0, 0.3, 0.08)));
    auto T = solve_neumann_radial(P);
    CHECK_FALSE(T.u_convex);

    // the sharp dip drives u'' below -1/horizon somewhere in U
    double u2min = 0, amin = 0;
    for (int i = 0; i <= 400; ++i) {
        const double x = T.U_set.second * i / 400 * (1 - 1e-12);
        const double u2 = T.d2u(x);
        if (u2 < u2min) u2min = u2, amin = x;
    }
    REQUIRE(u2min < -1.0);

    bool conj = false;
    const auto samples = transport_jacobian(P, T, amin, 4.0, 512, &conj);
    CHECK(conj);
    CHECK(samples.size() < 512);
    for (const auto& s : samples) {
        CHECK(s.detP > 0.0);
        CHECK(s.detP <= s.bound * (1 + 1e-9));
    }

    const double worst = transport_sweep(P, T);
    CHECK(T.conjugate_point);
    CHECK(worst <= 1e-9);
    CHECK(T.riccati_residuals.size() == 32);
}

TEST_CASE("start radius and horizon guards") {
    const auto M = build_manifold(3, WarpingProfile::euclidean());
    auto P = make_ball_problem(M, 1.0);
    auto T = solve_neumann_radial(P);
    CHECK_THROWS_AS((void)transport_jacobian(P, T, 1.5, 4.0), OutsideU);
    CHECK_THROWS_AS((void)transport_jacobian(P, T, -0.1, 4.0), OutsideU);
    CHECK_THROWS_AS((void)transport_jacobian(P, T, 0.5, -1.0), BadParameters);
    CHECK_THROWS_AS((void)surjectivity_check(P, T, 1.9), HorizonTooSmall);
}

TEST_CASE("surjectivity margin: reach beyond the shrunken radius") {
    const auto Me = build_manifold(3, WarpingProfile::euclidean());
    auto P = make_ball_problem(Me, 1.0);
    auto T = solve_neumann_radial(P);
    // image reaches 1 + 10, target sphere sits at 10 - 2
    CHECK(surjectivity_check(P, T, 10.0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(T.surjectivity_margin == doctest::Approx(3.0).epsilon(1e-9));
    // barely admissible horizon
    CHECK(surjectivity_check(P, T, 2.0 + 1e-6) >= 0.0);

    const auto Mc = build_manifold(3, WarpingProfile::cone(0.5, 1.0));
    auto Pc = normalize_scaling(make_ball_problem(Mc, 1.0));
    auto Tc = solve_neumann_radial(Pc);
    CHECK(surjectivity_check(Pc, Tc, 10.0) >= 0.0);

    // non-convex u falls back to the sampled membership test
    auto Pb = normalize_scaling(make_ball_problem(
        Me, 1.0, RadialFunction::constant(0.0), bump_datum(1.0, 0.3, 0.08)));
    auto Tb = solve_neumann_radial(Pb);
    REQUIRE_FALSE(Tb.u_convex);
    CHECK(surjectivity_check(Pb, Tb, 2.5) >= 0.0);
}

TEST_CASE("weighted Sobolev comparison: equality on flat balls") {
    const auto M = build_manifold(3, WarpingProfile::euclidean());
    for (double R : {0.5, 1.0, 2.0}) {
        auto v = weighted_sobolev_check(make_ball_problem(M, R));
        CHECK(v.pass);
        CHECK(v.lhs == doctest::Approx(v.rhs).epsilon(1e-9));
    }
    // closed form at the unit ball: both sides equal (4pi/3)^{2/3}
    auto v1 = weighted_sobolev_check(make_ball_problem(M, 1.0));
    CHECK(v1.lhs ==
          doctest::Approx(std::pow(4 * pi / 3, 2.0 / 3.0)).epsilon(1e-11));

    // constant weights shift k by nothing and both sides by e^{-const}
    auto vc = weighted_sobolev_check(
        make_ball_problem(M, 1.0, RadialFunction::constant(0.3)));
    CHECK(vc.pass);
    CHECK(vc.lhs / vc.rhs == doctest::Approx(v1.lhs / v1.rhs).epsilon(1e-12));
}

TEST_CASE("weighted Sobolev comparison: strict pass and refusals") {
    const auto Mc = build_manifold(3, WarpingProfile::cone(0.8, 1.0));
    auto vc = weighted_sobolev_check(make_ball_problem(Mc, 1.0));
    CHECK(vc.pass);
    CHECK(vc.lhs < vc.rhs);  // strictly inside the inequality

    auto vw = weighted_sobolev_check(make_ball_problem(Mc, 1.5, gaussian_well(0.1)));
    CHECK(vw.pass);
    CHECK(vw.lhs < vw.rhs);

    // negatively curved part anywhere refuses the comparison
    const auto Mp = build_manifold(3, WarpingProfile::perturbed(0.1, 1.0));
    CHECK_THROWS_AS((void)weighted_sobolev_check(make_ball_problem(Mp, 1.0)),
                    CurvatureHypothesisFails);
    const auto Mh = build_manifold(3, WarpingProfile::hyperbolic(1.0));
    CHECK_THROWS_AS((void)weighted_sobolev_check(make_ball_problem(Mh, 1.0)),
                    CurvatureHypothesisFails);

    // unbounded-at-infinity weight has no settled volume ratio
    const auto Me = build_manifold(3, WarpingProfile::euclidean());
    RadialFunction quad{[](double r) { return 0.2 * r * r; },
                        [](double r) { return 0.4 * r; }, [](double) { return 0.4; }};
    CHECK_THROWS_AS((void)weighted_sobolev_check(make_ball_problem(Me, 1.0, quad)),
                    AVRUndefined);
}

TEST_CASE("weighted volume ratio closed forms") {
    const auto Me = build_manifold(3, WarpingProfile::euclidean());
    CHECK(weighted_avr(Me, RadialFunction::constant(0.0)) ==
          doctest::Approx(4 * pi / 3).epsilon(1e-9));
    CHECK(weighted_avr(Me, RadialFunction::constant(0.3)) ==
          doctest::Approx(std::exp(-0.3) * 4 * pi / 3).epsilon(1e-9));

    // a weight settling to 0 leaves the ratio of the cone untouched
    const auto Mc = build_manifold(3, WarpingProfile::cone(0.8, 1.0));
    CHECK(weighted_avr(Mc, gaussian_well(0.1)) ==
          doctest::Approx(asymptotic_volume_ratio(Mc).beta).epsilon(1e-9));
}

TEST_CASE("weighted Ricci minimum: closed forms and sign boundaries") {
    const auto Me = build_manifold(3, WarpingProfile::euclidean());
    CHECK(weighted_ricci_min(Me, RadialFunction::constant(0.0)) == 0.0);
    RadialFunction quad{[](double r) { return 0.2 * r * r; },
                        [](double r) { return 0.4 * r; }, [](double) { return 0.4; }};
    CHECK(weighted_ricci_min(Me, quad) == doctest::Approx(0.4).epsilon(1e-12));

    const auto Mc = build_manifold(3, WarpingProfile::cone(0.8, 1.0));
    CHECK(weighted_ricci_min(Mc, gaussian_well(0.1)) >= -1e-8);
    CHECK(weighted_ricci_min(Mc, gaussian_well(0.2)) < -1e-3);

    const auto Mh = build_manifold(3, WarpingProfile::hyperbolic(1.0));
    CHECK(weighted_ricci_min(Mh, RadialFunction::constant(0.0)) ==
          doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("isoperimetric threshold: flat equality in three to five dimensions") {
    for (int n : {3, 4, 5}) {
        const auto M = build_manifold(n, WarpingProfile::euclidean());
        const auto v = isoperimetric_check(M, 1.0);
        CHECK(v.pass);
        CHECK(v.ratio / v.threshold == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(v.threshold ==
              doctest::Approx(n * std::pow(unit_ball_volume(n), 1.0 / n))
                  .epsilon(1e-12));
    }
    // the ratio is scale free: same verdict at other radii
    const auto M3 = build_manifold(3, WarpingProfile::euclidean());
    for (double R : {0.1, 7.0, 90.0})
        CHECK(isoperimetric_check(M3, R).ratio / isoperimetric_check(M3, R).threshold ==
              doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("isoperimetric threshold: explicit constant and monotone degradation") {
    // anchor: n=3, k=1/2, flat volume ratio -> 3 (4pi/3)^{1/3} 2^{-8/3}
    const double flat = isoperimetric_constant(3, 0.0, 4 * pi / 3);
    CHECK(flat == doctest::Approx(4.83597586204).epsilon(1e-11));
    CHECK(isoperimetric_constant(3, 0.5, 4 * pi / 3) ==
          doctest::Approx(flat * std::pow(0.5, 8.0 / 3.0)).epsilon(1e-13));
    CHECK(isoperimetric_constant(3, 0.5, 4 * pi / 3) ==
          doctest::Approx(0.76162).epsilon(1e-4));

    for (int n : {3, 4, 5}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 5; ++i) {
            const double k = 0.9 * i / (4.0 * (n - 2));  // keeps (n-2)k < 1
            const double c = isoperimetric_constant(n, k, 1.7);
            CHECK(c < prev);
            prev = c;
        }
        double prevb = 0.0;
        for (double b : {0.5, 1.0, 2.0, 4.0}) {
            const double c = isoperimetric_constant(n, 0.2, b);
            CHECK(c > prevb);
            prevb = c;
        }
    }
    CHECK_THROWS_AS((void)isoperimetric_constant(3, 1.0, 1.0), NotGaugeable);
    CHECK_THROWS_AS((void)isoperimetric_constant(3, 0.1, 0.0), AVRUndefined);
    CHECK_THROWS_AS((void)isoperimetric_constant(2, 0.1, 1.0), DimensionTooLow);
}

TEST_CASE("isoperimetric verdicts across profiles") {
    // mildly pinched profile: positive Kato constant, still passes everywhere
    const auto Mp = build_manifold(3, WarpingProfile::perturbed(0.1, 1.0));
    for (double R : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0}) {
        const auto v = isoperimetric_check(Mp, R);
        CHECK(v.pass);
        CHECK(v.ratio >= v.threshold);
    }

    // cone: zero Kato constant, reduced volume ratio
    const auto Mc = build_manifold(3, WarpingProfile::cone(0.5, 1.0));
    const auto vc = isoperimetric_check(Mc, 1.0);
    CHECK(vc.pass);
    CHECK(vc.threshold == doctest::Approx(3 * std::pow(pi / 3, 1.0 / 3.0)).epsilon(1e-6));

    // exponential profile: the Kato integral diverges
    const auto Mh = build_manifold(3, WarpingProfile::hyperbolic(1.0));
    CHECK_THROWS_AS((void)isoperimetric_check(Mh, 1.0), NotGaugeable);

    CHECK_THROWS_AS((void)isoperimetric_check(Mp, -2.0), BadParameters);
    CHECK_THROWS_AS((void)isoperimetric_check(Mp, 2e4), OutOfGrid);
}
