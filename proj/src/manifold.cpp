#include "warpbench/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "warpbench/errors.hpp"
#include "warpbench/math_util.hpp"
#include "warpbench/quadrature.hpp"

namespace warpbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

//! Log-log slope of a sampled field over the outermost decade of the grid,
//! restricted to strictly positive samples. Returns false when fewer than
//! eight usable samples exist (field effectively vanishes out there).
bool tail_slope(const RadialGrid& grid, const std::vector<double>& v, double* slope,
                double* coeff_at_rmax) {
    std::vector<double> lx, ly;
    const double cut = grid.r_max() / 10.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        const double y = v[static_cast<size_t>(i)];
        if (r >= cut && y > 0.0 && std::isfinite(std::log(y))) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(y));
        }
    }
    if (lx.size() < 8) return false;
    auto [b, m] = fit_line(lx, ly);
    *slope = m;
    if (coeff_at_rmax) *coeff_at_rmax = std::exp(b + m * std::log(grid.r_max())) /
                                        std::pow(grid.r_max(), m);
    return true;
}

}  // namespace

ModelManifold build_manifold(int n, const WarpingProfile& profile, GridSpec gs) {
    if (n < 3) throw DimensionTooLow("dimension must be >= 3, got " + std::to_string(n));
    profile.validate();
    if (!profile.tail().power_law) {
        // Keep w^{n-1} and V inside double range for exponential growth:
        // rate * r_max * (n-1) must stay below ~650.
        const double cap = 650.0 / (profile.tail().rate * (n - 1));
        gs.r_max = std::min(gs.r_max, cap);
        if (gs.r_max < 100.0)
            throw BadParameters(
                "exponential growth rate too large for a grid reaching r = 100");
    }
    if (gs.r_max < 100.0) throw BadParameters("grid must extend to r >= 100");

    ModelManifold M;
    M.n = n;
    M.profile = profile;
    M.grid = RadialGrid::log_uniform(gs);
    M.omega = unit_sphere_area(n);

    const double pole_eig = -(n - 1) * profile.d3w_origin();
    M.ric_radial_field = RadialField::sample(
        M.grid, [&](double r) { return -(n - 1) * profile.d2w(r) / profile.w(r); },
        pole_eig);
    M.ric_tangential_field = RadialField::sample(
        M.grid,
        [&](double r) {
            const double w = profile.w(r);
            const double d1 = profile.dw_minus_one(r);
            return -profile.d2w(r) / w + (n - 2) * (-d1 * (2.0 + d1)) / (w * w);
        },
        pole_eig);
    {
        std::vector<double> v(static_cast<size_t>(M.grid->size()));
        for (int i = 0; i < M.grid->size(); ++i) {
            const double rad = M.ric_radial_field.value(i);
            const double tan = M.ric_tangential_field.value(i);
            v[static_cast<size_t>(i)] = std::max(0.0, -std::min(rad, tan));
        }
        M.ric_minus_field = RadialField(M.grid, std::move(v), std::max(0.0, -pole_eig));
    }

    const Fn shell = [&](double t) { return std::pow(profile.w(t), n - 1); };
    const double v_rmin = M.omega * integrate(shell, 0.0, M.grid->r_min(), 1e-12, 1e-300);
    std::vector<double> cum = cumulative_integral(shell, M.grid->nodes());
    std::vector<double> vol(cum.size());
    for (size_t i = 0; i < cum.size(); ++i) vol[i] = v_rmin + M.omega * cum[i];
    M.volume_field = RadialField(M.grid, std::move(vol), 0.0);
    M.volume_field.set_pole_power(
        {v_rmin / std::pow(M.grid->r_min(), n), static_cast<double>(n)});
    // Volumes span many decades and are locally power-like, so interpolate
    // their logarithm: ratios V(R)/V(r) then come out near machine accuracy.
    M.volume_field.set_log_interpolation();
    return M;
}

double ModelManifold::area(double r) const {
    if (!(r > 0.0)) throw BadParameters("area needs r > 0");
    return omega * std::pow(profile.w(r), n - 1);
}

double ModelManifold::volume(double r) const {
    if (r < 0.0) throw BadParameters("volume needs r >= 0");
    if (r == 0.0) return 0.0;
    if (r > grid->r_max()) throw OutOfGrid("radius beyond the grid end");
    return volume_field.eval(r);
}

std::pair<double, double> ModelManifold::ricci_eigenvalues(double r) const {
    if (r < 0.0) throw BadParameters("radius must be non-negative");
    if (r == 0.0) {
        if (profile.kind() == ProfileKind::tabulated)
            throw PoleEvaluation("pole curvature limit unavailable for tabulated profiles");
        const double e = -(n - 1) * profile.d3w_origin();
        return {e, e};
    }
    const double w = profile.w(r);
    const double d2 = profile.d2w(r);
    const double d1 = profile.dw_minus_one(r);
    const double rad = -(n - 1) * d2 / w;
    const double tan = -d2 / w + (n - 2) * (-d1 * (2.0 + d1)) / (w * w);
    return {rad, tan};
}

double ric_minus_of(const WarpingProfile& profile, int n, double r) {
    if (r <= 0.0) return std::max(0.0, (n - 1) * profile.d3w_origin());
    const double w = profile.w(r);
    const double d2 = profile.d2w(r);
    const double d1 = profile.dw_minus_one(r);
    const double rad = -(n - 1) * d2 / w;
    const double tan = -d2 / w + (n - 2) * (-d1 * (2.0 + d1)) / (w * w);
    return std::max(0.0, -std::min(rad, tan));
}

double ModelManifold::ric_minus_at(double r) const { return ric_minus_of(profile, n, r); }

std::string ModelManifold::cache_key() const {
    std::ostringstream os;
    os << "n=" << n << " " << profile.describe() << " grid[" << fmt_double(grid->r_min())
       << "," << fmt_double(grid->r_max()) << "," << grid->size() << "]";
    return os.str();
}

std::pair<double, double> volume_and_area(const ModelManifold& M, double r) {
    if (!(r > 0.0)) throw BadParameters("radius must be positive");
    if (r > M.grid->r_max()) throw OutOfGrid("radius beyond the grid end");
    return {M.volume(r), M.area(r)};
}

AvrReport asymptotic_volume_ratio(const ModelManifold& M) {
    const TailSpec& t = M.profile.tail();
    AvrReport rep;
    if (!t.power_law || t.p > 1.0 + 1e-9) {
        rep.divergent = true;
        rep.beta = kInf;
        return rep;
    }
    if (t.p < 1.0 - 1e-9) {
        rep.zero = true;
        rep.beta = 0.0;
        return rep;
    }
    const double R = M.grid->r_max();
    const double f1 = M.volume(R) / std::pow(R, M.n);
    const double f2 = M.volume(R / 2) / std::pow(R / 2, M.n);
    const double f3 = M.volume(R / 4) / std::pow(R / 4, M.n);
    // Quadratic extrapolation in h = 1/r through h, 2h, 4h evaluated at 0.
    const double beta = (8.0 * f1 - 6.0 * f2 + f3) / 3.0;
    const double closed = M.omega * std::pow(t.c, M.n - 1) / M.n;
    rep.fit_residual = std::abs(beta / closed - 1.0);
    if (rep.fit_residual > 1e-3)
        throw TailUnresolved("extrapolated volume ratio " + fmt_double(beta) +
                             " disagrees with the tail closed form " + fmt_double(closed));
    rep.beta = beta;
    return rep;
}

double CurvatureReport::K_for_alpha(double a) const {
    double s = pole_scaled;
    for (int i = 0; i < grid->size(); ++i) {
        const double r = grid->node(i);
        s = std::max(s, ric_minus_scaled[static_cast<size_t>(i)] * (1.0 + std::pow(r, a)));
    }
    double slope = 0.0;
    if (tail_slope(*grid, ric_minus_scaled, &slope, nullptr) && slope + a > -1e-3)
        return kInf;  // ric_minus decays no faster than r^{-a}: no finite K
    return s;
}

CurvatureReport curvature_envelope(const ModelManifold& M) {
    CurvatureReport rep;
    rep.grid = M.grid;
    const int m = M.grid->size();
    rep.ric_minus_scaled.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
        rep.ric_minus_scaled[static_cast<size_t>(i)] =
            M.ric_minus_field.value(i) / (M.n - 1);
    rep.pole_scaled = M.ric_minus_field.pole_value() / (M.n - 1);
    rep.sup_ric_minus =
        std::max(M.ric_minus_field.pole_value(), M.ric_minus_field.sup());

    std::vector<double> lam = rep.ric_minus_scaled;
    suffix_max(lam);
    const double lam_pole = std::max(rep.pole_scaled, lam.front());
    const double lam_tail = lam.back();
    rep.lambda = RadialField(M.grid, std::move(lam), lam_pole);

    // b0 = integral of s lambda(s): analytic pole piece, adaptive quadrature
    // across the grid, fitted power tail beyond it.  The quadrature runs in
    // log-radius (s = e^x) so that an integrand concentrated near the pole
    // still covers a sizeable fraction of the interval and cannot slip
    // between the nodes of the first coarse pass.
    const double r_min = M.grid->r_min(), r_max = M.grid->r_max();
    double b0 = lam_pole * r_min * r_min / 2.0;
    b0 += integrate(
        [&](double x) {
            const double s = std::exp(x);
            return s * s * rep.lambda.eval(s);
        },
        std::log(r_min), std::log(r_max), 1e-10, 1e-300);
    if (lam_tail > 0.0) {
        double slope = 0.0, coeff = 0.0;
        const bool ok = tail_slope(*M.grid, rep.lambda.values(), &slope, &coeff);
        if (!ok || slope >= -2.001) {
            rep.b0_divergent = true;
            b0 = kInf;
        } else {
            b0 += power_tail_integral(coeff, slope + 1.0, r_max);
        }
    }
    rep.b0 = b0;

    // Least K over an exponent grid, ties toward the larger exponent.
    double bestK = kInf, bestA = 0.0;
    for (double a = 2.0; a <= 6.0 * M.n + 1e-9; a += 0.5) {
        const double K = rep.K_for_alpha(a);
        if (K < bestK * (1.0 - 1e-12) ||
            (K <= bestK * (1.0 + 1e-12) + 1e-300 && a > bestA)) {
            bestK = K;
            bestA = a;
        }
    }
    if (std::isinf(bestK)) bestA = 0.0;
    rep.K = bestK;
    rep.alpha = bestA;
    return rep;
}

double bishop_gromov_check(const ModelManifold& M, double r, double R) {
    if (!(r > 0.0) || !(R > r)) throw BadParameters("need 0 < r < R");
    const CurvatureReport rep = curvature_envelope(M);
    if (rep.b0_divergent || std::isinf(rep.b0))
        throw EnvelopeDivergent("b0 is infinite; the volume comparison bound is void");
    return M.volume(R) / M.volume(r) -
           std::exp((M.n - 1) * rep.b0) * std::pow(R / r, M.n);
}

}  // namespace warpbench
