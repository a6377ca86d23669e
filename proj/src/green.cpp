#include "warpbench/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "warpbench/errors.hpp"
#include "warpbench/math_util.hpp"

namespace warpbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonparabolic(const ModelManifold& M) {
    const TailSpec& t = M.profile.tail();
    if (t.power_law && t.p * (M.n - 1) <= 1.0 + 1e-9)
        throw Parabolic("kernel integral diverges: tail power " + fmt_double(t.p) +
                        " gives p(n-1) <= 1");
}

//! Least-squares log-log slope of positive samples over the outermost
//! decade of the grid. Returns false when fewer than 8 usable samples.
bool last_decade_slope(const RadialGrid& grid,
                       const std::function<double(int)>& value_at_node_index,
                       double* slope) {
    std::vector<double> lx, ly;
    const double cut = grid.r_max() / 10.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        if (r < cut) continue;
        const double y = value_at_node_index(i);
        if (y > 0.0 && std::isfinite(y)) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(y));
        }
    }
    if (lx.size() < 8) return false;
    *slope = fit_line(lx, ly).second;
    return true;
}

//! Radial inverse Laplacian applied to a density h >= 0:
//!   phi(r) = integral_r^inf w^{1-n} m(t) dt,  m(t) = integral_0^t h w^{n-1}.
//! Solves -Delta phi = h with phi(inf) = 0 on the model manifold.
struct Potential {
    std::vector<double> u_nodes;
    RadialField m_field;
    double u0 = 0.0;
    double m_total = 0.0;  // +inf when the mass integral diverges
};

Potential radial_potential(const ModelManifold& M, const Fn& density) {
    const int n = M.n;
    const auto& nodes = M.grid->nodes();
    const double r_min = M.grid->r_min(), r_max = M.grid->r_max();
    const auto w = [&](double t) { return M.profile.w(t); };
    const Fn inner = [&](double t) { return density(t) * std::pow(w(t), n - 1); };

    const double m_rmin = integrate(inner, 0.0, r_min, 1e-12, 1e-300);
    const std::vector<double> cum = cumulative_integral(inner, nodes);
    std::vector<double> m_nodes(cum.size());
    for (size_t i = 0; i < cum.size(); ++i) m_nodes[i] = m_rmin + cum[i];

    Potential out;
    out.m_field = RadialField(M.grid, m_nodes, 0.0);
    out.m_field.set_pole_power({m_rmin / std::pow(r_min, n), static_cast<double>(n)});

    // Divergence screens on the outermost decade. The outer integrand must
    // decay strictly faster than 1/r for the potential to exist at all.
    double slope = 0.0;
    const bool have_outer =
        last_decade_slope(*M.grid,
                          [&](int i) {
                              return std::pow(w(nodes[static_cast<size_t>(i)]), 1 - n) *
                                     m_nodes[static_cast<size_t>(i)];
                          },
                          &slope);
    if (have_outer && slope >= -1.0 - 1e-3)
        throw Divergent("potential integrand decays like r^" + fmt_double(slope) +
                        ", not integrable at infinity");

    double inner_slope = 0.0;
    const bool have_inner = last_decade_slope(
        *M.grid, [&](int i) { return inner(nodes[static_cast<size_t>(i)]); },
        &inner_slope);
    const bool mass_finite = !have_inner || inner_slope < -1.0 - 1e-3;
    out.m_total =
        mass_finite ? m_nodes.back() + integrate_to_inf(inner, r_max, 1e-10) : kInf;

    // Tail of the outer integral, with the inner integral continued exactly
    // (valid even when m itself diverges but the potential does not).
    const double m_back = m_nodes.back();
    const Fn outer_ext = [&](double t) {
        const double m_t = m_back + integrate(inner, r_max, t, 1e-9, 1e-300);
        return std::pow(w(t), 1 - n) * m_t;
    };
    const double u_tail = integrate_to_inf(outer_ext, r_max, 1e-9);

    // Outer integral, cell by cell from the outside in. Inside each cell the
    // mass is continued exactly from the node value by a nested quadrature:
    // interpolating m instead would smear its kinks (curvature sign changes,
    // indicator densities) into the potential at the 1e-6 level.
    std::vector<double> cells(nodes.size() - 1, 0.0);
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double a = nodes[i];
        const double m_a = m_nodes[i];
        const Fn outer_cell = [&](double t) {
            const double m_t = m_a + integrate(inner, a, t, 1e-13, 1e-300);
            return std::pow(w(t), 1 - n) * m_t;
        };
        cells[i] = integrate(outer_cell, a, nodes[i + 1], 1e-12, 1e-300);
    }
    out.u_nodes.assign(nodes.size(), u_tail);
    for (size_t i = nodes.size() - 1; i-- > 0;) out.u_nodes[i] = out.u_nodes[i + 1] + cells[i];
    const Fn outer_pole = [&](double t) {
        const double m_t = integrate(inner, 0.0, t, 1e-13, 1e-300);
        return std::pow(w(t), 1 - n) * m_t;
    };
    out.u0 = out.u_nodes.front() + integrate(outer_pole, 0.0, r_min, 1e-11, 1e-300);
    return out;
}

//! Interior node window for finite-difference residuals: the 6th-order
//! stencil needs 3 neighbours each side, and below r ~ 0.05 the 1/r^2 in
//! the radial Laplacian amplifies double roundoff past 1e-8.
bool residual_node(const RadialGrid& grid, int i) {
    return i >= 3 && i <= grid.size() - 4 && grid.node(i) >= 0.05;
}

//! Sup norm of |Laplacian(values) + q| over interior nodes, by 6th-order
//! differences in log radius. Stencils that straddle a support boundary of
//! q are excluded: the zero-order data has a derivative kink there, and a
//! high-order stencil across a kink reports the kink's own interpolation
//! error (first order in the grid step) instead of anything about the
//! solution. The direct boundary-value comparisons in the tests cover
//! those radii independently.
double fd_equation_residual(const ModelManifold& M, const std::vector<double>& pv,
                            const std::vector<double>& q) {
    const double dx = M.grid->dx();
    double res = 0.0;
    for (int i = 0; i < M.grid->size(); ++i) {
        if (!residual_node(*M.grid, i)) continue;
        bool zero = false, nonzero = false;
        for (int j = i - 3; j <= i + 3; ++j)
            (q[static_cast<size_t>(j)] == 0.0 ? zero : nonzero) = true;
        if (zero && nonzero) continue;
        const double r = M.grid->node(i);
        const double px = fd6_first(pv, i, dx);
        const double pxx = fd6_second(pv, i, dx);
        const double lap = (pxx - px) / (r * r) +
                           (M.n - 1) * (M.profile.dw(r) / M.profile.w(r)) * (px / r);
        res = std::max(res, std::abs(lap + q[static_cast<size_t>(i)]));
    }
    return res;
}

}  // namespace

double GreenKernel::deriv(double r) const {
    if (!(r > 0.0)) throw BadParameters("kernel derivative needs r > 0");
    return -std::pow(profile.w(r), 1 - n) / omega;
}

GreenKernel green_pole(const ModelManifold& M) {
    require_nonparabolic(M);
    const int n = M.n;
    const TailSpec& t = M.profile.tail();
    const double r_max = M.grid->r_max();
    const Fn g1 = [&](double s) { return std::pow(M.profile.w(s), 1 - n); };
    const double tail =
        t.power_law ? power_tail_integral(std::pow(t.c, 1 - n), t.p * (1 - n), r_max)
                    : integrate_to_inf(g1, r_max, 1e-12);

    const std::vector<double> suf = suffix_integral(g1, M.grid->nodes());
    std::vector<double> g(suf.size());
    for (size_t i = 0; i < suf.size(); ++i) g[i] = (suf[i] + tail) / M.omega;

    GreenKernel K;
    K.n = n;
    K.omega = M.omega;
    K.profile = M.profile;
    K.nonparabolic = true;
    const double g_rmin = g.front();
    K.G = RadialField(M.grid, std::move(g), kInf);
    K.G.set_pole_power({g_rmin * std::pow(M.grid->r_min(), n - 2), 2.0 - n});
    if (t.power_law) {
        const double q = t.p * (n - 1);
        K.G.set_tail({std::pow(t.c, 1 - n) / (M.omega * (q - 1.0)), 1.0 - q});
    }
    return K;
}

double li_yau_check(const ModelManifold& M) {
    const GreenKernel K = green_pole(M);
    const auto& nodes = M.grid->nodes();
    const double r_max = M.grid->r_max();
    const Fn q = [&](double s) { return s / M.volume(s); };

    double tail;
    const TailSpec& t = M.profile.tail();
    if (t.power_law) {
        const double vol_exp = t.p * (M.n - 1) + 1.0;  // V ~ A r^{vol_exp}
        const double A = M.omega * std::pow(t.c, M.n - 1) / vol_exp;
        tail = power_tail_integral(1.0 / A, -t.p * (M.n - 1), r_max);
    } else {
        const double v_max = M.volume(r_max);
        const Fn wp = [&](double s) { return std::pow(M.profile.w(s), M.n - 1); };
        const Fn q_ext = [&](double s) {
            return s / (v_max + M.omega * integrate(wp, r_max, s, 1e-9, 1e-300));
        };
        tail = integrate_to_inf(q_ext, r_max, 1e-9);
    }

    const std::vector<double> suf = suffix_integral(q, nodes);
    double sup = 0.0;
    for (size_t i = 0; i < suf.size(); ++i) {
        const double denom = suf[i] + tail;
        if (denom > 0.0) sup = std::max(sup, K.G.value(static_cast<int>(i)) / denom);
    }
    return sup;
}

KatoReport kato_constant(const ModelManifold& M) {
    require_nonparabolic(M);
    Potential pot = radial_potential(M, [&](double t) { return M.ric_minus_at(t); });

    KatoReport rep;
    const double max_node = *std::max_element(pot.u_nodes.begin(), pot.u_nodes.end());
    rep.k_infty = std::max(pot.u0, max_node);
    rep.argmax_radius =
        pot.u0 >= max_node
            ? 0.0
            : M.grid->node(static_cast<int>(
                  std::max_element(pot.u_nodes.begin(), pot.u_nodes.end()) -
                  pot.u_nodes.begin()));
    rep.u = RadialField(M.grid, std::move(pot.u_nodes), pot.u0);
    rep.m_total = pot.m_total;
    rep.gauge_feasible = (M.n - 2) * rep.k_infty < 1.0;
    rep.gamma = rep.gauge_feasible ? 1.0 / (1.0 - (M.n - 2) * rep.k_infty) : kInf;
    return rep;
}

double GaugeFunction::dphi(double r) const {
    if (r <= 0.0) return 0.0;
    return -(n - 2) * std::pow(profile.w(r), 1 - n) * m_field.eval(r);
}

double GaugeFunction::fprime(double r) const {
    if (r <= 0.0) return 0.0;
    return -std::pow(profile.w(r), 1 - n) * m_field.eval(r) / phi.eval(r);
}

double GaugeFunction::fsecond(double r) const {
    // At the pole Delta phi = n phi''(0) and f'(0) = 0, so
    // f''(0) = phi''(0) / ((n-2) phi(0)) = -ric_minus(0) / n.
    if (r <= 0.0) return -ric_minus_of(profile, n, 0.0) / n;
    const double p = phi.eval(r);
    const double dp = dphi(r);
    const double ddp = -(n - 1) * (profile.dw(r) / profile.w(r)) * dp -
                       (n - 2) * ric_minus_of(profile, n, r) * p;
    const double fp = dp / ((n - 2) * p);
    return ddp / ((n - 2) * p) - (n - 2) * fp * fp;
}

double GaugeFunction::laplacian_f(double r) const {
    if (r <= 0.0) return n * fsecond(0.0);
    return fsecond(r) + (n - 1) * (profile.dw(r) / profile.w(r)) * fprime(r);
}

GaugeFunction gauge_solve(const ModelManifold& M) {
    KatoReport kato;
    try {
        kato = kato_constant(M);
    } catch (const Divergent&) {
        throw NotGaugeable("Kato constant diverges on this manifold");
    }
    if (!kato.gauge_feasible)
        throw NotGaugeable("(n-2) k_infty = " +
                           fmt_double((M.n - 2) * kato.k_infty) + " >= 1");
    const int n = M.n;
    const double r_max = M.grid->r_max();

    RadialField phi = RadialField::sample(M.grid, [](double) { return 1.0; }, 1.0);
    Potential pot;
    int iterations = 0;
    for (int it = 1; it <= 1000; ++it) {
        const Fn dens = [&](double s) {
            const double p = s > r_max ? 1.0 : phi.eval(s);
            return M.ric_minus_at(s) * p;
        };
        pot = radial_potential(M, dens);
        std::vector<double> next(pot.u_nodes.size());
        for (size_t i = 0; i < next.size(); ++i) next[i] = 1.0 + (n - 2) * pot.u_nodes[i];
        const double next_pole = 1.0 + (n - 2) * pot.u0;
        double diff = std::abs(next_pole - phi.pole_value());
        for (size_t i = 0; i < next.size(); ++i)
            diff = std::max(diff, std::abs(next[i] - phi.value(static_cast<int>(i))));
        phi = RadialField(M.grid, std::move(next), next_pole);
        iterations = it;
        if (diff < 1e-10) break;
        if (it == 1000) throw NoConvergence("gauge fixed point not settled in 1000 passes");
    }

    GaugeFunction g;
    g.n = n;
    g.profile = M.profile;
    g.gamma = kato.gamma;
    g.iterations = iterations;
    g.m_field = pot.m_field;
    g.phi = phi;

    const double slack = 1e-9 * kato.gamma;
    if (phi.inf() < 1.0 - slack || std::max(phi.sup(), phi.pole_value()) > kato.gamma + slack)
        throw CheckFailed("gauge function violates the 1 <= phi <= gamma sandwich");

    {
        std::vector<double> fv(static_cast<size_t>(M.grid->size()));
        for (int i = 0; i < M.grid->size(); ++i)
            fv[static_cast<size_t>(i)] =
                std::log1p((n - 2) * pot.u_nodes[static_cast<size_t>(i)]) / (n - 2);
        g.f = RadialField(M.grid, std::move(fv), std::log1p((n - 2) * pot.u0) / (n - 2));
    }

    // Honest discretization residual: 6th-order finite differences of the
    // sampled phi against Delta phi + (n-2) ric_minus phi = 0.
    const auto& pv = phi.values();
    std::vector<double> q(pv.size());
    for (int i = 0; i < M.grid->size(); ++i)
        q[static_cast<size_t>(i)] = (n - 2) * M.ric_minus_at(M.grid->node(i)) *
                                    pv[static_cast<size_t>(i)];
    g.residual = fd_equation_residual(M, pv, q);
    return g;
}

double conformal_bakry_emery_check(const ModelManifold& M, const GaugeFunction& g) {
    double mn = kInf;
    for (int i = -1; i < M.grid->size(); ++i) {
        const double r = i < 0 ? 0.0 : M.grid->node(i);
        double rad, tan;
        if (i < 0) {
            if (M.profile.kind() == ProfileKind::tabulated) continue;
            std::tie(rad, tan) = M.ricci_eigenvalues(0.0);
        } else {
            rad = M.ric_radial_field.value(i);
            tan = M.ric_tangential_field.value(i);
        }
        const double lf = g.laplacian_f(r);
        const double fp = g.fprime(r);
        const double e_rad = rad - lf - (M.n - 2) * fp * fp;
        const double e_tan = tan - lf;
        mn = std::min(mn, std::min(e_rad, e_tan));
    }
    return mn;
}

PoissonReport poisson_bounded(const ModelManifold& M, const Fn& h) {
    require_nonparabolic(M);
    Potential pot = radial_potential(M, h);
    PoissonReport rep;
    const double max_node = *std::max_element(pot.u_nodes.begin(), pot.u_nodes.end());
    rep.sup_norm = std::max(pot.u0, max_node);
    rep.phi = RadialField(M.grid, std::move(pot.u_nodes), pot.u0);

    const auto& pv = rep.phi.values();
    std::vector<double> q(pv.size());
    for (int i = 0; i < M.grid->size(); ++i) q[static_cast<size_t>(i)] = h(M.grid->node(i));
    rep.residual = fd_equation_residual(M, pv, q);
    return rep;
}

std::pair<double, double> energy_identity_check(const ModelManifold& M, double r) {
    if (!(r > 0.0)) throw BadParameters("energy check needs r > 0");
    if (r > M.grid->r_max()) throw OutOfGrid("radius beyond the grid end");
    const GreenKernel K = green_pole(M);
    const int n = M.n;
    // |grad G|^2 integrated over the exterior shell measure.
    const Fn e = [&](double t) {
        const double gp = K.deriv(t);
        return gp * gp * M.omega * std::pow(M.profile.w(t), n - 1);
    };
    const TailSpec& ts = M.profile.tail();
    const double r_max = M.grid->r_max();
    const double tail =
        ts.power_law
            ? power_tail_integral(std::pow(ts.c, 1 - n), ts.p * (1 - n), r_max) / M.omega
            : integrate_to_inf(e, r_max, 1e-12);
    const double energy = integrate(e, r, r_max, 1e-11, 1e-300) + tail;
    const double g_r = K.at(r);
    const double bound = 4.0 * g_r;
    if (energy > bound * (1.0 + 1e-12))
        throw CheckFailed("exterior Dirichlet energy exceeds 4 G(r)");
    if (std::abs(energy / g_r - 1.0) > 1e-6)
        throw CheckFailed("exterior Dirichlet energy deviates from G(r) by " +
                          fmt_double(energy / g_r - 1.0));
    return {energy, bound};
}

}  // namespace warpbench
