#pragma once

#include <utility>

#include "warpbench/manifold.hpp"
#include "warpbench/quadrature.hpp"

namespace warpbench {

//! Pole Green kernel of a non-parabolic model manifold, normalized so that
//! minus the Laplacian of G is the unit Dirac mass at the pole:
//!   G(r) = (1/omega) * integral_r^inf w(t)^{1-n} dt.
struct GreenKernel {
    RadialField G;  // sampled values; power continuations at both ends when available
    bool nonparabolic = true;
    int n = 3;
    double omega = 0.0;
    WarpingProfile profile;

    double at(double r) const { return G.eval(r); }
    //! Exact radial derivative -w(r)^{1-n} / omega.
    double deriv(double r) const;
};

//! Throws Parabolic when the kernel integral diverges (power tails with
//! p (n-1) <= 1).
GreenKernel green_pole(const ModelManifold& M);

//! sup over the grid of G(r) / integral_r^inf t / V(t) dt — the constant
//! implied by the classical two-sided Green kernel estimate. Finite and
//! r-independent (= 1/n) on flat space.
double li_yau_check(const ModelManifold& M);

//! Elliptic Kato data for the potential u(r) = G-transform of ric_minus.
struct KatoReport {
    double k_infty = 0.0;
    RadialField u;  // pole_value is the limit at r = 0 (the supremum)
    double argmax_radius = 0.0;
    bool gauge_feasible = true;
    double gamma = 1.0;    // 1 / (1 - (n-2) k_infty) when feasible
    double m_total = 0.0;  // integral_0^inf ric_minus w^{n-1}
};

//! Exact Kato constant by nested quadrature with analytic tails.
//! Throws Parabolic; throws Divergent when the outer integrand fails to
//! decay like r^{-1-eps} (eps = 1e-3), e.g. constant negative curvature.
KatoReport kato_constant(const ModelManifold& M);

//! Gauge function: the fixed point of phi -> 1 + (n-2) G[ric_minus phi],
//! i.e. the bounded solution of Delta phi = -(n-2) ric_minus phi, phi(inf)=1.
struct GaugeFunction {
    RadialField phi;
    RadialField f;        // log(phi) / (n-2)
    RadialField m_field;  // m(r) = integral_0^r ric_minus phi w^{n-1}
    int iterations = 0;
    double residual = 0.0;  // sup-norm of Delta phi + (n-2) ric_minus phi
    double gamma = 1.0;
    int n = 3;
    WarpingProfile profile;

    //! Exact derivative forms implied by the fixed point.
    double dphi(double r) const;        // -(n-2) w^{1-n} m(r)
    double fprime(double r) const;      // dphi / ((n-2) phi)
    double fsecond(double r) const;     // from the ODE for phi
    double laplacian_f(double r) const; // f'' + (n-1)(w'/w) f'
};

//! Throws NotGaugeable when (n-2) k_infty >= 1; NoConvergence past 10^3
//! iterations (contraction factor is (n-2) k_infty < 1).
GaugeFunction gauge_solve(const ModelManifold& M);

//! Minimum over the grid of the smaller eigenvalue of
//!   Ric - (Delta f) g - (n-2) df x df,   f = log(phi)/(n-2);
//! the conformal change by phi^2 makes this non-negative.
double conformal_bakry_emery_check(const ModelManifold& M, const GaugeFunction& g);

//! Bounded solution of -Delta phi_h = h for radial h >= 0.
struct PoissonReport {
    RadialField phi;
    double sup_norm = 0.0;
    //! Sup-norm of Delta phi_h + h over interior nodes by finite
    //! differences; meaningful for smooth h only (reported, not enforced).
    double residual = 0.0;
};

PoissonReport poisson_bounded(const ModelManifold& M, const Fn& h);

//! (energy, bound) with energy = integral over the exterior of the ball of
//! |grad G|^2 and bound = 4 G(r); on model manifolds energy = G(r) exactly.
std::pair<double, double> energy_identity_check(const ModelManifold& M, double r);

}  // namespace warpbench
