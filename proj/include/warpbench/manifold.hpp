#pragma once

#include <string>
#include <utility>
#include <vector>

#include "warpbench/grid.hpp"
#include "warpbench/profile.hpp"

namespace warpbench {

//! A rotationally symmetric model manifold of dimension n with warping
//! profile w, together with precomputed radial fields on a log grid.
//! Immutable after build_manifold; all member functions are const and
//! safe to call concurrently.
struct ModelManifold {
    int n = 3;
    WarpingProfile profile;
    GridPtr grid;
    double omega = 0.0;  // area of the unit (n-1)-sphere

    RadialField ric_radial_field;
    RadialField ric_tangential_field;
    RadialField ric_minus_field;
    RadialField volume_field;  // V(r) = omega * integral_0^r w^{n-1}

    double w(double r) const { return profile.w(r); }
    //! A(r) = omega * w(r)^{n-1}.
    double area(double r) const;
    //! V(r) from the cumulative field; OutOfGrid beyond the grid end.
    double volume(double r) const;

    //! Both Ricci eigenvalues on unit vectors at radius r >= 0:
    //!   radial     = -(n-1) w''/w
    //!   tangential = -w''/w + (n-2)(1 - w'^2)/w^2
    //! r = 0 returns the common limit -(n-1) w'''(0) for analytic kinds and
    //! raises PoleEvaluation for tabulated profiles.
    std::pair<double, double> ricci_eigenvalues(double r) const;

    //! Pointwise max(0, -min eigenvalue), evaluated exactly (not from the
    //! sampled field); quadrature integrands use this.
    double ric_minus_at(double r) const;

    //! Deterministic identity string (dimension, profile, grid) for cache
    //! naming and report provenance.
    std::string cache_key() const;
};

ModelManifold build_manifold(int n, const WarpingProfile& profile, GridSpec grid = {});

//! Pointwise Ric_minus from a profile without a built manifold; r <= 0
//! returns the pole limit max(0, (n-1) w'''(0)).
double ric_minus_of(const WarpingProfile& profile, int n, double r);

//! (V(r), A(r)); OutOfGrid when r exceeds the grid.
std::pair<double, double> volume_and_area(const ModelManifold& M, double r);

//! Limit of V(r)/r^n. Divergent cases report beta = +inf with the flag set;
//! sub-euclidean power tails report beta = 0 with the zero flag.
struct AvrReport {
    double beta = 0.0;
    bool divergent = false;
    bool zero = false;
    //! Relative gap between the Richardson-extrapolated limit and the
    //! closed form omega * c^{n-1} / n from the tail metadata.
    double fit_residual = 0.0;
};

//! Richardson extrapolation of V(r)/r^n at the three radii
//! R_max * {1, 1/2, 1/4}, cross-checked against the tail closed form;
//! throws TailUnresolved when the two disagree beyond 1e-3.
AvrReport asymptotic_volume_ratio(const ModelManifold& M);

//! Curvature summary: the minimal non-increasing envelope lambda with
//! Ric >= -(n-1) lambda(r) g, its integral moment b0, and the least
//! constant K such that Ric >= -(n-1) K / (1 + r^alpha) over a grid of
//! exponents alpha in [2, 6n] (ties toward larger alpha).
struct CurvatureReport {
    RadialField lambda;
    double K = 0.0;
    double alpha = 0.0;
    double b0 = 0.0;        // integral_0^inf s lambda(s) ds; +inf if divergent
    bool b0_divergent = false;
    double sup_ric_minus = 0.0;

    //! Least K for a caller-chosen exponent: sup_r ric_minus(r)(1+r^alpha)/(n-1).
    //! Returns +inf when ric_minus decays too slowly for that exponent.
    double K_for_alpha(double alpha) const;

    // sampled data backing K_for_alpha
    GridPtr grid;
    std::vector<double> ric_minus_scaled;  // ric_minus / (n-1) at the nodes
    double pole_scaled = 0.0;
};

CurvatureReport curvature_envelope(const ModelManifold& M);

//! V(R)/V(r) - e^{(n-1) b0} (R/r)^n for 0 < r < R; non-positive for
//! pole-centered balls. Throws EnvelopeDivergent when b0 = +inf.
double bishop_gromov_check(const ModelManifold& M, double r, double R);

}  // namespace warpbench
