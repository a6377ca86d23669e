#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "warpbench/grid.hpp"
#include "warpbench/manifold.hpp"

namespace warpbench {

//! A radial function supplied analytically: value and first two derivatives.
//! Weights must be smooth at the pole (d1(0) = 0) for the curvature checks.
struct RadialFunction {
    std::function<double(double)> v;
    std::function<double(double)> d1;
    std::function<double(double)> d2;

    static RadialFunction constant(double c);
};

//! Weighted Neumann problem on the geodesic ball B_R(o): weight e^{-f} and
//! positive datum h, both radial. Carries sampled fields for reporting plus
//! the analytic closures the solvers integrate.
struct WeightedBallProblem {
    ModelManifold M;
    double R = 1.0;
    RadialFunction f;
    RadialFunction h;
    RadialField f_field;  // sampled on the ball grid
    RadialField h_field;
    GridPtr ball;              // log grid on [1e-6 R, R]
    double k = 0.0;            // half the oscillation of f over the manifold
    double ric_f_min = 0.0;    // min weighted Ricci eigenvalue over the grid
    bool ric_f_nonneg = true;  // ric_f_min >= -1e-8
};

WeightedBallProblem make_ball_problem(const ModelManifold& M, double R,
                                      RadialFunction f = RadialFunction::constant(0.0),
                                      RadialFunction h = RadialFunction::constant(1.0));

//! One sampled point of the transport Jacobian comparison.
struct JacobianSample {
    double x_bar = 0.0;
    double t = 0.0;
    double detP = 0.0;
    double bound = 0.0;
};

//! Radial Neumann solution and everything derived from it along the way.
struct TransportResult {
    RadialField u;  // u(0) = 0 gauge
    RadialField u_prime;
    double u_prime_R = 0.0;  // boundary derivative; 1 up to quadrature error
    std::pair<double, double> U_set{0.0, 0.0};  // [0, r_u) where |u'| < 1
    bool u_convex = true;  // u'' >= 0 on U: the transport obstruction set is empty
    std::vector<JacobianSample> jacobian_samples;
    std::vector<double> riccati_residuals;  // one per start radius
    bool conjugate_point = false;
    double surjectivity_margin = 0.0;

    //! Exact evaluators (nested quadrature, analytic identities) used by the
    //! geodesic sampling; the fields above are interpolants for reporting.
    std::function<double(double)> du;
    std::function<double(double)> d2u;
};

//! Relative gap in the scaling identity
//! (gradient integral + boundary integral vs n times the h^{n/(n-1)} volume
//! integral); zero for a normalized problem.
double scaling_gap(const WeightedBallProblem& P);

//! Rescale h so the scaling identity holds exactly; idempotent. Throws
//! DegenerateH when the defining integrals vanish.
WeightedBallProblem normalize_scaling(const WeightedBallProblem& P);

//! Solve the weighted radial Neumann problem with unit boundary derivative.
//! Requires a normalized problem (NotNormalized otherwise); fills u, u',
//! U_set, the convexity flag, and the exact evaluators.
TransportResult solve_neumann_radial(const WeightedBallProblem& P);

//! Sample detP and its exponential-weight bound along the geodesic leaving
//! x_bar, horizon r, `steps` uniform sample times. OutsideU if x_bar is not
//! in U. While the weighted curvature is non-negative the bound is asserted
//! pointwise (CheckFailed beyond 1e-9 relative); detP reaching zero marks a
//! conjugate point, sets *conjugate, and stops the sampling.
std::vector<JacobianSample> transport_jacobian(const WeightedBallProblem& P,
                                               const TransportResult& T, double x_bar,
                                               double r, int steps = 512,
                                               bool* conjugate = nullptr);

//! Largest normalized defect of the trace Riccati inequality along the
//! geodesic from x_bar (signed; <= 0 up to roundoff when the weighted
//! curvature is non-negative, genuinely positive otherwise).
double riccati_residual(const WeightedBallProblem& P, const TransportResult& T,
                        double x_bar, double r = -1.0, int steps = 512);

//! Reach of the transport image beyond the radius r - 2R, as a signed
//! margin; >= 0 verifies the surjectivity containment. HorizonTooSmall when
//! r <= 2R. Stores the margin in T.
double surjectivity_check(const WeightedBallProblem& P, TransportResult& T, double r);

//! Full sampling pipeline: 32 start radii uniform in U, horizon 4R, 512
//! time steps each. Fills jacobian_samples and riccati_residuals and
//! returns the worst relative excess detP/bound - 1 over all samples
//! (<= 0 everywhere means the bound held).
double transport_sweep(const WeightedBallProblem& P, TransportResult& T);

struct SobolevVerdict {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

//! Weighted L1 Sobolev comparison on the ball: the h^{n/(n-1)} volume
//! integral to the power (n-1)/n against the gradient-plus-boundary
//! integral times e^{4k/n}/(n beta_f^{1/n}). Requires non-negative weighted
//! curvature (CurvatureHypothesisFails) and a positive finite weighted
//! volume ratio (AVRUndefined). Scale invariant in h.
SobolevVerdict weighted_sobolev_check(const WeightedBallProblem& P);

struct IsoperimetricVerdict {
    double ratio = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

//! The explicit threshold n (1-(n-2)k)^{4(n-1)/(n(n-2))} beta^{1/n}:
//! strictly decreasing in the Kato constant k, increasing in the volume
//! ratio beta. Throws NotGaugeable when (n-2)k >= 1 and AVRUndefined when
//! beta is not positive.
double isoperimetric_constant(int n, double k_infty, double beta);

//! Boundary-area to volume^{(n-1)/n} ratio of the ball B_R against the
//! threshold constant built from the Kato constant and the volume ratio.
IsoperimetricVerdict isoperimetric_check(const ModelManifold& M, double R);

//! Weighted asymptotic volume ratio: limit of the e^{-f} ball volume over
//! r^n. Requires the weight to settle to a limit along the tail and a
//! unit-slope power tail (AVRUndefined otherwise).
double weighted_avr(const ModelManifold& M, const RadialFunction& f);

//! Minimum over the grid (pole included) of the two weighted Ricci
//! eigenvalues ric_radial + f'' and ric_tangential + f' w'/w.
double weighted_ricci_min(const ModelManifold& M, const RadialFunction& f);

}  // namespace warpbench
