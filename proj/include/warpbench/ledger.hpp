#pragma once

#include <string>
#include <utility>
#include <vector>

#include "warpbench/manifold.hpp"

namespace warpbench {

//! Scalar stand-ins for the dimensional constants that the source
//! inequalities leave anonymous ("there exists C(n) such that ...").
//! Every bound below is exact in its exponents and monotonicities; only
//! these prefactors are adjustable, and dominance_check records the
//! smallest values that put each bound above the exactly computed
//! quantity on a given manifold.
struct Calibration {
    double c_harnack = 1.0;      // gradient/Harnack chain constant
    double c_meanvalue = 1.0;    // local mean-value inequality constant
    double c_litam = 1.0;        // inner exponent of the energy-decay constant
    double c_green = 1.0;        // kernel upper-bound prefactor
    double c_oscillation = 1.0;  // oscillation-chain prefactor
    double c_ab = 1.0;           // near-region constant of the quadratic-decay bound

    //! Marker recorded with every calibrated ledger entry.
    static constexpr const char* kShapeFlag = "shape-exact, constant-calibrated";

    //! BadParameters unless every entry is positive.
    void validate() const;
};

//! One evaluated constant with its provenance: a human-readable formula,
//! a descriptive anchor tag naming the chain it comes from ("plumbing"
//! for invented machinery), the inputs it was evaluated at, and the
//! calibration in force.
struct LedgerEntry {
    std::string name;
    double value = 0.0;
    std::string formula;
    std::string anchor;
    std::string flags;  // kShapeFlag for calibrated bounds, "exact" otherwise
    std::vector<std::pair<std::string, double>> inputs;
    Calibration calibration;
};

struct ConstantLedger {
    std::vector<LedgerEntry> entries;

    void add(LedgerEntry e) { entries.push_back(std::move(e)); }
    const LedgerEntry* find(const std::string& name) const;
    //! JSON array of entries (name, value, formula, anchor, flags, inputs,
    //! calibration), doubles serialized shortest-round-trip.
    std::string to_json() const;
};

//! Number of balls of radius alpha*R that cover the annulus between radii
//! R and Q*R under two-sided Ahlfors volume bounds v0 r^n <= V(r) <= V0 r^n:
//!   v0^{-1} (2/alpha)^n [ V0 (Q + alpha/2)^n - v0 (1 - alpha/2)^n ].
//! Requires 0 < alpha <= (Q-1)/4 and 0 < v0 <= V0 (BadParameters).
double covering_bound(double v0, double V0, double alpha, double Q, int n);

//! Specialization Q=2, alpha=1/4: a radius-independent count for dyadic
//! annuli.
double covering_bound_dyadic(double v0, double V0, int n);

//! Specialization Q=2^6, alpha=1/(12R) (fixed cover radius R*alpha = 1/12):
//! grows like R^n. Requires R > 1/6 (BadParameters).
double covering_bound_annulus(double v0, double V0, int n, double R);

//! Two-sided Harnack constant for positive harmonic functions on a ball of
//! radius R under Ric >= -(n-1) theta: exp(c_harnack (1 + sqrt(theta) R)).
double harnack_constant(int n, double theta, double R, const Calibration& cal = {});

//! Local mean-value constant for nonnegative g with Delta g >= -lambda g
//! on a ball of radius R under Ric >= -(n-1) theta:
//!   c * exp(c (R sqrt(theta) + R^2 lambda)),  c = c_meanvalue.
//! At theta = 9K/s^2, lambda = 2(n-1) theta, R = s/16 the value is
//! independent of the scale s.
double meanvalue_constant(int n, double theta, double lambda, double R,
                          const Calibration& cal = {});

//! Kernel-energy constant K^{-n/2} exp((1+xi) exp(c_litam (1 + sqrt(K)))).
//! Blows up as K -> 0+ (KZero), which is what the sharper polynomial
//! kernel bound below exists to avoid.
double litam_fan_constant(double K, int n, double xi, const Calibration& cal = {});

//! Oscillation of a harmonic function across the unbounded region beyond
//! radius r, per unit Dirichlet energy: C * delta^{3n/2-1} * r^{1-n/2}.
//! The prefactor is assembled from the covering count, the dyadic
//! oscillation sum, and the mean-value constants of the two ball scales;
//! delta < 1 is reduced to delta = 1 with K doubled.
double oscillation_chain_bound(int n, double K, double v0, double V0, double delta,
                               double r, const Calibration& cal = {});

//! The (delta, r) exponent pair (3n/2 - 1, 1 - n/2) of the bound above.
std::pair<double, double> oscillation_exponents(int n);

//! Kernel upper bound at distance r <= 1 from a point at distance delta
//! from the curvature center: c_green * max{1, delta^{3n-2}} * r^{2-n}.
//! r > 1 raises RadiusTooLarge (the constant would grow exponentially in
//! the radius cap and is not extrapolated); delta < 1 falls under the
//! doubled-K reduction, which leaves the value unchanged because the
//! prefactor carries no explicit K.
double green_bound(int n, double K, double v0, double V0, double delta, double r,
                   const Calibration& cal = {});

//! The (r, delta) exponent pair (2 - n, 3n - 2) of the bound above.
std::pair<double, double> green_exponents(int n);

//! Upper bound for the elliptic Kato constant under a polynomial
//! curvature envelope Ric >= -(n-1) K / (1 + r^alpha), alpha > 3n:
//!   C1 = (n-1) K c_green sup_delta [ I1 + I2 + I3 ],
//! the three-region integrals evaluated by quadrature with Ahlfors area
//! elements n v0 r^{n-1}; the sup runs over delta = 0 plus a 64-point log
//! grid on [1e-2, 1e3] (each term has a monotone decaying tail beyond).
//! Linear and vanishing in K. alpha <= 3n raises AlphaTooSmall.
double kato_bound_case_a(int n, double alpha, double beta, double xi, double K,
                         double v0, const Calibration& cal = {});

//! Upper bound for the elliptic Kato constant under asymptotically
//! nonnegative curvature with moment b0:
//!   C1 = (n-1) c_green [ 2 b0 C_ab(n, v0) + 8 b0 v0 + 8 n b0 v0 ],
//! C_ab = c_ab n v0 (1/2 + 6^{n-2}/(n-2)) the near-region constant.
//! Exactly linear in b0.
double kato_bound_case_b(int n, double beta, double b0, double v0,
                         const Calibration& cal = {});

//! Largest K for which kato_bound_case_a stays below the gauge threshold
//! 1/(n-2), located by bisection (the delta-sup is K-free and hoisted).
double kato_threshold_K(int n, double alpha, double beta, double xi, double v0,
                        const Calibration& cal = {});

//! Largest b0 for which kato_bound_case_b stays below 1/(n-2), by bisection.
double kato_threshold_b0(int n, double beta, double v0, const Calibration& cal = {});

//! The isoperimetric constant triple at a given Kato constant:
//!   iso   = n (1 - (n-2) k)^{4(n-1)/(n(n-2))} beta^{1/n}
//!   flat  = n beta^{1/n}, the sharp limit as k -> 0
//!   gamma = 1 / (1 - (n-2) k)
//! Internally asserts the gamma-form identity
//! iso = n beta^{1/n} gamma^{-(4n-4)/(n(n-2))} to 1e-12 (CheckFailed).
//! (n-2) k >= 1 raises NotGaugeable.
struct SobolevConstants {
    double iso = 0.0;
    double flat = 0.0;
    double gamma = 1.0;
};
SobolevConstants sobolev_constants(int n, double beta, double k_infty);

//! Cross-validation of the calibrated bounds against the exact modules on
//! one manifold: minimal dominating calibrations for the kernel bound and
//! both Kato bounds, dominance asserts on the (delta, r) grid
//! {0,1,2,5} x {0.1,...,1.0}, log-log exponent regressions (2-n in r,
//! 3n-2 in delta, to 1e-6), and the bisected curvature thresholds.
//! Violations raise DominanceFailure; a transcription bug, not a
//! hypothesis failure.
struct DominanceReport {
    double c_star_green = 0.0;   // max_r G(r) r^{n-2} over the r grid
    double c_star_kato_a = 0.0;  // k_infty / case-a value at unit c_green
    double c_star_kato_b = 0.0;  // same for case b; 0 when b0 = 0
    bool case_b_applicable = false;  // b0 finite
    double slope_r = 0.0;
    double slope_delta = 0.0;
    double k_infty_exact = 0.0;
    double K_tilde = 0.0;   // case-a threshold at the effective calibration
    double b0_tilde = 0.0;  // case-b threshold; 0 when inapplicable
    double v0_emp = 0.0, V0_emp = 0.0, xi_emp = 0.0;
    double K_env = 0.0, alpha_env = 0.0, beta = 0.0, b0 = 0.0;
    Calibration effective;  // input calibration with c_green raised to dominate
};
DominanceReport dominance_check(const ModelManifold& M, const Calibration& cal = {});

//! Evaluates every ledger formula at the manifold's measured inputs
//! (volume ratio bounds, curvature envelope, exact Kato constant) and
//! returns the entries with provenance; the exported JSON is the module's
//! external interface.
ConstantLedger build_ledger(const ModelManifold& M, const Calibration& cal = {});

}  // namespace warpbench
