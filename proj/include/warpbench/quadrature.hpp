#pragma once

#include <functional>
#include <vector>

namespace warpbench {

using Fn = std::function<double(double)>;

//! Adaptive Gauss-Kronrod 7-15 integration of f over [a, b].
//! Subdivides until the embedded error estimate of each piece passes
//! max(abs_tol, rel_tol * |running integral|); depth-capped bisection.
double integrate(const Fn& f, double a, double b, double rel_tol = 1e-11,
                 double abs_tol = 0.0);

//! Integral of f over [a, infinity) via the substitution t = a/x (a > 0),
//! which maps the tail onto (0, 1]; for a = 0 splits at 1. Used where a
//! tail-model-free value is required (oracles, exponential tails).
double integrate_to_inf(const Fn& f, double a, double rel_tol = 1e-11);

//! Closed-form tail integral of c*t^q over [R, infinity); requires q < -1.
double power_tail_integral(double c, double q, double R);

//! Integrals of f over the consecutive cells [nodes[i], nodes[i+1]];
//! the result has nodes.size() - 1 entries. Each cell starts from a single
//! GK15 rule and bisects adaptively while the embedded error estimate is
//! above ~1e-12 of the cell value.
std::vector<double> cell_integrals(const Fn& f, const std::vector<double>& nodes);

//! Prefix integrals over consecutive cells of a node vector:
//! out[i] = integral of f over [nodes[0], nodes[i]] (out[0] = 0).
std::vector<double> cumulative_integral(const Fn& f, const std::vector<double>& nodes);

//! Suffix integrals: out[i] = integral of f over [nodes[i], nodes.back()]
//! (out.back() = 0), accumulated from the outside in. Unlike subtracting
//! prefix sums this keeps small exterior tails free of cancellation against
//! a large near-origin bulk.
std::vector<double> suffix_integral(const Fn& f, const std::vector<double>& nodes);

//! Interval-doubling verification: integrates with the tolerance tightened
//! one decade and returns the refined value; rel_diff reports the shift.
double integrate_verified(const Fn& f, double a, double b, double rel_tol,
                          double* rel_diff = nullptr);

}  // namespace warpbench
