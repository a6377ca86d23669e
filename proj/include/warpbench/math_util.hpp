#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace warpbench {

inline constexpr double pi = 3.14159265358979323846;

//! Surface area of the unit (n-1)-sphere in R^n: 2 pi^{n/2} / Gamma(n/2).
inline double unit_sphere_area(int n) {
    return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

//! Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) { return unit_sphere_area(n) / n; }

//! Least-squares line fit y ~ a + b x. Returns {intercept, slope}.
std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y);

//! Max absolute residual of the fit above.
double fit_line_residual(const std::vector<double>& x, const std::vector<double>& y,
                         double intercept, double slope);

//! In-place suffix maximum: v[i] <- max(v[i], v[i+1], ...).
void suffix_max(std::vector<double>& v);

//! FNV-1a 64-bit hash of a byte string; used for cache keys.
std::uint64_t fnv1a(const std::string& s);

//! Deterministic shortest-stable formatting of a double (%.17g).
std::string fmt_double(double v);

}  // namespace warpbench
