#include "warpbench/math_util.hpp"

#include <algorithm>
#include <cstdio>

#include "warpbench/errors.hpp"

namespace warpbench {

std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw FitFailed("line fit needs at least two matched samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw FitFailed("degenerate abscissae in line fit");
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    return {intercept, slope};
}

double fit_line_residual(const std::vector<double>& x, const std::vector<double>& y,
                         double intercept, double slope) {
    double worst = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, std::abs(y[i] - intercept - slope * x[i]));
    return worst;
}

void suffix_max(std::vector<double>& v) {
    for (size_t i = v.size(); i-- > 1;) v[i - 1] = std::max(v[i - 1], v[i]);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace warpbench
