#include "warpbench/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "warpbench/errors.hpp"

namespace warpbench {

std::shared_ptr<const RadialGrid> RadialGrid::log_uniform(const GridSpec& spec) {
    if (!(spec.r_min > 0.0) || !(spec.r_max > spec.r_min))
        throw BadParameters("grid needs 0 < r_min < r_max");
    if (spec.count < 16) throw BadParameters("grid needs at least 16 nodes");
    auto g = std::make_shared<RadialGrid>();
    g->r_.resize(static_cast<size_t>(spec.count));
    g->x0_ = std::log(spec.r_min);
    const double x1 = std::log(spec.r_max);
    g->dx_ = (x1 - g->x0_) / (spec.count - 1);
    for (int i = 0; i < spec.count; ++i)
        g->r_[static_cast<size_t>(i)] = std::exp(g->x0_ + g->dx_ * i);
    g->r_.front() = spec.r_min;
    g->r_.back() = spec.r_max;
    return g;
}

int RadialGrid::cell_of(double r) const {
    if (r <= r_.front()) return 0;
    if (r >= r_.back()) return size() - 2;
    int i = static_cast<int>((std::log(r) - x0_) / dx_);
    i = std::clamp(i, 0, size() - 2);
    // guard against log/exp rounding at cell boundaries
    while (i > 0 && r < r_[static_cast<size_t>(i)]) --i;
    while (i < size() - 2 && r >= r_[static_cast<size_t>(i + 1)]) ++i;
    return i;
}

RadialField::RadialField(GridPtr grid, std::vector<double> values, double pole_value)
    : grid_(std::move(grid)), v_(std::move(values)), pole_(pole_value) {
    if (!grid_ || v_.size() != static_cast<size_t>(grid_->size()))
        throw BadParameters("field values do not match the grid");
}

void RadialField::set_log_interpolation() {
    log_v_.resize(v_.size());
    for (size_t i = 0; i < v_.size(); ++i) {
        if (!(v_[i] > 0.0))
            throw BadParameters("log interpolation needs positive samples");
        log_v_[i] = std::log(v_[i]);
    }
}

double RadialField::eval(double r) const {
    if (r < 0.0) throw OutOfGrid("negative radius");
    const double rmin = grid_->r_min();
    const double rmax = grid_->r_max();
    if (r < rmin) {
        if (pole_power_) return pole_power_->coeff * std::pow(r, pole_power_->exponent);
        if (std::isfinite(pole_)) {
            // linear blend in r between the pole limit and the first node
            const double t = r / rmin;
            return pole_ + t * (v_.front() - pole_);
        }
        throw OutOfGrid("field has no pole continuation");
    }
    if (r > rmax) {
        if (tail_) return tail_->coeff * std::pow(r, tail_->exponent);
        throw OutOfGrid("radius beyond the grid tail");
    }
    const int n = grid_->size();
    const int c = grid_->cell_of(r);
    // cubic Lagrange on the 4-node stencil around the cell (shifted at the ends)
    const int i0 = std::clamp(c - 1, 0, n - 4);
    const double x = std::log(r);
    const double xi0 = std::log(grid_->node(i0));
    double u = (x - xi0) / grid_->dx();
    u = std::clamp(u, 0.0, 3.0);
    const std::vector<double>& s = log_v_.empty() ? v_ : log_v_;
    const double p0 = s[static_cast<size_t>(i0)];
    const double p1 = s[static_cast<size_t>(i0 + 1)];
    const double p2 = s[static_cast<size_t>(i0 + 2)];
    const double p3 = s[static_cast<size_t>(i0 + 3)];
    const double l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    const double l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    const double l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    const double l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    const double val = p0 * l0 + p1 * l1 + p2 * l2 + p3 * l3;
    return log_v_.empty() ? val : std::exp(val);
}

double RadialField::sup() const {
    double m = std::isfinite(pole_) ? pole_ : -std::numeric_limits<double>::infinity();
    for (double v : v_) m = std::max(m, v);
    return m;
}

double RadialField::inf() const {
    double m = std::isfinite(pole_) ? pole_ : std::numeric_limits<double>::infinity();
    for (double v : v_) m = std::min(m, v);
    return m;
}

int RadialField::argmax() const {
    return static_cast<int>(std::max_element(v_.begin(), v_.end()) - v_.begin());
}

double fd6_first(const std::vector<double>& v, int i, double dx) {
    const size_t k = static_cast<size_t>(i);
    return (-v[k - 3] + 9.0 * v[k - 2] - 45.0 * v[k - 1] + 45.0 * v[k + 1] -
            9.0 * v[k + 2] + v[k + 3]) /
           (60.0 * dx);
}

double fd6_second(const std::vector<double>& v, int i, double dx) {
    const size_t k = static_cast<size_t>(i);
    return (2.0 * v[k - 3] - 27.0 * v[k - 2] + 270.0 * v[k - 1] - 490.0 * v[k] +
            270.0 * v[k + 1] - 27.0 * v[k + 2] + 2.0 * v[k + 3]) /
           (180.0 * dx * dx);
}

}  // namespace warpbench
