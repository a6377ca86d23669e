#pragma once

#include <memory>
#include <optional>
#include <vector>

namespace warpbench {

//! Radial grid description: log-uniform nodes on [r_min, r_max].
struct GridSpec {
    double r_min = 1e-6;
    double r_max = 1e4;
    int count = 4096;
};

class RadialGrid {
public:
    static std::shared_ptr<const RadialGrid> log_uniform(const GridSpec& spec);

    int size() const { return static_cast<int>(r_.size()); }
    double node(int i) const { return r_[static_cast<size_t>(i)]; }
    const std::vector<double>& nodes() const { return r_; }
    double r_min() const { return r_.front(); }
    double r_max() const { return r_.back(); }
    double dx() const { return dx_; }  // spacing in x = log r

    //! Index of the cell [node(i), node(i+1)] containing r (clamped).
    int cell_of(double r) const;

private:
    std::vector<double> r_;
    double x0_ = 0.0, dx_ = 0.0;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

//! Optional power-law continuation v(r) ~ coeff * r^exponent used when a
//! field is evaluated beyond one end of its grid.
struct PowerContinuation {
    double coeff;
    double exponent;
};

//! A sampled radial scalar function: node values plus a pole value (limit at
//! r = 0) and optional power-law continuations at either end. Evaluation is
//! 4-point Lagrange cubic in log r, one-sided at the boundary cells.
class RadialField {
public:
    RadialField() = default;
    RadialField(GridPtr grid, std::vector<double> values, double pole_value);

    template <typename F>
    static RadialField sample(const GridPtr& grid, F&& f, double pole_value) {
        std::vector<double> v(static_cast<size_t>(grid->size()));
        for (int i = 0; i < grid->size(); ++i) v[static_cast<size_t>(i)] = f(grid->node(i));
        return RadialField(grid, std::move(v), pole_value);
    }

    const RadialGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    const std::vector<double>& values() const { return v_; }
    double value(int i) const { return v_[static_cast<size_t>(i)]; }
    double pole_value() const { return pole_; }

    void set_tail(PowerContinuation t) { tail_ = t; }
    void set_pole_power(PowerContinuation t) { pole_power_ = t; }

    //! Switch in-grid evaluation to interpolating log(value) instead of the
    //! value itself; exact for power laws, a large accuracy gain for fields
    //! like ball volumes that vary over many orders of magnitude. Requires
    //! strictly positive samples.
    void set_log_interpolation();

    //! Interpolated evaluation for r >= 0; throws OutOfGrid beyond the grid
    //! unless a continuation is set.
    double eval(double r) const;

    double sup() const;
    double inf() const;
    //! Index of the node attaining the supremum.
    int argmax() const;

private:
    GridPtr grid_;
    std::vector<double> v_;
    std::vector<double> log_v_;  // non-empty iff log interpolation is on
    double pole_ = 0.0;
    std::optional<PowerContinuation> tail_;
    std::optional<PowerContinuation> pole_power_;
};

//! Uniform-spacing central finite differences in x = log r on a field's raw
//! samples. order6 stencils; indices must be >= 3 and <= size-4.
double fd6_first(const std::vector<double>& v, int i, double dx);
double fd6_second(const std::vector<double>& v, int i, double dx);

}  // namespace warpbench
