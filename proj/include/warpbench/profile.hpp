#pragma once

#include <memory>
#include <string>
#include <vector>

namespace warpbench {

enum class ProfileKind { euclidean, hyperbolic, cone, perturbed, tabulated };

//! Asymptotic behaviour of w at large radius. For power_law = true,
//! w(r) ~ c * r^p; exponential kinds (hyperbolic) set power_law = false and
//! carry the growth rate instead, which marks volume/Green tails divergent.
struct TailSpec {
    bool power_law = true;
    double p = 1.0;
    double c = 1.0;
    double rate = 0.0;  // exponential rate when power_law = false
};

//! Warping function w(r) of a rotationally symmetric metric
//! dr^2 + w(r)^2 * (unit-sphere metric). Pole-regular: w(0) = 0, w'(0) = 1,
//! w''(0) = 0; positive for r > 0.
class WarpingProfile {
public:
    //! Default-constructed profile is the euclidean one, w(r) = r.
    WarpingProfile() = default;

    static WarpingProfile euclidean();
    //! w = sinh(kappa r) / kappa
    static WarpingProfile hyperbolic(double kappa);
    //! Smoothed cone: w = a r + (1 - a) * width * tanh(r / width)
    static WarpingProfile cone(double slope, double width = 1.0);
    //! Cubic bump: w = r + eps * r^3 * exp(-(r/sigma)^2)
    static WarpingProfile perturbed(double eps, double sigma = 1.0);
    //! From samples (r_i, w_i); evaluation by C2 cubic spline, one-sided at
    //! the ends; tail behaviour must be supplied.
    static WarpingProfile tabulated(std::vector<double> r, std::vector<double> w,
                                    TailSpec tail);

    double w(double r) const;
    double dw(double r) const;
    double d2w(double r) const;
    //! w'(r) - 1 without cancellation (exact expressions per kind); feeds the
    //! tangential curvature term (1 - w'^2) = -dw1 * (2 + dw1).
    double dw_minus_one(double r) const;
    //! Third derivative at the pole; the common limit of w''/w as r -> 0.
    double d3w_origin() const;

    ProfileKind kind() const { return kind_; }
    const TailSpec& tail() const { return tail_; }
    //! Stable description string (kind + parameters), used for provenance
    //! and cache keys.
    const std::string& describe() const { return describe_; }

    //! The profile s * w(r / s); closed within each analytic kind.
    WarpingProfile rescaled(double s) const;

    //! Checks pole conditions and positivity on a sample sweep; throws
    //! PoleConditionViolated / NonPositiveWarp.
    void validate() const;

private:
    struct Tabulated;
    ProfileKind kind_ = ProfileKind::euclidean;
    double a_ = 0.0, b_ = 0.0;  // kind parameters
    TailSpec tail_;
    std::string describe_ = "euclidean";
    std::shared_ptr<const Tabulated> table_;
};

}  // namespace warpbench
