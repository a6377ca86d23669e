#include "warpbench/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "warpbench/errors.hpp"
#include "warpbench/math_util.hpp"

namespace warpbench {

//! Cubic spline through (x_i, y_i): second derivatives M solved with a
//! natural left end (matches the pole condition w''(0) = 0) and a
//! not-a-knot right end.
struct WarpingProfile::Tabulated {
    std::vector<double> x, y, M;

    void build() {
        const size_t n = x.size();
        M.assign(n, 0.0);
        if (n < 4) throw BadParameters("tabulated profile needs at least 4 samples");
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
        b[0] = 1.0;  // natural: M0 = 0
        for (size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x[i] - x[i - 1];
            const double h1 = x[i + 1] - x[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        // Forward elimination of the tridiagonal interior rows.
        for (size_t i = 1; i + 1 < n; ++i) {
            const double m = a[i] / b[i - 1];
            b[i] -= m * c[i - 1];
            d[i] -= m * d[i - 1];
        }
        // Not-a-knot right end: third derivative continuous at x[n-2],
        //   -M[n-3]/h0 + (1/h0 + 1/h1) M[n-2] - M[n-1]/h1 = 0.
        // Substitute M[n-3] from its reduced row, then solve the remaining
        // 2x2 system together with the reduced row for i = n-2.
        const double h0 = x[n - 2] - x[n - 3];
        const double h1 = x[n - 1] - x[n - 2];
        const double A1 = 1.0 / h0 + 1.0 / h1 + c[n - 3] / (h0 * b[n - 3]);
        const double B1 = -1.0 / h1;
        const double D1 = d[n - 3] / (h0 * b[n - 3]);
        const double det = A1 * c[n - 2] - B1 * b[n - 2];
        if (det == 0.0) throw FitFailed("singular spline system");
        M[n - 1] = (A1 * d[n - 2] - b[n - 2] * D1) / det;
        M[n - 2] = (d[n - 2] - c[n - 2] * M[n - 1]) / b[n - 2];
        for (size_t i = n - 2; i-- > 0;)
            M[i] = (d[i] - c[i] * M[i + 1]) / b[i];
    }

    size_t piece(double r) const {
        auto it = std::upper_bound(x.begin(), x.end(), r);
        size_t i = static_cast<size_t>(it - x.begin());
        if (i == 0) i = 1;
        if (i >= x.size()) i = x.size() - 1;
        return i - 1;
    }

    double value(double r) const {
        const size_t i = piece(r);
        const double h = x[i + 1] - x[i];
        const double A = (x[i + 1] - r) / h;
        const double B = (r - x[i]) / h;
        return A * y[i] + B * y[i + 1] +
               ((A * A * A - A) * M[i] + (B * B * B - B) * M[i + 1]) * h * h / 6.0;
    }

    double deriv(double r) const {
        const size_t i = piece(r);
        const double h = x[i + 1] - x[i];
        const double A = (x[i + 1] - r) / h;
        const double B = (r - x[i]) / h;
        return (y[i + 1] - y[i]) / h +
               ((3.0 * B * B - 1.0) * M[i + 1] - (3.0 * A * A - 1.0) * M[i]) * h / 6.0;
    }

    double second(double r) const {
        const size_t i = piece(r);
        const double h = x[i + 1] - x[i];
        const double A = (x[i + 1] - r) / h;
        const double B = (r - x[i]) / h;
        return A * M[i] + B * M[i + 1];
    }

    double third_at_origin() const { return (M[1] - M[0]) / (x[1] - x[0]); }
};

WarpingProfile WarpingProfile::euclidean() {
    WarpingProfile p;
    p.kind_ = ProfileKind::euclidean;
    p.tail_ = {true, 1.0, 1.0, 0.0};
    p.describe_ = "euclidean";
    return p;
}

WarpingProfile WarpingProfile::hyperbolic(double kappa) {
    if (!(kappa > 0.0)) throw BadParameters("hyperbolic profile needs kappa > 0");
    WarpingProfile p;
    p.kind_ = ProfileKind::hyperbolic;
    p.a_ = kappa;
    p.tail_ = {false, 0.0, 0.0, kappa};
    p.describe_ = "hyperbolic kappa=" + fmt_double(kappa);
    return p;
}

WarpingProfile WarpingProfile::cone(double slope, double width) {
    if (!(slope > 0.0) || !(width > 0.0))
        throw BadParameters("cone profile needs slope > 0 and width > 0");
    WarpingProfile p;
    p.kind_ = ProfileKind::cone;
    p.a_ = slope;
    p.b_ = width;
    p.tail_ = {true, 1.0, slope, 0.0};
    p.describe_ = "cone a=" + fmt_double(slope) + " width=" + fmt_double(width);
    return p;
}

WarpingProfile WarpingProfile::perturbed(double eps, double sigma) {
    if (!(sigma > 0.0)) throw BadParameters("perturbed profile needs sigma > 0");
    WarpingProfile p;
    p.kind_ = ProfileKind::perturbed;
    p.a_ = eps;
    p.b_ = sigma;
    p.tail_ = {true, 1.0, 1.0, 0.0};
    p.describe_ = "perturbed eps=" + fmt_double(eps) + " sigma=" + fmt_double(sigma);
    p.validate();
    return p;
}

WarpingProfile WarpingProfile::tabulated(std::vector<double> r, std::vector<double> w,
                                         TailSpec tail) {
    if (r.size() != w.size() || r.size() < 4)
        throw BadParameters("tabulated profile needs >= 4 matched samples");
    if (r.front() != 0.0) throw PoleConditionViolated("table must start at r = 0");
    for (size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw BadParameters("table radii must increase strictly");
    WarpingProfile p;
    p.kind_ = ProfileKind::tabulated;
    p.tail_ = tail;
    auto t = std::make_shared<Tabulated>();
    t->x = std::move(r);
    t->y = std::move(w);
    t->build();
    p.table_ = std::move(t);
    std::ostringstream os;
    os << "tabulated count=" << p.table_->x.size() << " rmax=" << fmt_double(p.table_->x.back());
    p.describe_ = os.str();
    p.validate();
    return p;
}

double WarpingProfile::w(double r) const {
    switch (kind_) {
        case ProfileKind::euclidean: return r;
        case ProfileKind::hyperbolic: return std::sinh(a_ * r) / a_;
        case ProfileKind::cone: return a_ * r + (1.0 - a_) * b_ * std::tanh(r / b_);
        case ProfileKind::perturbed: {
            // Beyond u ~ 60 the bump is below double precision relative to r;
            // returning the plain euclidean value keeps the far zone exactly
            // flat instead of polluting it with subnormal residue.
            const double u = (r / b_) * (r / b_);
            if (u > 60.0) return r;
            return r + a_ * r * r * r * std::exp(-u);
        }
        case ProfileKind::tabulated:
            if (r > table_->x.back())
                return tail_.c * std::pow(r, tail_.p);
            return table_->value(r);
    }
    return 0.0;
}

double WarpingProfile::dw(double r) const {
    switch (kind_) {
        case ProfileKind::euclidean: return 1.0;
        case ProfileKind::hyperbolic: return std::cosh(a_ * r);
        case ProfileKind::cone: {
            const double s = 1.0 / std::cosh(r / b_);
            return a_ + (1.0 - a_) * s * s;
        }
        case ProfileKind::perturbed: {
            const double s2 = b_ * b_;
            const double u = r * r / s2;
            if (u > 60.0) return 1.0;  // bump below double precision
            return 1.0 + a_ * std::exp(-u) * (3.0 * r * r - 2.0 * r * r * r * r / s2);
        }
        case ProfileKind::tabulated:
            if (r > table_->x.back())
                return tail_.c * tail_.p * std::pow(r, tail_.p - 1.0);
            return table_->deriv(r);
    }
    return 0.0;
}

double WarpingProfile::d2w(double r) const {
    switch (kind_) {
        case ProfileKind::euclidean: return 0.0;
        case ProfileKind::hyperbolic: return a_ * std::sinh(a_ * r);
        case ProfileKind::cone: {
            const double s = 1.0 / std::cosh(r / b_);
            return -2.0 * (1.0 - a_) / b_ * s * s * std::tanh(r / b_);
        }
        case ProfileKind::perturbed: {
            const double s2 = b_ * b_;
            const double u = r * r / s2;
            if (u > 60.0) return 0.0;  // bump below double precision
            return a_ * std::exp(-u) *
                   (6.0 * r - 14.0 * r * r * r / s2 + 4.0 * std::pow(r, 5) / (s2 * s2));
        }
        case ProfileKind::tabulated:
            if (r > table_->x.back())
                return tail_.c * tail_.p * (tail_.p - 1.0) * std::pow(r, tail_.p - 2.0);
            return table_->second(r);
    }
    return 0.0;
}

double WarpingProfile::dw_minus_one(double r) const {
    switch (kind_) {
        case ProfileKind::euclidean: return 0.0;
        case ProfileKind::hyperbolic: {
            const double s = std::sinh(0.5 * a_ * r);
            return 2.0 * s * s;  // cosh(x) - 1 without cancellation
        }
        case ProfileKind::cone: {
            const double t = std::tanh(r / b_);
            return -(1.0 - a_) * t * t;  // (1-a)(sech^2 - 1)
        }
        case ProfileKind::perturbed: {
            const double s2 = b_ * b_;
            const double u = r * r / s2;
            if (u > 60.0) return 0.0;  // bump below double precision
            return a_ * std::exp(-u) * (3.0 * r * r - 2.0 * r * r * r * r / s2);
        }
        case ProfileKind::tabulated:
            return dw(r) - 1.0;
    }
    return 0.0;
}

double WarpingProfile::d3w_origin() const {
    switch (kind_) {
        case ProfileKind::euclidean: return 0.0;
        case ProfileKind::hyperbolic: return a_ * a_;
        case ProfileKind::cone: return -2.0 * (1.0 - a_) / (b_ * b_);
        case ProfileKind::perturbed: return 6.0 * a_;
        case ProfileKind::tabulated: return table_->third_at_origin();
    }
    return 0.0;
}

WarpingProfile WarpingProfile::rescaled(double s) const {
    if (!(s > 0.0)) throw BadParameters("rescale factor must be positive");
    switch (kind_) {
        case ProfileKind::euclidean: return euclidean();
        case ProfileKind::hyperbolic: return hyperbolic(a_ / s);
        case ProfileKind::cone: return cone(a_, b_ * s);
        case ProfileKind::perturbed: return perturbed(a_ / (s * s), b_ * s);
        case ProfileKind::tabulated: {
            std::vector<double> r = table_->x, w = table_->y;
            for (auto& v : r) v *= s;
            for (auto& v : w) v *= s;
            TailSpec t = tail_;
            t.c = tail_.c * std::pow(s, 1.0 - tail_.p);
            return tabulated(std::move(r), std::move(w), t);
        }
    }
    return euclidean();
}

void WarpingProfile::validate() const {
    if (std::abs(w(0.0)) > 1e-12) throw PoleConditionViolated("w(0) != 0");
    if (std::abs(dw(0.0) - 1.0) > 1e-6) throw PoleConditionViolated("w'(0) != 1");
    if (std::abs(d2w(0.0)) > 1e-8) throw PoleConditionViolated("w''(0) != 0");
    const double r_hi = (kind_ == ProfileKind::tabulated) ? table_->x.back()
                        : (tail_.power_law ? 1e4 : 700.0 / std::max(1.0, tail_.rate));
    // Positivity sweep: log-spaced nodes resolve dips near the origin that a
    // uniform sweep over [0, r_hi] would step past.
    for (int i = 0; i <= 400; ++i) {
        const double r = 1e-4 * std::pow(r_hi / 1e-4, i / 400.0);
        if (r > r_hi) break;
        if (!(w(r) > 0.0)) throw NonPositiveWarp("w <= 0 at r = " + fmt_double(r));
    }
    if (tail_.power_law) {
        const double model = tail_.c * std::pow(r_hi, tail_.p);
        if (std::abs(w(r_hi) / model - 1.0) > 0.05)
            throw TailUnresolved("declared tail mismatches w at the grid end");
    }
}

}  // namespace warpbench
