#pragma once

#include <string>
#include <vector>

#include "warpbench/manifold.hpp"

namespace warpbench {

//! Mesh over the (r, psi) half-strip [0, r_max] x [0, pi]. Radial nodes are
//! half-offset, r_i = (i + 1/2) r_max / nr, so the degenerate pole line is
//! never a node; psi nodes include both endpoints.
struct MeshSpec2D {
    int nr = 512;
    int npsi = 256;
    double r_max = 10.0;
};

//! Geodesic distances from a fixed source point under the metric
//! dr^2 + w(r)^2 dpsi^2. On a rotationally symmetric space the distance
//! between points at radii r0, r with angular separation psi equals the
//! distance in this half-strip, so one field serves every center at its
//! radius. Solved by first-order upwind fast marching; psi boundaries act
//! reflectively (one-sided differences), consistent with the symmetry of
//! the field about the source meridian.
class DistanceField {
public:
    DistanceField(double r0, MeshSpec2D mesh, std::vector<double> values);

    double source_radius() const { return r0_; }
    int nr() const { return mesh_.nr; }
    int npsi() const { return mesh_.npsi; }
    double r_max() const { return mesh_.r_max; }
    double node_r(int i) const { return (i + 0.5) * hr_; }
    double node_psi(int j) const { return j * hpsi_; }
    double dr() const { return hr_; }
    double dpsi() const { return hpsi_; }
    double value(int i, int j) const;

    //! Bilinear interpolation; OutOfGrid beyond the strip.
    double at(double r, double psi) const;

    const std::vector<double>& values() const { return d_; }

private:
    double r0_;
    MeshSpec2D mesh_;
    double hr_, hpsi_;
    std::vector<double> d_;  // row-major, index i * npsi + j
};

//! Empirical two-sided volume regularity over sampled centers and radii:
//! extremes of vol(B_r(y)) / r^n, their spread, and the volume-comparison
//! constant. bounded reflects the hypotheses that make the constants
//! meaningful (finite curvature moment and positive volume ratio at
//! infinity); the empirical spread of an unbounded geometry still appears
//! in the report as evidence.
struct AhlforsReport {
    double v0_emp = 0.0;
    double V0_emp = 0.0;
    double xi_emp = 0.0;  // max of vol(B_r(o)) / vol(B_{r/2}(x)), x on the r-sphere
    double spread = 0.0;  // V0_emp / v0_emp
    bool bounded = false;
};

//! Fast-marching solve from the axis point at radius r0 (the pole when
//! r0 = 0). Requires r0 <= r_max / 2 (OutOfGrid) and resolution at least
//! 256 x 128 (MeshTooCoarse).
DistanceField distance_field(const ModelManifold& M, double r0,
                             MeshSpec2D mesh = {});

//! Volume of the geodesic ball of radius R about the field's source:
//! integral of a one-cell-smoothed indicator of {d < R} against
//! omega_{n-2} w(r)^{n-1} sin^{n-2}(psi) dr dpsi. Requires
//! R <= r_max / 2 - r0 (BallExitsGrid), which keeps the ball away from the
//! open outer boundary.
double ball_volume_offcenter(const ModelManifold& M, const DistanceField& D,
                             double R);

//! Sweeps centers x radii (defaults {0, 1, 5, 20} x {0.5, 1, 2, 5, 10, 20},
//! both clipped to the manifold grid) with per-ball fitted meshes.
AhlforsReport ahlfors_check(const ModelManifold& M,
                            std::vector<double> centers = {},
                            std::vector<double> radii = {});

//! Volume-comparison constant: max over the sampled radii of
//! vol(B_r(o)) / vol(B_{r/2}(x)) with x on the r-sphere (all such x are
//! isometric by symmetry).
double vc_check(const ModelManifold& M, std::vector<double> radii = {});

//! Greedy maximal-packing cover of the annulus between radii R and Q R by
//! balls of radius alpha R on the (r, psi) grid: scan nodes in row-major
//! order, promote any uncovered node to a center, and mark its ball via an
//! early-exit fast-marching solve. Asserts the resulting count against the
//! closed-form covering bound at the empirical volume constants
//! (CheckFailed). Requires 0 < alpha <= (Q-1)/4 (BadParameters).
int covering_count_empirical(const ModelManifold& M, double R, double Q,
                             double alpha);

//! Cache identity: manifold cache key + source radius + mesh.
std::string distance_field_cache_key(const ModelManifold& M, double r0,
                                     const MeshSpec2D& mesh);

//! Binary cache: fixed header (magic, version, key hash, dims, geometry)
//! followed by the row-major 64-bit float grid. Loading validates the
//! header and, when a key is supplied, the key hash (ConfigError).
void save_distance_field(const DistanceField& D, const std::string& key,
                         const std::string& path);
DistanceField load_distance_field(const std::string& path,
                                  const std::string& key = "");

//! Compute-or-load wrapper around the binary cache; cache_dir must exist.
DistanceField distance_field_cached(const ModelManifold& M, double r0,
                                    MeshSpec2D mesh,
                                    const std::string& cache_dir);

}  // namespace warpbench
