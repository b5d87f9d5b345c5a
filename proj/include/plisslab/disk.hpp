#ifndef PLISSLAB_DISK_HPP
#define PLISSLAB_DISK_HPP

#include <functional>
#include <optional>
#include <vector>

#include "plisslab/models.hpp"
#include "plisslab/rng.hpp"

namespace plisslab {

struct ConeParams {
    double theta = 0.3;
};

/// Decomposes v = v^E + v^F in the splitting frames at x and tests the strict
/// cone inequality |v^E| < theta |v^F|.
bool in_cone(const MapModel& model, const Point& x, const Vec& v, double theta);

struct ConeCheckResult {
    bool pass = false;
    double worst_ratio = 0.0; // max |(Dfv)^E| / (theta/2 |(Dfv)^F|)
};

/// Verifies Df(C^F_theta(x)) subset C^F_{theta/2}(fx) on random (x, v) pairs
/// with v on the cone boundary.
ConeCheckResult cone_invariance_check(const MapModel& model, double theta, long samples,
                                      std::uint64_t seed = 1);

/// An F-disk with one-dimensional F: a polyline curve through `center`,
/// tangent to the cone around F, addressed by arc length s in [0, total_mass].
/// Cell midpoints with their lengths are the disk's Lebesgue samples.
/// All built-in models have dim F = 1, so disks are curves; this is the only
/// disk shape the geometry engine supports.
struct FDisk {
    Point center;
    double radius = 0.0;  // arc-length radius (min over the two sides)
    Mat frame_F, frame_E; // frames at the center
    double lipschitz_bound = 0.0;

    std::vector<Vec> nodes;  // unwrapped chart coordinates along the curve
    std::vector<double> cum; // cumulative arc length at nodes, cum[0] = 0
    double s_center = 0.0;   // arc position of the center

    long cell_count() const { return static_cast<long>(nodes.size()) - 1; }
    double total_mass() const { return cum.back(); }

    Vec point_at(double s) const;      // unwrapped coords on the polyline
    Point sample_point(long i) const;  // wrapped cell midpoint
    double sample_weight(long i) const;
    double sample_param(long i) const; // arc position of the midpoint
};

/// Builds an F-disk at `center` as the graph of g over the F(center) ball of
/// radius `radius` (parametrized by the signed F-coordinate). g must vanish
/// at 0; g = nullptr gives the straight segment along F(center). Node
/// tangents are required to respect the Lipschitz bound theta1.
FDisk make_fdisk(const MapModel& model, const Point& center, double radius, long cells,
                 double theta1, const std::function<Vec(double)>& graph = nullptr);

/// One cell of an iterated disk: original sub-segment and its current image.
struct DiskCell {
    double s0 = 0.0, s1 = 0.0; // original arc parameters
    Vec p0, p1;                // original endpoints (unwrapped)
    Vec q0, q1;                // image endpoints (wrapped)
    double jac = 1.0;          // accumulated tangent-Jacobian product
};

struct IteratedDisk {
    int steps = 0;
    std::vector<DiskCell> cells;
    double original_mass() const;
    double image_mass(const Manifold& m) const;
    double jac_weighted_original() const; // quadrature of Jac(Df^n|T Delta)
};

struct IterateOptions {
    double max_pitch = 1e-3;     // image chord length triggering subdivision
    double cone_theta = 0.0;     // >0: spot-check image tangents in this cone
    long cone_checks_per_step = 128;
};

/// Pushes the disk n steps, subdividing cells whenever the image chord
/// exceeds the pitch. Throws if a checked image tangent leaves the cone.
IteratedDisk iterate_disk(const MapModel& model, const FDisk& disk, int n,
                          const IterateOptions& opts = {});

/// Re-expresses an iterated disk as a union of F-disks of radius <= delta0.
std::vector<FDisk> cut_into_fdisks(const MapModel& model, const IteratedDisk& it,
                                   double delta0, double theta1);

struct DistortionResult {
    double lhs = 0.0, mid = 0.0, rhs = 0.0;
    bool pass = false;
    double original_mass = 0.0, image_mass = 0.0, jac_product = 0.0;
};

/// Lemma-style two-sided volume estimate: Gamma is the maximal disk interval
/// around the anchor staying delta_eps-close to the anchor orbit for n steps;
/// compares e^{-n eps} Leb(f^n Gamma) <= Leb(Gamma) prod Jac(Df|F) <=
/// e^{n eps} Leb(f^n Gamma).
DistortionResult distortion_check(const MapModel& model, const FDisk& disk, int n, double eps,
                                  double delta_eps);

struct PlissIterateResult {
    double max_violation = 0.0;    // max over pairs,i of d_i / (e^{-ia} d_0)
    double distortion_ratio = 1.0; // empirical C of the backward Jacobians
    bool pass = false;
};

/// Backward-contraction check at a Pliss time n: carves the radius-delta0
/// subdisk of f^n(disk) centered at f^n(center) and verifies
/// d(f^{-i}y, f^{-i}z) <= e^{-ia} d(y,z) along the pulled-back disks.
PlissIterateResult pliss_iterate_check(const MapModel& model, const FDisk& disk, long n,
                                       double a, double delta0, long pairs = 12);

/// Dynamical ball B_{D,n}(x, delta) = f^{-n} of the arc ball around f^n x in
/// the iterated disk, realized as an arc-parameter interval on the base disk.
struct DynamicalBall {
    long anchor_index = -1; // sample index, -1 when the anchor is the center
    long n = 0;
    double delta = 0.0;
    double lo = 0.0, hi = 0.0; // base arc-parameter interval
    std::vector<int> member_indices;
    bool truncated = false; // hit the disk edge before reaching delta

    double base_mass() const { return hi - lo; }
    bool overlaps(const DynamicalBall& o) const { return lo < o.hi && o.lo < hi; }
};

DynamicalBall dynamical_ball(const MapModel& model, const FDisk& disk, double anchor_s, long n,
                             double delta);

/// Same, anchored at a disk sample (fills anchor_index).
DynamicalBall dynamical_ball_at_sample(const MapModel& model, const FDisk& disk,
                                       long sample_index, long n, double delta);

struct BallTriple {
    DynamicalBall plain, hat, hathat; // radii delta0/3, 2 delta0/3, delta0
};
BallTriple dynamical_ball_triple(const MapModel& model, const FDisk& disk, double anchor_s,
                                 long n, double delta0);

// Vitali selection over interval balls (arcs on one base disk).
struct VitaliBall {
    double lo = 0.0, hi = 0.0;         // plain interval
    double hat_lo = 0.0, hat_hi = 0.0; // hat interval, contains the plain one
    long n = 0;
};

struct VitaliSelection {
    std::vector<int> accepted;
    std::vector<std::pair<int, int>> rejected_witness; // (rejected, accepted witness)
};

/// Greedy pass in increasing n: accept a ball iff its hat is disjoint from
/// every previously accepted plain ball; rejected balls record the accepted
/// witness their hat meets.
VitaliSelection vitali_select(const std::vector<VitaliBall>& balls);

/// Exhaustive certificate re-check: accepted pairwise disjoint and every
/// rejected hat meets its witness (and some accepted ball).
bool vitali_verify(const std::vector<VitaliBall>& balls, const VitaliSelection& sel);

struct DoubleSizeItem {
    long n = 0;
    double anchor_s = 0.0;
    double ratio = 0.0;
};

struct DoubleSizeResult {
    double max_ratio = 0.0;
    std::vector<DoubleSizeItem> items;
};

/// Empirical constant of the doubling estimate Leb(hathat B) <= K Leb(B).
DoubleSizeResult double_size_ratio(const MapModel& model, const FDisk& disk,
                                   const std::vector<std::pair<double, long>>& anchors_and_times,
                                   double delta0);

/// Model-calibrated geometry constants, frozen into the run manifest.
struct Calibration {
    double theta0 = 0.3;
    double theta1 = 0.15;
    double delta0 = 0.1;
    double delta1 = 0.1;
    long N = 5;
    double delta_eps = 0.01;
    double theta_eps = 0.3;
};

Calibration calibrate(const MapModel& model, double eps, std::uint64_t seed = 1);

/// Uniform-ish random point in the model domain (used by sweeps and checks).
Point random_domain_point(const MapModel& model, Rng& rng);

} // namespace plisslab

#endif
