#ifndef PLISSLAB_ORBIT_HPP
#define PLISSLAB_ORBIT_HPP

#include <vector>

#include "plisslab/models.hpp"

namespace plisslab {

/// A finite orbit segment with the per-step cocycle observables
///   log m(Df|F), log |Df|E|, log Jac(Df|F)
/// evaluated at the first n-1 points with the model's splitting.
struct OrbitTrace {
    std::vector<Point> points;       // n points
    std::vector<double> log_mini_F;  // n-1 entries
    std::vector<double> log_norm_E;  // n-1 entries
    std::vector<double> log_jac_F;   // n-1 entries
    int direction = +1;

    long length() const { return static_cast<long>(points.size()); }
};

/// Computes x, fx, ..., f^{n-1}x (direction=+1) or the backward orbit
/// (direction=-1). F-frames are transported forward from the splitting at the
/// start point and re-orthonormalized; E-frames are pulled back from the
/// splitting at the end point. Throws when a point leaves the model domain,
/// naming the step index.
OrbitTrace orbit(const MapModel& model, const Point& x, long n, int direction = +1);

/// Points-only fast path (no observables), used by histogram builders.
std::vector<Point> orbit_points(const MapModel& model, const Point& x, long n, int direction = +1);

} // namespace plisslab

#endif
