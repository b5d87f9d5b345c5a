#include "plisslab/orbit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "plisslab/linalg.hpp"

namespace plisslab {

namespace {

Point step_or_throw(const MapModel& m, const Point& p, int direction, long k) {
    Point next;
    try {
        next = direction > 0 ? m.forward(p) : m.backward(p);
    } catch (const std::exception& e) {
        throw std::runtime_error("orbit: map undefined at step " + std::to_string(k) + ": " + e.what());
    }
    if (!m.in_domain(next))
        throw std::runtime_error("orbit: point escaped the domain at step " + std::to_string(k));
    return next;
}

} // namespace

std::vector<Point> orbit_points(const MapModel& model, const Point& x, long n, int direction) {
    if (n < 1) throw std::invalid_argument("orbit: n must be >= 1");
    if (x.dim() != model.dim()) throw std::invalid_argument("orbit: point dimension mismatch");
    if (!model.in_domain(x)) throw std::runtime_error("orbit: start point outside the domain");
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    pts.push_back(model.manifold.wrap(x));
    for (long k = 1; k < n; ++k) pts.push_back(step_or_throw(model, pts.back(), direction, k));
    return pts;
}

OrbitTrace orbit(const MapModel& model, const Point& x, long n, int direction) {
    OrbitTrace tr;
    tr.direction = direction;
    tr.points = orbit_points(model, x, n, direction);
    if (n == 1) return tr;

    const long steps = n - 1;
    tr.log_mini_F.resize(steps);
    tr.log_norm_E.resize(steps);
    tr.log_jac_F.resize(steps);

    if (direction < 0) {
        // backward orbits are short and rare; evaluate the splitting per point
        for (long i = 0; i < steps; ++i) {
            const SplitFrames fr = model.splitting(tr.points[i]);
            const Mat D = model.derivative(tr.points[i]);
            tr.log_mini_F[i] = std::log(mini_norm(D * fr.F));
            tr.log_norm_E[i] = std::log(op_norm(D * fr.E));
            tr.log_jac_F[i] = std::log(jacobian_on_subspace(D, fr.F));
        }
        return tr;
    }

    // forward transport for F
    Mat F = model.splitting(tr.points[0]).F;
    for (long i = 0; i < steps; ++i) {
        const Mat D = model.derivative(tr.points[i]);
        const Mat DF = D * F;
        tr.log_mini_F[i] = std::log(mini_norm(DF));
        tr.log_jac_F[i] = std::log(jacobian_on_subspace(D, F));
        F = orthonormalize(DF);
    }

    // backward transport for E, seeded at the end point
    Mat E = model.splitting(tr.points[n - 1]).E;
    for (long i = steps - 1; i >= 0; --i) {
        const Mat D = model.derivative(tr.points[i]);
        E = orthonormalize(D.partialPivLu().solve(E));
        tr.log_norm_E[i] = std::log(op_norm(D * E));
    }
    return tr;
}

} // namespace plisslab
