#ifndef PLISSLAB_MODELS_HPP
#define PLISSLAB_MODELS_HPP

#include <functional>
#include <map>
#include <string>

#include "plisslab/manifold.hpp"

namespace plisslab {

/// Orthonormal frames for the splitting T_x M = E(x) + F(x).
struct SplitFrames {
    Mat E; // d x dimE
    Mat F; // d x dimF
};

/// A concrete diffeomorphism with exact derivatives. Immutable after
/// construction; all members are pure functions, safe to call concurrently.
struct MapModel {
    std::string name;
    Manifold manifold;
    int dim_E = 1;
    int dim_F = 1;
    bool analytic_splitting = false;
    std::map<std::string, double> params;

    std::function<Point(const Point&)> forward;
    std::function<Point(const Point&)> backward;
    std::function<Mat(const Point&)> derivative;         // Df at x
    std::function<Mat(const Point&)> inverse_derivative; // D(f^-1) at x
    std::function<SplitFrames(const Point&)> splitting;
    std::function<bool(const Point&)> in_domain;

    int dim() const { return manifold.dim(); }
};

// Built-in models. Unknown parameter keys are rejected.
MapModel make_cat2();
MapModel make_cat3(const std::map<std::string, double>& params = {});
MapModel make_solenoid(const std::map<std::string, double>& params = {});
MapModel make_da2(const std::map<std::string, double>& params = {});

/// Named factory: "cat2", "cat3", "solenoid", "da2".
MapModel make_model(const std::string& name, const std::map<std::string, double>& params = {});

// Eigenframe of [[2,1],[1,1]], shared by cat2/cat3/da2 construction and by
// tests that need the exact eigendirections.
Vec cat2_unstable_direction();
Vec cat2_stable_direction();

/// log((3+sqrt 5)/2), the expanding exponent of [[2,1],[1,1]].
double cat2_log_expansion();

} // namespace plisslab

#endif
