#ifndef PLISSLAB_MEASURES_HPP
#define PLISSLAB_MEASURES_HPP

#include <functional>
#include <string>
#include <vector>

#include "plisslab/models.hpp"
#include "plisslab/timeset.hpp"

namespace plisslab {

/// A normalized histogram measure on a uniform grid over the manifold chart.
/// Torus axes bin [0,1); solid-torus disc axes bin [-1,1].
struct GridMeasure {
    Manifold manifold;
    std::vector<int> resolution; // per dimension
    std::vector<double> weights; // prod(resolution) cells

    static GridMeasure zero(const Manifold& m, const std::vector<int>& res);
    static GridMeasure zero(const Manifold& m, int res_per_dim);

    long cell_count() const { return static_cast<long>(weights.size()); }
    long cell_index(const Point& p) const;
    Point cell_center(long idx) const;
    double total() const;
    void add(const Point& p, double w) { weights[static_cast<std::size_t>(cell_index(p))] += w; }
    void normalize();
};

/// 1/2 L1 distance between two measures on the same grid, in [0,1] for
/// probability vectors.
double total_variation(const GridMeasure& a, const GridMeasure& b);

/// Push-forward under one application of the map (cell centers are mapped and
/// re-binned).
GridMeasure pushforward(const MapModel& model, const GridMeasure& mu);

/// Empirical measure of the first n orbit points, equal weights 1/n.
GridMeasure birkhoff_empirical(const MapModel& model, const Point& x, long n, int resolution);

/// Cell-center quadrature of a bounded observable.
double integrate(const GridMeasure& mu, const std::function<double(const Point&)>& observable);

/// Total-variation distance between mu and its one-step push-forward.
double invariance_defect(const MapModel& model, const GridMeasure& mu);

/// Folner empirical measure nu = (1/#Q) sum_{i in Q} f^i_* mu_Lambda and the
/// Pliss-weighted sub-measure eta restricting each sample's visits to its own
/// Pliss times. eta <= nu cell-wise; eta(M) is the average Pliss density in Q.
struct FolnerMeasures {
    GridMeasure nu;
    GridMeasure eta;
};
FolnerMeasures folner_empirical(const MapModel& model, const std::vector<Point>& sample_points,
                                const std::vector<double>& sample_weights,
                                const std::vector<int>& lambda_indices, const TimeSet& Q,
                                const std::vector<TimeSet>& pliss_sets, int resolution);

/// Identity check between chi^F_min and the exponent pairing of empirical
/// measures: sup over the subsequence schedule n_k = ceil(n k/10), k=5..10,
/// and p <= p_max of the p-step mini-norm average. The empirical pairing is
/// evaluated on the exact orbit sums (Dirac empirical measure); grid_emp
/// reports the same pairing through a resolution-grid coarsening.
struct AppendixResult {
    double chi = 0.0;
    double sup_emp = 0.0;
    double gap = 0.0;
    double grid_emp = 0.0;
};
AppendixResult appendix_identity_check(const MapModel& model, const Point& x, int p_max, long n,
                                       int resolution);

// CSV (cell index, weight) of nonzero cells plus a JSON sidecar string.
std::string grid_measure_csv(const GridMeasure& mu);
std::string grid_measure_sidecar_json(const GridMeasure& mu, const std::string& provenance);

} // namespace plisslab

#endif
