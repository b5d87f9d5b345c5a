#ifndef PLISSLAB_ENTROPY_HPP
#define PLISSLAB_ENTROPY_HPP

#include <vector>

#include "plisslab/measures.hpp"
#include "plisslab/models.hpp"
#include "plisslab/timeset.hpp"

namespace plisslab {

/// Finite grid partition of the manifold; atoms are the GridMeasure cells.
struct GridPartition {
    Manifold manifold;
    std::vector<int> resolution;

    static GridPartition make(const Manifold& m, const std::vector<int>& res);
    static GridPartition make(const Manifold& m, int res_per_dim);

    long atom_count() const;
    long atom_of(const Point& p) const;
    /// Largest cell diagonal (disc axes span [-1,1], hence the factor 2).
    double diameter() const;
};

/// Cell indices of f^k x for k in Q, in increasing k order.
std::vector<long> atom_code(const MapModel& model, const Point& x, const GridPartition& part,
                            const TimeSet& Q);

struct GibbsResult {
    long violations = 0;
    double worst_margin = 0.0; // min over anchors of log RHS - log LHS
    long anchors = 0;
    double atom_mass_total = 0.0; // sum of distinct atom masses, = weight(Lambda)
};

/// Volume estimate over the iterated partition: for each retained sample x,
/// the summed weight of retained samples sharing x's atom code over Q must
/// not exceed e^{eps #Q} e^{-sum_{i in Q} log Jac(Df|F(f^i x))}.
GibbsResult gibbs_check(const MapModel& model, const std::vector<Point>& sample_points,
                        const std::vector<double>& sample_weights,
                        const std::vector<int>& lambda_indices, const TimeSet& Q,
                        const GridPartition& part, double eps);

/// Conditional block entropies H(b) - H(b-1), b = 1..block_max, from cyclic
/// empirical block frequencies with the Miller-Madow plug-in correction.
/// Cyclic counting keeps the empirical process exactly stationary, so the
/// sequence is non-increasing up to the (tiny) correction terms.
std::vector<double> conditional_block_entropies(const std::vector<long>& symbols, long alphabet,
                                                int block_max);

/// Entropy-rate estimate H(block_max) - H(block_max - 1) in nats/iterate for
/// the orbit coding of the model under the partition. block_max >= 2.
double entropy_rate(const MapModel& model, const Point& x, long orbit_len,
                    const GridPartition& part, int block_max);

struct PesinResult {
    double h_est = 0.0;
    double jac_integral = 0.0; // int log Jac(Df|F) d mu_emp
    double residual = 0.0;     // h_est - jac_integral
};
PesinResult pesin_check(const MapModel& model, const Point& x, long orbit_len,
                        const GridPartition& part, int block_max, long jac_orbit_len = 1000000);

struct RuelleResult {
    double h_est = 0.0;
    double sum_positive_exponents = 0.0;
    double slack = 0.0; // sum lambda^+ - h_est, must not dip below -tol
};
RuelleResult ruelle_check(const MapModel& model, const Point& x, long orbit_len,
                          const GridPartition& part, int block_max, long lyapunov_n = 10000);

} // namespace plisslab

#endif
