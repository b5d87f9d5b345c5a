#ifndef PLISSLAB_COCYCLE_HPP
#define PLISSLAB_COCYCLE_HPP

#include <vector>

#include "plisslab/linalg.hpp"
#include "plisslab/models.hpp"
#include "plisslab/orbit.hpp"

namespace plisslab {

// Finite surrogates for limsup/liminf of Birkhoff averages: extremum of the
// prefix averages over prefix lengths in the trailing window_frac of the
// horizon. A pure prefix average underestimates the limsup on transient
// orbits; the windowed extremum is the standard finite-data proxy.
double limsup_prefix_average(const std::vector<double>& seq, double window_frac = 0.25);
double liminf_prefix_average(const std::vector<double>& seq, double window_frac = 0.25);

/// Lyapunov spectrum estimate with index counts.
struct ExponentReport {
    std::vector<double> exponents; // sorted descending, nats/iterate
    long n_used = 0;
    int i_u = 0;  // #{ lambda_i > tol }
    int i_cu = 0; // #{ lambda_i >= -tol }

    double sum_positive() const;
};

/// Benettin QR cocycle estimate over n steps (n >= 100). direction=-1
/// computes the spectrum of f^{-1} along the backward orbit. Deterministic
/// for fixed inputs.
ExponentReport lyapunov_exponents(const MapModel& model, const Point& x, long n,
                                  int direction = +1, double index_tol = 1e-2);

/// The derivative cocycle restricted to the transported F-frame, expressed in
/// the moving orthonormal frames: Df * F_i = F_{i+1} * R_i with R_i k x k.
/// For one-dimensional F the R_i are positive scalars and log m(Df^p|F) along
/// the orbit reduces to sliding window sums of log R.
struct RestrictedCocycle {
    int k = 1;
    std::vector<double> log_scalar; // k == 1 fast path
    std::vector<Mat> blocks;        // k >= 2
    long steps() const { return k == 1 ? static_cast<long>(log_scalar.size())
                                       : static_cast<long>(blocks.size()); }

    /// log m(Df^p|F(f^i x)) for i in [0, count).
    std::vector<double> window_log_mini(int p, long count) const;
};

RestrictedCocycle restricted_cocycle(const MapModel& model, const Point& x, long steps);

/// Finite-horizon beta_p: limsup surrogate of the Birkhoff averages of
/// log m(Df^p|F) over the first N window positions. Requires N >= 10p.
double beta_p(const RestrictedCocycle& rc, int p, long N, double window_frac = 0.25);
double beta_p(const MapModel& model, const Point& x, int p, long N, double window_frac = 0.25);

/// chi^F_min as max_{1<=p<=p_max} beta_p / p; superadditivity of (beta_p)_p
/// makes the max a certified lower bound of the limit.
double chi_F_min(const MapModel& model, const Point& x, int p_max, long N,
                 double window_frac = 0.25);

// Upper/lower asymptotic Birkhoff averages of log m(Df|F) along a trace
// (length >= 100).
double m_bar_F(const OrbitTrace& trace, double window_frac = 0.25);
double m_lower_F(const OrbitTrace& trace, double window_frac = 0.25);

} // namespace plisslab

#endif
