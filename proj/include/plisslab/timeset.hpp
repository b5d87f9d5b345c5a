#ifndef PLISSLAB_TIMESET_HPP
#define PLISSLAB_TIMESET_HPP

#include <vector>

namespace plisslab {

/// A finite set of integer times inside [0, horizon], kept sorted and
/// deduplicated.
struct TimeSet {
    long horizon = 0;
    std::vector<long> members;

    TimeSet() = default;
    TimeSet(long horizon_, std::vector<long> members_);

    long size() const { return static_cast<long>(members.size()); }
    bool contains(long t) const;
    bool contains_all(const TimeSet& other) const;

    /// #(T intersect [0, n)).
    long count_below(long n) const;

    bool operator==(const TimeSet& o) const { return members == o.members; }
};

/// Pliss times of the sequence a_0..a_{n-1} at threshold a': all m in [0, n]
/// such that every suffix window [j, m) has average >= a'. Computed in O(n)
/// via the drifted walk W_k = sum_{i<k}(a_i - a'): m qualifies iff W_m is a
/// running maximum. 0 is a Pliss time by convention.
TimeSet pliss_times(const std::vector<double>& seq, double a_prime);

/// Reference O(n^2) transcription of the definition; kept independent of
/// pliss_times so the two can cross-check each other.
TimeSet pliss_times_bruteforce(const std::vector<double>& seq, double a_prime);

/// d_n(T) = #(T intersect [0,n)) / n. n must be >= 1.
double density(const TimeSet& T, long n);

/// Finite surrogate of the upper density: max of d_n over n in the trailing
/// window_frac of the horizon.
double upper_density(const TimeSet& T, double window_frac = 0.25);

/// Classical Pliss estimate alpha = (a'' - a') / (A - a'), valid whenever a
/// sequence bounded above by A has prefix mean >= a''. Requires a' < a'' <= A.
double pliss_lower_bound(double a_pp, double a_prime, double A);

/// T^m: every n lying between two members t1 <= n <= t2 with t2 - t1 <= m.
TimeSet fill(const TimeSet& T, long m);

/// Symmetric difference of T and T+1 (the Folner boundary).
TimeSet boundary(const TimeSet& T);

/// Mean ergodic inequality on a p-cycle: with
///   A = { i : some forward window sum of phi starting at i is > 0 },
/// checks sum_{i not in A} phi_i <= sum_i phi_i (equivalently
/// sum_{i in A} phi_i >= 0). Periodicity makes window lengths <= p decisive.
struct MeanErgodicResult {
    bool holds = false;
    double lhs = 0.0; // sum over the complement of A
    double rhs = 0.0; // total sum
    std::vector<long> A;
};
MeanErgodicResult mean_ergodic_check(const std::vector<double>& phi);

/// Pesin-block membership along a dominated p-cycle. e_i = log |Df|E| and
/// u_i = log |Df^-1|F| along the cycle; pF collects indices whose backward
/// u-window sums stay <= n log(gamma), pE the forward e-window analogue.
/// Window lengths up to 2p certify all lengths (cyclic sums). Preconditions:
/// e_i + u_{i+1 mod p} <= log_lambda (adapted-norm domination),
/// 2 log_gamma > log_lambda and log_gamma < 0.
///
/// Set equality pF == pE can fail even in this regime (a strongly
/// contracting u-step feeding a mild e-step breaks it; see the tests for a
/// 3-cycle witness). What does hold, and what the downstream finiteness
/// argument consumes, is that both blocks are nonempty and intersect:
/// the first pE-time weakly after any pF-time is itself a pF-time.
struct BiPlissResult {
    TimeSet pF;
    TimeSet pE;
    bool equal = false;
    bool intersection_nonempty = false;
    /// Every pF-time's first following pE-time (cyclically) lies in pF, and
    /// symmetrically with the roles swapped; implies intersection_nonempty
    /// whenever both blocks are nonempty.
    bool first_return_bi = false;
};
BiPlissResult bi_pliss_check(const std::vector<double>& e, const std::vector<double>& u,
                             double log_gamma, double log_lambda);

/// Same block computation without the gamma^2 > lambda precondition, for
/// searching counterexamples outside the domination-gap regime.
BiPlissResult bi_pliss_blocks(const std::vector<double>& e, const std::vector<double>& u,
                              double log_gamma);

} // namespace plisslab

#endif
