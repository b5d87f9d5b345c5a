#include "plisslab/timeset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace plisslab {

TimeSet::TimeSet(long horizon_, std::vector<long> members_)
    : horizon(horizon_), members(std::move(members_)) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (!members.empty() && (members.front() < 0 || members.back() > horizon))
        throw std::invalid_argument("TimeSet: member outside [0, horizon]");
}

bool TimeSet::contains(long t) const {
    return std::binary_search(members.begin(), members.end(), t);
}

bool TimeSet::contains_all(const TimeSet& other) const {
    return std::includes(members.begin(), members.end(), other.members.begin(), other.members.end());
}

long TimeSet::count_below(long n) const {
    return static_cast<long>(std::lower_bound(members.begin(), members.end(), n) - members.begin());
}

TimeSet pliss_times(const std::vector<double>& seq, double a_prime) {
    const long n = static_cast<long>(seq.size());
    std::vector<long> out;
    out.push_back(0);
    double walk = 0.0;
    double run_max = 0.0; // max of W_j over j <= current
    for (long m = 1; m <= n; ++m) {
        walk += seq[static_cast<std::size_t>(m - 1)] - a_prime;
        if (walk >= run_max) {
            out.push_back(m);
            run_max = walk;
        }
    }
    return TimeSet(n, std::move(out));
}

TimeSet pliss_times_bruteforce(const std::vector<double>& seq, double a_prime) {
    const long n = static_cast<long>(seq.size());
    std::vector<long> out;
    for (long m = 0; m <= n; ++m) {
        bool ok = true;
        for (long j = 0; j < m && ok; ++j) {
            double s = 0.0;
            for (long i = j; i < m; ++i) s += seq[static_cast<std::size_t>(i)];
            if (s < a_prime * static_cast<double>(m - j)) ok = false;
        }
        if (ok) out.push_back(m);
    }
    return TimeSet(n, std::move(out));
}

double density(const TimeSet& T, long n) {
    if (n < 1) throw std::invalid_argument("density: n must be >= 1");
    return static_cast<double>(T.count_below(n)) / static_cast<double>(n);
}

double upper_density(const TimeSet& T, double window_frac) {
    if (T.horizon < 1) throw std::invalid_argument("upper_density: empty horizon");
    const long m = T.horizon;
    long n0 = m - static_cast<long>(std::ceil(window_frac * static_cast<double>(m))) + 1;
    n0 = std::max<long>(1, n0);
    double best = 0.0;
    for (long n = n0; n <= m; ++n) best = std::max(best, density(T, n));
    return best;
}

double pliss_lower_bound(double a_pp, double a_prime, double A) {
    if (a_pp <= a_prime) throw std::invalid_argument("pliss_lower_bound: need a'' > a'");
    if (A <= a_prime) throw std::invalid_argument("pliss_lower_bound: need A > a'");
    if (a_pp > A) throw std::invalid_argument("pliss_lower_bound: need a'' <= A");
    return (a_pp - a_prime) / (A - a_prime);
}

TimeSet fill(const TimeSet& T, long m) {
    if (m < 0) throw std::invalid_argument("fill: m must be >= 0");
    std::vector<long> out;
    const auto& v = T.members;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
        if (i + 1 < v.size() && v[i + 1] - v[i] <= m)
            for (long t = v[i] + 1; t < v[i + 1]; ++t) out.push_back(t);
    }
    return TimeSet(T.horizon, std::move(out));
}

TimeSet boundary(const TimeSet& T) {
    std::vector<long> out;
    const auto& v = T.members;
    auto in_T = [&](long t) { return std::binary_search(v.begin(), v.end(), t); };
    for (long t : v) {
        if (!in_T(t - 1)) out.push_back(t);     // t in T \ (T+1)
        if (!in_T(t + 1)) out.push_back(t + 1); // t+1 in (T+1) \ T
    }
    return TimeSet(std::max(T.horizon + 1, out.empty() ? 0 : out.back()), std::move(out));
}

MeanErgodicResult mean_ergodic_check(const std::vector<double>& phi) {
    const long p = static_cast<long>(phi.size());
    if (p < 1) throw std::invalid_argument("mean_ergodic_check: empty cycle");
    MeanErgodicResult res;
    double total = 0.0;
    for (double v : phi) total += v;
    for (long i = 0; i < p; ++i) {
        double s = 0.0;
        bool in_A = false;
        for (long k = 0; k < p && !in_A; ++k) {
            s += phi[static_cast<std::size_t>((i + k) % p)];
            if (s > 0.0) in_A = true;
        }
        if (in_A) res.A.push_back(i);
        else res.lhs += phi[static_cast<std::size_t>(i)];
    }
    res.rhs = total;
    res.holds = res.lhs <= res.rhs + 1e-12 * std::max(1.0, std::abs(res.rhs));
    return res;
}

namespace {

// k in the block iff every window sum of (seq - log_gamma), read in the given
// direction from k, stays <= 0; cyclic sums certify all window lengths once
// lengths up to 2p are checked.
TimeSet cyclic_block(const std::vector<double>& seq, double log_gamma, int direction) {
    const long p = static_cast<long>(seq.size());
    std::vector<long> out;
    for (long k = 0; k < p; ++k) {
        double s = 0.0;
        bool ok = true;
        for (long n = 1; n <= 2 * p && ok; ++n) {
            const long idx = direction > 0 ? (k + (n - 1)) % p : ((k - (n - 1)) % p + p) % p;
            s += seq[static_cast<std::size_t>(idx)] - log_gamma;
            if (s > 1e-12) ok = false;
        }
        if (ok) out.push_back(k);
    }
    return TimeSet(p - 1, std::move(out));
}

} // namespace

BiPlissResult bi_pliss_blocks(const std::vector<double>& e, const std::vector<double>& u,
                              double log_gamma) {
    if (e.size() != u.size() || e.empty())
        throw std::invalid_argument("bi_pliss: cycles must share a positive period");
    const long p = static_cast<long>(e.size());
    BiPlissResult res;
    res.pF = cyclic_block(u, log_gamma, -1);
    res.pE = cyclic_block(e, log_gamma, +1);
    res.equal = (res.pF == res.pE);
    for (long k : res.pF.members)
        if (res.pE.contains(k)) {
            res.intersection_nonempty = true;
            break;
        }
    res.first_return_bi = res.pF.size() > 0 && res.pE.size() > 0;
    for (long k : res.pF.members) {
        long hit = -1;
        for (long d = 0; d < p; ++d) {
            const long c = (k + d) % p;
            if (res.pE.contains(c)) {
                hit = c;
                break;
            }
        }
        if (hit < 0 || !res.pF.contains(hit)) res.first_return_bi = false;
    }
    for (long k : res.pE.members) {
        long hit = -1;
        for (long d = 0; d < p; ++d) {
            const long c = ((k - d) % p + p) % p;
            if (res.pF.contains(c)) {
                hit = c;
                break;
            }
        }
        if (hit < 0 || !res.pE.contains(hit)) res.first_return_bi = false;
    }
    return res;
}

BiPlissResult bi_pliss_check(const std::vector<double>& e, const std::vector<double>& u,
                             double log_gamma, double log_lambda) {
    if (e.size() != u.size() || e.empty())
        throw std::invalid_argument("bi_pliss_check: cycles must share a positive period");
    if (!(log_gamma < 0.0)) throw std::invalid_argument("bi_pliss_check: need gamma < 1");
    if (!(2.0 * log_gamma > log_lambda))
        throw std::invalid_argument("bi_pliss_check: need gamma^2 > lambda");
    const long p = static_cast<long>(e.size());
    for (long i = 0; i < p; ++i) {
        const double dom = e[static_cast<std::size_t>(i)] + u[static_cast<std::size_t>((i + 1) % p)];
        if (dom > log_lambda + 1e-12)
            throw std::invalid_argument("bi_pliss_check: domination violated at index " + std::to_string(i));
    }
    return bi_pliss_blocks(e, u, log_gamma);
}

} // namespace plisslab
