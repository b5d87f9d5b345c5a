#include "plisslab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "plisslab/cocycle.hpp"
#include "plisslab/orbit.hpp"

namespace plisslab {

GridPartition GridPartition::make(const Manifold& m, const std::vector<int>& res) {
    if (static_cast<int>(res.size()) != m.dim())
        throw std::invalid_argument("GridPartition: resolution must have one entry per dimension");
    for (int r : res)
        if (r < 1) throw std::invalid_argument("GridPartition: resolution entries must be >= 1");
    return GridPartition{m, res};
}

GridPartition GridPartition::make(const Manifold& m, int res_per_dim) {
    return make(m, std::vector<int>(static_cast<std::size_t>(m.dim()), res_per_dim));
}

long GridPartition::atom_count() const {
    long c = 1;
    for (int r : resolution) c *= r;
    return c;
}

long GridPartition::atom_of(const Point& p) const {
    GridMeasure probe;
    probe.manifold = manifold;
    probe.resolution = resolution;
    return probe.cell_index(p);
}

double GridPartition::diameter() const {
    double s = 0.0;
    for (int i = 0; i < manifold.dim(); ++i) {
        const double span = manifold.periodic(i) ? 1.0 : 2.0;
        const double h = span / resolution[static_cast<std::size_t>(i)];
        s += h * h;
    }
    return std::sqrt(s);
}

std::vector<long> atom_code(const MapModel& model, const Point& x, const GridPartition& part,
                            const TimeSet& Q) {
    std::vector<long> code;
    code.reserve(static_cast<std::size_t>(Q.size()));
    if (Q.size() == 0) return code;
    Point p = model.manifold.wrap(x);
    const long horizon = Q.members.back();
    for (long k = 0; k <= horizon; ++k) {
        if (Q.contains(k)) code.push_back(part.atom_of(p));
        if (k < horizon) p = model.forward(p);
    }
    return code;
}

GibbsResult gibbs_check(const MapModel& model, const std::vector<Point>& sample_points,
                        const std::vector<double>& sample_weights,
                        const std::vector<int>& lambda_indices, const TimeSet& Q,
                        const GridPartition& part, double eps) {
    if (lambda_indices.empty()) throw std::invalid_argument("gibbs_check: empty Lambda");
    if (Q.size() == 0) throw std::invalid_argument("gibbs_check: empty Q");

    // codes and Jacobian sums per retained sample, one orbit pass each
    const long horizon = Q.members.back();
    std::map<std::vector<long>, double> atom_mass;
    std::vector<std::vector<long>> codes(lambda_indices.size());
    std::vector<double> jac_sums(lambda_indices.size(), 0.0);
    for (std::size_t a = 0; a < lambda_indices.size(); ++a) {
        const int s = lambda_indices[a];
        const OrbitTrace tr = orbit(model, sample_points[static_cast<std::size_t>(s)], horizon + 2);
        std::vector<long> code;
        double js = 0.0;
        for (long k = 0; k <= horizon; ++k) {
            if (Q.contains(k)) {
                code.push_back(part.atom_of(tr.points[static_cast<std::size_t>(k)]));
                js += tr.log_jac_F[static_cast<std::size_t>(k)];
            }
        }
        codes[a] = std::move(code);
        jac_sums[a] = js;
        atom_mass[codes[a]] += sample_weights[static_cast<std::size_t>(s)];
    }

    GibbsResult res;
    res.anchors = static_cast<long>(lambda_indices.size());
    res.worst_margin = 1e300;
    for (std::size_t a = 0; a < lambda_indices.size(); ++a) {
        const double lhs = atom_mass[codes[a]];
        const double log_rhs = eps * static_cast<double>(Q.size()) - jac_sums[a];
        const double margin = log_rhs - std::log(lhs);
        res.worst_margin = std::min(res.worst_margin, margin);
        if (margin < 0.0) ++res.violations;
    }
    for (const auto& [code, mass] : atom_mass) res.atom_mass_total += mass;
    return res;
}

namespace {

struct Key128 {
    std::uint64_t lo = 0, hi = 0;
    bool operator==(const Key128& o) const { return lo == o.lo && hi == o.hi; }
};

struct Key128Hash {
    std::size_t operator()(const Key128& k) const {
        std::uint64_t z = k.lo ^ (k.hi * 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return static_cast<std::size_t>(z ^ (z >> 31));
    }
};

Key128 shift_in(const Key128& k, std::uint64_t sym, int bits) {
    Key128 out;
    out.lo = (k.lo << bits) | sym;
    out.hi = (k.hi << bits) | (bits < 64 ? (k.lo >> (64 - bits)) : 0);
    return out;
}

Key128 mask_prefix(const Key128& k, int total_bits) {
    // keep the low total_bits (the most recent symbols are in the low bits
    // after shift_in; the prefix of a block is obtained by dropping the
    // oldest symbol, i.e. masking the high bits)
    Key128 out = k;
    if (total_bits >= 128) return out;
    if (total_bits >= 64) {
        out.hi &= (total_bits == 64) ? 0ULL : ((1ULL << (total_bits - 64)) - 1ULL);
    } else {
        out.hi = 0;
        out.lo &= (1ULL << total_bits) - 1ULL;
    }
    return out;
}

double plugin_entropy(const std::unordered_map<Key128, std::uint64_t, Key128Hash>& counts,
                      double total) {
    double h = 0.0;
    for (const auto& [k, c] : counts) {
        const double p = static_cast<double>(c) / total;
        h -= p * std::log(p);
    }
    return h;
}

} // namespace

std::vector<double> conditional_block_entropies(const std::vector<long>& symbols, long alphabet,
                                                int block_max) {
    if (block_max < 2) throw std::invalid_argument("block entropies: block_max must be >= 2");
    if (symbols.size() < static_cast<std::size_t>(block_max) + 1)
        throw std::invalid_argument("block entropies: orbit shorter than block_max");
    int bits = 1;
    while ((1L << bits) < alphabet) ++bits;
    if (bits * block_max > 128)
        throw std::invalid_argument("block entropies: block_max * log2(alphabet) exceeds 128 bits");

    const std::size_t W = symbols.size();
    std::unordered_map<Key128, std::uint64_t, Key128Hash> counts;
    counts.reserve(std::min<std::size_t>(W, 1u << 22));
    Key128 key;
    // prime the rolling key with the first block_max-1 symbols
    for (int j = 0; j < block_max - 1; ++j)
        key = shift_in(key, static_cast<std::uint64_t>(symbols[static_cast<std::size_t>(j)]), bits);
    for (std::size_t i = 0; i < W; ++i) {
        const std::size_t last = (i + static_cast<std::size_t>(block_max) - 1) % W;
        key = shift_in(key, static_cast<std::uint64_t>(symbols[last]), bits);
        key = mask_prefix(key, bits * block_max);
        ++counts[key];
    }

    // blocks are stored oldest..newest from high to low bits; the (b-1)-block
    // marginal used by the chain rule is the prefix, i.e. the newest symbol
    // (low bits) is dropped
    std::vector<double> H(static_cast<std::size_t>(block_max) + 1, 0.0);
    std::vector<double> distinct(static_cast<std::size_t>(block_max) + 1, 0.0);
    const double total = static_cast<double>(W);
    H[static_cast<std::size_t>(block_max)] = plugin_entropy(counts, total);
    distinct[static_cast<std::size_t>(block_max)] = static_cast<double>(counts.size());
    for (int b = block_max - 1; b >= 1; --b) {
        std::unordered_map<Key128, std::uint64_t, Key128Hash> down;
        down.reserve(counts.size());
        for (const auto& [k, c] : counts) {
            Key128 p;
            p.lo = (k.lo >> bits) | (bits < 64 ? (k.hi << (64 - bits)) : 0);
            p.hi = k.hi >> bits;
            down[p] += c;
        }
        counts.swap(down);
        H[static_cast<std::size_t>(b)] = plugin_entropy(counts, total);
        distinct[static_cast<std::size_t>(b)] = static_cast<double>(counts.size());
    }

    // cyclic counting makes the empirical block process exactly stationary,
    // so the raw plug-in conditionals are non-increasing; this is checked on
    // every run before the Miller-Madow correction (which estimates the
    // plug-in bias but need not preserve strict monotonicity) is applied
    std::vector<double> cond(static_cast<std::size_t>(block_max) + 1, 0.0);
    cond[1] = H[1];
    for (int b = 2; b <= block_max; ++b) {
        cond[static_cast<std::size_t>(b)] =
            H[static_cast<std::size_t>(b)] - H[static_cast<std::size_t>(b) - 1];
        if (cond[static_cast<std::size_t>(b)] > cond[static_cast<std::size_t>(b) - 1] + 1e-9)
            throw std::logic_error("block entropies: plug-in conditionals not monotone");
    }
    cond[1] += (distinct[1] - 1.0) / (2.0 * total);
    for (int b = 2; b <= block_max; ++b)
        cond[static_cast<std::size_t>(b)] +=
            (distinct[static_cast<std::size_t>(b)] - distinct[static_cast<std::size_t>(b) - 1]) /
            (2.0 * total);
    return cond;
}

double entropy_rate(const MapModel& model, const Point& x, long orbit_len,
                    const GridPartition& part, int block_max) {
    if (block_max < 2) throw std::invalid_argument("entropy_rate: block_max must be >= 2");
    if (orbit_len < 100) throw std::invalid_argument("entropy_rate: orbit too short");
    std::vector<long> symbols;
    symbols.reserve(static_cast<std::size_t>(orbit_len));
    Point p = model.manifold.wrap(x);
    for (long k = 0; k < orbit_len; ++k) {
        symbols.push_back(part.atom_of(p));
        if (k + 1 < orbit_len) {
            p = model.forward(p);
            if (!model.in_domain(p))
                throw std::runtime_error("entropy_rate: orbit escaped the domain at step " +
                                         std::to_string(k + 1));
        }
    }
    const auto cond = conditional_block_entropies(symbols, part.atom_count(), block_max);
    return cond[static_cast<std::size_t>(block_max)];
}

PesinResult pesin_check(const MapModel& model, const Point& x, long orbit_len,
                        const GridPartition& part, int block_max, long jac_orbit_len) {
    PesinResult res;
    res.h_est = entropy_rate(model, x, orbit_len, part, block_max);
    const OrbitTrace tr = orbit(model, x, jac_orbit_len);
    double s = 0.0;
    for (double v : tr.log_jac_F) s += v;
    res.jac_integral = s / static_cast<double>(tr.log_jac_F.size());
    res.residual = res.h_est - res.jac_integral;
    return res;
}

RuelleResult ruelle_check(const MapModel& model, const Point& x, long orbit_len,
                          const GridPartition& part, int block_max, long lyapunov_n) {
    RuelleResult res;
    res.h_est = entropy_rate(model, x, orbit_len, part, block_max);
    res.sum_positive_exponents = lyapunov_exponents(model, x, lyapunov_n).sum_positive();
    res.slack = res.sum_positive_exponents - res.h_est;
    return res;
}

} // namespace plisslab
