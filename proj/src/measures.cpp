#include "plisslab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "plisslab/cocycle.hpp"
#include "plisslab/orbit.hpp"

namespace plisslab {

GridMeasure GridMeasure::zero(const Manifold& m, const std::vector<int>& res) {
    if (static_cast<int>(res.size()) != m.dim())
        throw std::invalid_argument("GridMeasure: resolution must have one entry per dimension");
    long cells = 1;
    for (int r : res) {
        if (r < 1) throw std::invalid_argument("GridMeasure: resolution entries must be >= 1");
        cells *= r;
    }
    GridMeasure g;
    g.manifold = m;
    g.resolution = res;
    g.weights.assign(static_cast<std::size_t>(cells), 0.0);
    return g;
}

GridMeasure GridMeasure::zero(const Manifold& m, int res_per_dim) {
    return zero(m, std::vector<int>(static_cast<std::size_t>(m.dim()), res_per_dim));
}

long GridMeasure::cell_index(const Point& p) const {
    if (p.dim() != manifold.dim()) throw std::invalid_argument("cell_index: dimension mismatch");
    long idx = 0;
    for (int i = 0; i < manifold.dim(); ++i) {
        const int r = resolution[static_cast<std::size_t>(i)];
        double t;
        if (manifold.periodic(i)) {
            t = p.coords[i] - std::floor(p.coords[i]);
        } else {
            t = 0.5 * (p.coords[i] + 1.0); // [-1,1] -> [0,1]
        }
        long k = static_cast<long>(std::floor(t * r));
        k = std::clamp<long>(k, 0, r - 1);
        idx = idx * r + k;
    }
    return idx;
}

Point GridMeasure::cell_center(long idx) const {
    Vec c(manifold.dim());
    for (int i = manifold.dim() - 1; i >= 0; --i) {
        const int r = resolution[static_cast<std::size_t>(i)];
        const long k = idx % r;
        idx /= r;
        const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(r);
        c[i] = manifold.periodic(i) ? t : 2.0 * t - 1.0;
    }
    return Point(c);
}

double GridMeasure::total() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

void GridMeasure::normalize() {
    const double t = total();
    if (t <= 0.0) throw std::runtime_error("GridMeasure: cannot normalize an empty measure");
    for (double& w : weights) w /= t;
}

double total_variation(const GridMeasure& a, const GridMeasure& b) {
    if (a.resolution != b.resolution || !(a.manifold == b.manifold))
        throw std::invalid_argument("total_variation: measures live on different grids");
    double s = 0.0;
    for (std::size_t i = 0; i < a.weights.size(); ++i) s += std::abs(a.weights[i] - b.weights[i]);
    return 0.5 * s;
}

GridMeasure pushforward(const MapModel& model, const GridMeasure& mu) {
    GridMeasure out = GridMeasure::zero(mu.manifold, mu.resolution);
    for (long i = 0; i < mu.cell_count(); ++i) {
        const double w = mu.weights[static_cast<std::size_t>(i)];
        if (w == 0.0) continue;
        out.add(model.forward(mu.cell_center(i)), w);
    }
    return out;
}

GridMeasure birkhoff_empirical(const MapModel& model, const Point& x, long n, int resolution) {
    if (n < 1) throw std::invalid_argument("birkhoff_empirical: n must be >= 1");
    GridMeasure g = GridMeasure::zero(model.manifold, resolution);
    Point p = model.manifold.wrap(x);
    const double w = 1.0 / static_cast<double>(n);
    for (long k = 0; k < n; ++k) {
        g.add(p, w);
        if (k + 1 < n) {
            p = model.forward(p);
            if (!model.in_domain(p))
                throw std::runtime_error("birkhoff_empirical: orbit escaped the domain at step " +
                                         std::to_string(k + 1));
        }
    }
    return g;
}

double integrate(const GridMeasure& mu, const std::function<double(const Point&)>& observable) {
    double s = 0.0;
    for (long i = 0; i < mu.cell_count(); ++i) {
        const double w = mu.weights[static_cast<std::size_t>(i)];
        if (w == 0.0) continue;
        s += w * observable(mu.cell_center(i));
    }
    return s;
}

double invariance_defect(const MapModel& model, const GridMeasure& mu) {
    return total_variation(mu, pushforward(model, mu));
}

FolnerMeasures folner_empirical(const MapModel& model, const std::vector<Point>& sample_points,
                                const std::vector<double>& sample_weights,
                                const std::vector<int>& lambda_indices, const TimeSet& Q,
                                const std::vector<TimeSet>& pliss_sets, int resolution) {
    if (lambda_indices.empty()) throw std::invalid_argument("folner_empirical: empty Lambda");
    if (Q.size() == 0) throw std::invalid_argument("folner_empirical: empty Q");
    FolnerMeasures out{GridMeasure::zero(model.manifold, resolution),
                       GridMeasure::zero(model.manifold, resolution)};
    double lambda_mass = 0.0;
    for (int s : lambda_indices) {
        if (sample_weights[static_cast<std::size_t>(s)] <= 0.0)
            throw std::invalid_argument("folner_empirical: sample weights must be positive");
        lambda_mass += sample_weights[static_cast<std::size_t>(s)];
    }
    const long horizon = Q.members.back();
    const double qn = static_cast<double>(Q.size());
    for (int s : lambda_indices) {
        const double w = sample_weights[static_cast<std::size_t>(s)] / lambda_mass / qn;
        const TimeSet& P = pliss_sets[static_cast<std::size_t>(s)];
        Point p = model.manifold.wrap(sample_points[static_cast<std::size_t>(s)]);
        for (long i = 0; i <= horizon; ++i) {
            if (Q.contains(i)) {
                out.nu.add(p, w);
                if (P.contains(i)) out.eta.add(p, w);
            }
            if (i < horizon) p = model.forward(p);
        }
    }
    return out;
}

AppendixResult appendix_identity_check(const MapModel& model, const Point& x, int p_max, long n,
                                       int resolution) {
    if (p_max < 1) throw std::invalid_argument("appendix_identity_check: p_max must be >= 1");
    if (n < 100) throw std::invalid_argument("appendix_identity_check: n too small");
    // window fraction 1/2 aligns the beta_p prefix window with the
    // subsequence schedule below, making the one-sided inequality exact
    const double frac = 0.5;
    const RestrictedCocycle rc = restricted_cocycle(model, x, n + p_max - 1);

    AppendixResult res;
    res.chi = -1e300;
    std::vector<std::vector<double>> windows(static_cast<std::size_t>(p_max) + 1);
    for (int p = 1; p <= p_max; ++p) {
        windows[static_cast<std::size_t>(p)] = rc.window_log_mini(p, n);
        const double bp = limsup_prefix_average(windows[static_cast<std::size_t>(p)], frac);
        res.chi = std::max(res.chi, bp / static_cast<double>(p));
    }

    // empirical-measure pairing along the subsequence schedule, exact on the
    // Dirac empirical measures
    res.sup_emp = -1e300;
    for (int k = 5; k <= 10; ++k) {
        const long nk = static_cast<long>(std::ceil(static_cast<double>(n) * k / 10.0));
        for (int p = 1; p <= p_max; ++p) {
            const auto& wv = windows[static_cast<std::size_t>(p)];
            double s = 0.0;
            for (long i = 0; i < nk; ++i) s += wv[static_cast<std::size_t>(i)];
            res.sup_emp = std::max(res.sup_emp, s / static_cast<double>(nk) / static_cast<double>(p));
        }
    }
    res.gap = std::abs(res.chi - res.sup_emp);

    // grid route: same pairing through a histogram coarsening of mu_x^n
    {
        const GridMeasure mu = birkhoff_empirical(model, x, n, resolution);
        std::vector<double> vals(static_cast<std::size_t>(p_max) + 1, 0.0);
        for (long i = 0; i < mu.cell_count(); ++i) {
            const double w = mu.weights[static_cast<std::size_t>(i)];
            if (w == 0.0) continue;
            const RestrictedCocycle rcp = restricted_cocycle(model, mu.cell_center(i), p_max);
            for (int p = 1; p <= p_max; ++p)
                vals[static_cast<std::size_t>(p)] +=
                    w * rcp.window_log_mini(p, 1)[0] / static_cast<double>(p);
        }
        res.grid_emp = *std::max_element(vals.begin() + 1, vals.end());
    }
    return res;
}

std::string grid_measure_csv(const GridMeasure& mu) {
    std::string out = "cell,weight\n";
    char buf[64];
    for (long i = 0; i < mu.cell_count(); ++i) {
        const double w = mu.weights[static_cast<std::size_t>(i)];
        if (w == 0.0) continue;
        std::snprintf(buf, sizeof(buf), "%ld,%.17g\n", i, w);
        out += buf;
    }
    return out;
}

std::string grid_measure_sidecar_json(const GridMeasure& mu, const std::string& provenance) {
    nlohmann::ordered_json j;
    j["manifold"] = mu.manifold.name();
    j["resolution"] = mu.resolution;
    j["total"] = mu.total();
    j["provenance"] = provenance;
    return j.dump(2);
}

} // namespace plisslab
