#include "plisslab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plisslab {

namespace {

long window_start(long m, double frac) {
    if (frac <= 0.0 || frac > 1.0) throw std::invalid_argument("window fraction must lie in (0,1]");
    const long start = m - static_cast<long>(std::ceil(frac * static_cast<double>(m)));
    return std::max<long>(1, start + 1);
}

} // namespace

double limsup_prefix_average(const std::vector<double>& seq, double window_frac) {
    const long m = static_cast<long>(seq.size());
    if (m == 0) throw std::invalid_argument("limsup surrogate of an empty sequence");
    double best = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    const long k0 = window_start(m, window_frac);
    for (long k = 1; k <= m; ++k) {
        sum += seq[static_cast<std::size_t>(k - 1)];
        if (k >= k0) best = std::max(best, sum / static_cast<double>(k));
    }
    return best;
}

double liminf_prefix_average(const std::vector<double>& seq, double window_frac) {
    std::vector<double> neg(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) neg[i] = -seq[i];
    return -limsup_prefix_average(neg, window_frac);
}

double ExponentReport::sum_positive() const {
    double s = 0.0;
    for (double l : exponents)
        if (l > 0.0) s += l;
    return s;
}

ExponentReport lyapunov_exponents(const MapModel& model, const Point& x, long n,
                                  int direction, double index_tol) {
    if (n < 100) throw std::invalid_argument("lyapunov_exponents: n must be >= 100");
    const int d = model.dim();
    // warm-up lets the orthonormal frame lock onto the Oseledets flags before
    // the sums start; without it the alignment transient costs O(1/n)
    const long warmup = std::min<long>(200, n / 10);
    const std::vector<Point> pts = orbit_points(model, x, n + warmup + 1, direction);

    Mat Q = Mat::Identity(d, d);
    Vec acc = Vec::Zero(d);
    for (long i = 0; i < n + warmup; ++i) {
        const Mat M = direction > 0 ? model.derivative(pts[static_cast<std::size_t>(i)])
                                    : model.inverse_derivative(pts[static_cast<std::size_t>(i)]);
        const Mat B = M * Q;
        Eigen::HouseholderQR<Mat> qr(B);
        Mat Qn = qr.householderQ() * Mat::Identity(d, d);
        const Mat R = qr.matrixQR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
        for (int j = 0; j < d; ++j) {
            double rjj = R(j, j);
            if (rjj < 0.0) {
                Qn.col(j) = -Qn.col(j);
                rjj = -rjj;
            }
            if (i >= warmup) acc[j] += std::log(rjj);
        }
        Q = Qn;
    }

    ExponentReport rep;
    rep.n_used = n;
    rep.exponents.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) rep.exponents[static_cast<std::size_t>(j)] = acc[j] / static_cast<double>(n);
    std::sort(rep.exponents.begin(), rep.exponents.end(), std::greater<double>());
    for (double l : rep.exponents) {
        if (l > index_tol) ++rep.i_u;
        if (l >= -index_tol) ++rep.i_cu;
    }
    return rep;
}

std::vector<double> RestrictedCocycle::window_log_mini(int p, long count) const {
    if (p < 1) throw std::invalid_argument("window_log_mini: p must be >= 1");
    if (count + p - 1 > steps())
        throw std::invalid_argument("window_log_mini: cocycle too short");
    std::vector<double> out(static_cast<std::size_t>(count));
    if (k == 1) {
        // prefix sums of log R give every window exactly
        std::vector<double> S(log_scalar.size() + 1, 0.0);
        for (std::size_t i = 0; i < log_scalar.size(); ++i) S[i + 1] = S[i] + log_scalar[i];
        for (long i = 0; i < count; ++i)
            out[static_cast<std::size_t>(i)] =
                S[static_cast<std::size_t>(i + p)] - S[static_cast<std::size_t>(i)];
        return out;
    }
    for (long i = 0; i < count; ++i) {
        Mat prod = blocks[static_cast<std::size_t>(i)];
        for (int j = 1; j < p; ++j) prod = blocks[static_cast<std::size_t>(i + j)] * prod;
        out[static_cast<std::size_t>(i)] = std::log(mini_norm(prod));
    }
    return out;
}

RestrictedCocycle restricted_cocycle(const MapModel& model, const Point& x, long steps) {
    if (steps < 1) throw std::invalid_argument("restricted_cocycle: steps must be >= 1");
    RestrictedCocycle rc;
    rc.k = model.dim_F;
    Point p = model.manifold.wrap(x);
    Mat F = model.splitting(p).F;
    if (rc.k == 1) rc.log_scalar.reserve(static_cast<std::size_t>(steps));
    else rc.blocks.reserve(static_cast<std::size_t>(steps));
    for (long i = 0; i < steps; ++i) {
        const Mat D = model.derivative(p);
        const Mat DF = D * F;
        const Mat Fn = orthonormalize(DF);
        if (rc.k == 1) {
            rc.log_scalar.push_back(std::log(DF.col(0).norm()));
        } else {
            rc.blocks.push_back(Fn.transpose() * DF);
        }
        F = Fn;
        p = model.forward(p);
        if (!model.in_domain(p))
            throw std::runtime_error("restricted_cocycle: orbit escaped the domain at step " + std::to_string(i + 1));
    }
    return rc;
}

double beta_p(const RestrictedCocycle& rc, int p, long N, double window_frac) {
    if (p < 1) throw std::invalid_argument("beta_p: p must be >= 1");
    if (N < 10 * p) throw std::invalid_argument("beta_p: N must be >= 10p");
    return limsup_prefix_average(rc.window_log_mini(p, N), window_frac);
}

double beta_p(const MapModel& model, const Point& x, int p, long N, double window_frac) {
    return beta_p(restricted_cocycle(model, x, N + p - 1), p, N, window_frac);
}

double chi_F_min(const MapModel& model, const Point& x, int p_max, long N, double window_frac) {
    if (p_max < 1) throw std::invalid_argument("chi_F_min: p_max must be >= 1");
    const RestrictedCocycle rc = restricted_cocycle(model, x, N + p_max - 1);
    double best = -std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p)
        best = std::max(best, beta_p(rc, p, N, window_frac) / static_cast<double>(p));
    return best;
}

double m_bar_F(const OrbitTrace& trace, double window_frac) {
    if (trace.length() < 100) throw std::invalid_argument("m_bar_F: trace length must be >= 100");
    return limsup_prefix_average(trace.log_mini_F, window_frac);
}

double m_lower_F(const OrbitTrace& trace, double window_frac) {
    if (trace.length() < 100) throw std::invalid_argument("m_lower_F: trace length must be >= 100");
    return liminf_prefix_average(trace.log_mini_F, window_frac);
}

} // namespace plisslab
