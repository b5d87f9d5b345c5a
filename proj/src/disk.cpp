#include "plisslab/disk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "plisslab/cocycle.hpp"
#include "plisslab/linalg.hpp"
#include "plisslab/orbit.hpp"
#include "plisslab/timeset.hpp"

namespace plisslab {

namespace {

double chord(const Manifold& man, const Point& a, const Point& b) {
    return man.shortest_delta(a.coords, b.coords).norm();
}

// Decompose v = E a + F b in the (generally non-orthogonal) direct sum and
// return (|E a|, |F b|).
std::pair<double, double> split_components(const SplitFrames& fr, const Vec& v) {
    const Eigen::Index d = v.size();
    Mat B(d, d);
    B.leftCols(fr.E.cols()) = fr.E;
    B.rightCols(fr.F.cols()) = fr.F;
    const Vec c = B.partialPivLu().solve(v);
    const Vec vE = fr.E * c.head(fr.E.cols());
    const Vec vF = fr.F * c.tail(fr.F.cols());
    return {vE.norm(), vF.norm()};
}

} // namespace

bool in_cone(const MapModel& model, const Point& x, const Vec& v, double theta) {
    if (theta <= 0.0) throw std::invalid_argument("in_cone: theta must be positive");
    const auto [nE, nF] = split_components(model.splitting(x), v);
    return nE < theta * nF;
}

Point random_domain_point(const MapModel& model, Rng& rng) {
    const int d = model.dim();
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec c(d);
        for (int i = 0; i < d; ++i)
            c[i] = model.manifold.periodic(i) ? rng.uniform() : rng.uniform(-1.0, 1.0);
        Point p(c);
        if (model.in_domain(p)) return p;
    }
    throw std::runtime_error("random_domain_point: rejection sampling failed");
}

ConeCheckResult cone_invariance_check(const MapModel& model, double theta, long samples,
                                      std::uint64_t seed) {
    if (theta <= 0.0) throw std::invalid_argument("cone_invariance_check: theta must be positive");
    Rng rng(seed, 17);
    ConeCheckResult res;
    res.pass = true;
    for (long k = 0; k < samples; ++k) {
        const Point x = random_domain_point(model, rng);
        const SplitFrames fr = model.splitting(x);
        Vec uf(fr.F.cols()), ue(fr.E.cols());
        for (Eigen::Index i = 0; i < uf.size(); ++i) uf[i] = rng.normal();
        for (Eigen::Index i = 0; i < ue.size(); ++i) ue[i] = rng.normal();
        if (uf.norm() < 1e-12) uf.setOnes();
        if (ue.norm() < 1e-12) ue.setOnes();
        uf.normalize();
        ue.normalize();
        // v sits exactly on the boundary of C^F_theta(x)
        const Vec v = fr.F * uf + theta * (fr.E * ue);
        const Vec w = model.derivative(x) * v;
        const auto [nE, nF] = split_components(model.splitting(model.forward(x)), w);
        const double ratio = nE / std::max(0.5 * theta * nF, 1e-300);
        res.worst_ratio = std::max(res.worst_ratio, ratio);
        if (ratio >= 1.0) res.pass = false;
    }
    return res;
}

Vec FDisk::point_at(double s) const {
    if (s <= 0.0) return nodes.front();
    if (s >= cum.back()) return nodes.back();
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    const std::size_t j = static_cast<std::size_t>(it - cum.begin()) - 1;
    const double seg = cum[j + 1] - cum[j];
    const double t = seg > 0.0 ? (s - cum[j]) / seg : 0.0;
    return nodes[j] + t * (nodes[j + 1] - nodes[j]);
}

Point FDisk::sample_point(long i) const {
    return Point(0.5 * (nodes[static_cast<std::size_t>(i)] + nodes[static_cast<std::size_t>(i) + 1]));
}

double FDisk::sample_weight(long i) const {
    return cum[static_cast<std::size_t>(i) + 1] - cum[static_cast<std::size_t>(i)];
}

double FDisk::sample_param(long i) const {
    return 0.5 * (cum[static_cast<std::size_t>(i)] + cum[static_cast<std::size_t>(i) + 1]);
}

namespace {

FDisk finalize_disk(const MapModel& model, std::vector<Vec> nodes, const Point& center,
                    double s_center_hint) {
    FDisk d;
    d.nodes = std::move(nodes);
    d.cum.resize(d.nodes.size());
    d.cum[0] = 0.0;
    for (std::size_t j = 1; j < d.nodes.size(); ++j)
        d.cum[j] = d.cum[j - 1] + (d.nodes[j] - d.nodes[j - 1]).norm();
    d.center = model.manifold.wrap(center);
    const SplitFrames fr = model.splitting(d.center);
    d.frame_F = fr.F;
    d.frame_E = fr.E;
    d.s_center = s_center_hint;
    d.radius = std::min(d.s_center, d.total_mass() - d.s_center);
    double lip = 0.0;
    for (std::size_t j = 0; j + 1 < d.nodes.size(); ++j) {
        const Vec t = d.nodes[j + 1] - d.nodes[j];
        const double df = (d.frame_F.transpose() * t).norm();
        const double de = (d.frame_E.transpose() * t).norm();
        if (df > 1e-15) lip = std::max(lip, de / df);
    }
    d.lipschitz_bound = lip;
    return d;
}

} // namespace

FDisk make_fdisk(const MapModel& model, const Point& center, double radius, long cells,
                 double theta1, const std::function<Vec(double)>& graph) {
    if (radius <= 0.0) throw std::invalid_argument("make_fdisk: radius must be positive");
    if (cells < 2) throw std::invalid_argument("make_fdisk: need at least 2 cells");
    if (cells % 2 != 0) ++cells;
    const Point c = model.manifold.wrap(center);
    if (!model.in_domain(c)) throw std::invalid_argument("make_fdisk: center outside domain");
    const SplitFrames fr = model.splitting(c);
    if (fr.F.cols() != 1)
        throw std::invalid_argument("make_fdisk: disk engine requires one-dimensional F");

    std::vector<Vec> nodes;
    nodes.reserve(static_cast<std::size_t>(cells) + 1);
    for (long j = 0; j <= cells; ++j) {
        const double t = -radius + 2.0 * radius * static_cast<double>(j) / static_cast<double>(cells);
        Vec g = Vec::Zero(fr.E.cols());
        if (graph) g = graph(t);
        if (j == cells / 2 && graph && g.norm() > 1e-10)
            throw std::invalid_argument("make_fdisk: graph must vanish at the center");
        nodes.push_back(c.coords + t * fr.F.col(0) + fr.E * g);
    }
    // Lipschitz/cone validation of the node tangents
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
        const Vec t = nodes[j + 1] - nodes[j];
        const double df = (fr.F.transpose() * t).norm();
        const double de = (fr.E.transpose() * t).norm();
        if (de > theta1 * df + 1e-9)
            throw std::invalid_argument("make_fdisk: graph exceeds the Lipschitz bound theta1");
    }
    FDisk d = finalize_disk(model, std::move(nodes), c, 0.0);
    d.s_center = d.cum[static_cast<std::size_t>(cells / 2)];
    d.radius = std::min(d.s_center, d.total_mass() - d.s_center);
    d.frame_F = fr.F;
    d.frame_E = fr.E;
    return d;
}

double IteratedDisk::original_mass() const {
    double s = 0.0;
    for (const auto& c : cells) s += (c.p1 - c.p0).norm();
    return s;
}

double IteratedDisk::image_mass(const Manifold& m) const {
    double s = 0.0;
    for (const auto& c : cells) s += m.shortest_delta(c.q0, c.q1).norm();
    return s;
}

double IteratedDisk::jac_weighted_original() const {
    double s = 0.0;
    for (const auto& c : cells) s += (c.p1 - c.p0).norm() * c.jac;
    return s;
}

namespace {

// advance one cell by one map application, subdividing in the original
// parameter until the image chord respects the pitch
void push_cell(const MapModel& model, const DiskCell& c, int steps_done, double max_pitch,
               std::vector<DiskCell>& out, int depth) {
    const Manifold& man = model.manifold;
    const Point a = man.wrap(Point(c.q0));
    const Point b = man.wrap(Point(c.q1));
    const Point an = model.forward(a);
    const Point bn = model.forward(b);
    const double new_chord = chord(man, an, bn);
    if (new_chord > max_pitch && depth < 48 && c.s1 - c.s0 > 1e-14) {
        DiskCell left = c, right = c;
        const double sm = 0.5 * (c.s0 + c.s1);
        const Vec pm = 0.5 * (c.p0 + c.p1);
        Point qm(man.wrap(pm));
        for (int k = 0; k < steps_done; ++k) qm = model.forward(qm);
        left.s1 = sm;
        left.p1 = pm;
        left.q1 = qm.coords;
        right.s0 = sm;
        right.p0 = pm;
        right.q0 = qm.coords;
        push_cell(model, left, steps_done, max_pitch, out, depth + 1);
        push_cell(model, right, steps_done, max_pitch, out, depth + 1);
        return;
    }
    DiskCell nc = c;
    const Vec tvec = man.shortest_delta(c.q0, c.q1);
    const double tlen = tvec.norm();
    if (tlen > 1e-15) {
        const Vec t = tvec / tlen;
        const double f0 = (model.derivative(a) * t).norm();
        const double f1 = (model.derivative(b) * t).norm();
        nc.jac *= 0.5 * (f0 + f1);
    }
    nc.q0 = an.coords;
    nc.q1 = bn.coords;
    out.push_back(nc);
}

} // namespace

IteratedDisk iterate_disk(const MapModel& model, const FDisk& disk, int n,
                          const IterateOptions& opts) {
    if (n < 0) throw std::invalid_argument("iterate_disk: n must be >= 0");
    IteratedDisk it;
    it.steps = n;
    it.cells.reserve(static_cast<std::size_t>(disk.cell_count()));
    for (long j = 0; j < disk.cell_count(); ++j) {
        DiskCell c;
        c.s0 = disk.cum[static_cast<std::size_t>(j)];
        c.s1 = disk.cum[static_cast<std::size_t>(j) + 1];
        c.p0 = disk.nodes[static_cast<std::size_t>(j)];
        c.p1 = disk.nodes[static_cast<std::size_t>(j) + 1];
        c.q0 = c.p0;
        c.q1 = c.p1;
        it.cells.push_back(c);
    }
    for (int step = 0; step < n; ++step) {
        std::vector<DiskCell> next;
        next.reserve(it.cells.size() * 2);
        for (const DiskCell& c : it.cells)
            push_cell(model, c, step, opts.max_pitch, next, 0);
        it.cells.swap(next);
        if (opts.cone_theta > 0.0) {
            const long stride =
                std::max<long>(1, static_cast<long>(it.cells.size()) / std::max<long>(1, opts.cone_checks_per_step));
            for (std::size_t j = 0; j < it.cells.size(); j += static_cast<std::size_t>(stride)) {
                const DiskCell& c = it.cells[j];
                const Vec t = model.manifold.shortest_delta(c.q0, c.q1);
                if (t.norm() < 1e-15) continue;
                const Point mid = model.manifold.wrap(Point(Vec(c.q0 + 0.5 * t)));
                if (!in_cone(model, mid, t, opts.cone_theta))
                    throw std::runtime_error("iterate_disk: image tangent left the cone at step " +
                                             std::to_string(step + 1));
            }
        }
    }
    return it;
}

std::vector<FDisk> cut_into_fdisks(const MapModel& model, const IteratedDisk& it, double delta0,
                                   double theta1) {
    (void)theta1;
    if (delta0 <= 0.0) throw std::invalid_argument("cut_into_fdisks: delta0 must be positive");
    const Manifold& man = model.manifold;
    std::vector<FDisk> out;
    std::vector<Vec> nodes; // unwrapped coordinates of the current chunk
    double acc = 0.0;
    auto flush = [&]() {
        if (nodes.size() >= 2) {
            FDisk probe;
            probe.nodes = nodes;
            probe.cum.resize(nodes.size());
            probe.cum[0] = 0.0;
            for (std::size_t j = 1; j < nodes.size(); ++j)
                probe.cum[j] = probe.cum[j - 1] + (nodes[j] - nodes[j - 1]).norm();
            const double half = 0.5 * probe.cum.back();
            const Vec mid = probe.point_at(half);
            out.push_back(finalize_disk(model, std::move(probe.nodes), Point(mid), half));
        }
        nodes.clear();
        acc = 0.0;
    };
    for (const DiskCell& c : it.cells) {
        const double len = man.shortest_delta(c.q0, c.q1).norm();
        if (acc + len > 2.0 * delta0 && acc > 0.0) flush();
        if (nodes.empty()) nodes.push_back(c.q0);
        nodes.push_back(nodes.back() + man.shortest_delta(c.q0, c.q1));
        acc += len;
    }
    flush();
    return out;
}

namespace {

struct PushedWindow {
    std::vector<double> params;             // base arc coordinates, increasing
    std::vector<std::vector<Point>> steps;  // steps[i][j]
};

PushedWindow push_window(const MapModel& model, const FDisk& disk, double sa, double sb, int n,
                         long M) {
    PushedWindow w;
    w.params.resize(static_cast<std::size_t>(M) + 1);
    w.steps.assign(static_cast<std::size_t>(n) + 1, {});
    w.steps[0].reserve(static_cast<std::size_t>(M) + 1);
    for (long j = 0; j <= M; ++j) {
        const double s = sa + (sb - sa) * static_cast<double>(j) / static_cast<double>(M);
        w.params[static_cast<std::size_t>(j)] = s;
        w.steps[0].push_back(model.manifold.wrap(Point(disk.point_at(s))));
    }
    for (int i = 1; i <= n; ++i) {
        w.steps[static_cast<std::size_t>(i)].reserve(w.steps[0].size());
        for (const Point& p : w.steps[static_cast<std::size_t>(i) - 1])
            w.steps[static_cast<std::size_t>(i)].push_back(model.forward(p));
    }
    return w;
}

std::vector<double> cum_of(const Manifold& man, const std::vector<Point>& pts) {
    std::vector<double> cum(pts.size(), 0.0);
    for (std::size_t j = 1; j < pts.size(); ++j)
        cum[j] = cum[j - 1] + chord(man, pts[j - 1], pts[j]);
    return cum;
}

// Grow a one-sided window from anchor_s until the step-n image arc reaches
// `target`; returns the trimmed boundary parameter. dir = +1/-1.
struct SideResult {
    double s_edge = 0.0;
    bool truncated = false;
};

SideResult grow_side(const MapModel& model, const FDisk& disk, double anchor_s, long n,
                     double target, int dir, long M) {
    const double avail = dir > 0 ? disk.total_mass() - anchor_s : anchor_s;
    SideResult res;
    if (avail <= 1e-13) {
        res.s_edge = anchor_s;
        res.truncated = true;
        return res;
    }
    // shrink until the pushed polyline is segment-resolved (chords near the
    // torus wrap threshold alias), then grow from below until the image arc
    // reaches the target; the accepted window overshoots by at most one
    // doubling, so the trim cells stay fine
    const double max_segment = std::min(0.1, 0.25 * target);
    double w = std::min(avail, std::max(1e-12, target));
    double arc = 0.0;
    PushedWindow pw;
    for (int it = 0; it < 400; ++it) {
        const double sa = dir > 0 ? anchor_s : anchor_s - w;
        const double sb = dir > 0 ? anchor_s + w : anchor_s;
        pw = push_window(model, disk, sa, sb, static_cast<int>(n), M);
        const auto& final_pts = pw.steps.back();
        double seg_max = 0.0;
        arc = 0.0;
        for (std::size_t j = 1; j < final_pts.size(); ++j) {
            const double seg = chord(model.manifold, final_pts[j - 1], final_pts[j]);
            seg_max = std::max(seg_max, seg);
            arc += seg;
        }
        if (seg_max > max_segment && w > 1e-13) {
            w *= 0.2;
            continue;
        }
        if (arc >= target) break;
        if (w >= avail - 1e-13) {
            res.truncated = true;
            break;
        }
        w = std::min(avail, 2.0 * w);
    }
    if (res.truncated && arc < target) {
        res.s_edge = dir > 0 ? anchor_s + w : anchor_s - w;
        return res;
    }
    // trim to the exact target by interpolating inside the final cell
    const std::vector<double> cum = cum_of(model.manifold, pw.steps.back());
    const double want = dir > 0 ? target : cum.back() - target;
    const auto it = std::upper_bound(cum.begin(), cum.end(), want);
    std::size_t j = it == cum.begin() ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
    j = std::min(j, cum.size() - 2);
    const double seg = cum[j + 1] - cum[j];
    const double frac = seg > 0.0 ? (want - cum[j]) / seg : 0.0;
    res.s_edge = pw.params[j] + frac * (pw.params[j + 1] - pw.params[j]);
    return res;
}

} // namespace

DynamicalBall dynamical_ball(const MapModel& model, const FDisk& disk, double anchor_s, long n,
                             double delta) {
    if (n < 0) throw std::invalid_argument("dynamical_ball: n must be >= 0");
    if (delta <= 0.0) throw std::invalid_argument("dynamical_ball: delta must be positive");
    DynamicalBall b;
    b.n = n;
    b.delta = delta;
    if (n == 0) {
        b.lo = std::max(0.0, anchor_s - delta);
        b.hi = std::min(disk.total_mass(), anchor_s + delta);
        b.truncated = (anchor_s - delta < 0.0) || (anchor_s + delta > disk.total_mass());
    } else {
        const long M = 2048;
        const SideResult left = grow_side(model, disk, anchor_s, n, delta, -1, M);
        const SideResult right = grow_side(model, disk, anchor_s, n, delta, +1, M);
        b.lo = left.s_edge;
        b.hi = right.s_edge;
        b.truncated = left.truncated || right.truncated;
    }
    for (long i = 0; i < disk.cell_count(); ++i) {
        const double s = disk.sample_param(i);
        if (s > b.lo && s < b.hi) b.member_indices.push_back(static_cast<int>(i));
    }
    return b;
}

DynamicalBall dynamical_ball_at_sample(const MapModel& model, const FDisk& disk,
                                       long sample_index, long n, double delta) {
    if (sample_index < 0 || sample_index >= disk.cell_count())
        throw std::invalid_argument("dynamical_ball_at_sample: sample index out of range");
    DynamicalBall b = dynamical_ball(model, disk, disk.sample_param(sample_index), n, delta);
    b.anchor_index = sample_index;
    return b;
}

BallTriple dynamical_ball_triple(const MapModel& model, const FDisk& disk, double anchor_s,
                                 long n, double delta0) {
    BallTriple t;
    t.plain = dynamical_ball(model, disk, anchor_s, n, delta0 / 3.0);
    t.hat = dynamical_ball(model, disk, anchor_s, n, 2.0 * delta0 / 3.0);
    t.hathat = dynamical_ball(model, disk, anchor_s, n, delta0);
    return t;
}

DistortionResult distortion_check(const MapModel& model, const FDisk& disk, int n, double eps,
                                  double delta_eps) {
    if (n < 1) throw std::invalid_argument("distortion_check: n must be >= 1");
    if (eps <= 0.0 || delta_eps <= 0.0)
        throw std::invalid_argument("distortion_check: eps and delta_eps must be positive");
    const OrbitTrace anchor = orbit(model, disk.center, n + 1);
    const Manifold& man = model.manifold;

    // largest one-sided windows staying delta_eps-close to the anchor orbit
    // for steps 0..n-1 (checked on a dense subsample)
    auto side_ok = [&](double w, int dir) {
        const double sa = dir > 0 ? disk.s_center : disk.s_center - w;
        const double sb = dir > 0 ? disk.s_center + w : disk.s_center;
        const PushedWindow pw = push_window(model, disk, sa, sb, n - 1, 256);
        for (int i = 0; i < n; ++i)
            for (const Point& p : pw.steps[static_cast<std::size_t>(i)])
                if (man.distance(p, anchor.points[static_cast<std::size_t>(i)]) >= delta_eps)
                    return false;
        return true;
    };
    auto side_max = [&](int dir) {
        const double avail = dir > 0 ? disk.total_mass() - disk.s_center : disk.s_center;
        if (avail <= 0.0) return 0.0;
        if (side_ok(avail, dir)) return avail;
        double lo = 0.0, hi = avail;
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (lo + hi);
            (side_ok(mid, dir) ? lo : hi) = mid;
        }
        return lo;
    };
    const double w_lo = side_max(-1);
    const double w_hi = side_max(+1);
    if (w_lo + w_hi < 1e-12)
        throw std::runtime_error("distortion_check: empty Gamma; shrink delta_eps or n");

    const PushedWindow pw =
        push_window(model, disk, disk.s_center - w_lo, disk.s_center + w_hi, n, 4096);
    DistortionResult res;
    res.original_mass = w_lo + w_hi;
    res.image_mass = cum_of(man, pw.steps.back()).back();
    double lj = 0.0;
    for (int i = 0; i < n; ++i) lj += anchor.log_jac_F[static_cast<std::size_t>(i)];
    res.jac_product = std::exp(lj);
    res.lhs = std::exp(-static_cast<double>(n) * eps) * res.image_mass;
    res.mid = res.original_mass * res.jac_product;
    res.rhs = std::exp(static_cast<double>(n) * eps) * res.image_mass;
    const double slack = 1e-9 * std::max(1.0, res.mid);
    res.pass = (res.lhs <= res.mid + slack) && (res.mid <= res.rhs + slack);
    return res;
}

PlissIterateResult pliss_iterate_check(const MapModel& model, const FDisk& disk, long n,
                                       double a, double delta0, long pairs) {
    if (n < 1) throw std::invalid_argument("pliss_iterate_check: n must be >= 1");
    if (delta0 <= 0.0) throw std::invalid_argument("pliss_iterate_check: delta0 must be positive");
    const long M = 2048;
    const SideResult left = grow_side(model, disk, disk.s_center, n, delta0, -1, M);
    const SideResult right = grow_side(model, disk, disk.s_center, n, delta0, +1, M);
    if (left.truncated || right.truncated)
        throw std::runtime_error("pliss_iterate_check: image disk smaller than delta0 "
                                 "(Pliss calibration failure)");

    const PushedWindow pw =
        push_window(model, disk, left.s_edge, right.s_edge, static_cast<int>(n), M);
    std::vector<std::vector<double>> cums(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i)
        cums[static_cast<std::size_t>(i)] = cum_of(model.manifold, pw.steps[static_cast<std::size_t>(i)]);

    // sample node indices, pairwise checks of the backward contraction
    PlissIterateResult res;
    std::vector<std::size_t> idx;
    const long K = std::max<long>(2, pairs);
    for (long k = 0; k < K; ++k)
        idx.push_back(static_cast<std::size_t>((static_cast<double>(k) / static_cast<double>(K - 1)) *
                                               static_cast<double>(M)));
    const auto& cn = cums[static_cast<std::size_t>(n)];
    for (std::size_t ai = 0; ai < idx.size(); ++ai) {
        for (std::size_t bi = ai + 1; bi < idx.size(); ++bi) {
            const std::size_t ja = idx[ai], jb = idx[bi];
            const double d0 = cn[jb] - cn[ja];
            if (d0 < 1e-13) continue;
            for (long i = 1; i <= n; ++i) {
                const auto& ci = cums[static_cast<std::size_t>(n - i)];
                const double di = ci[jb] - ci[ja];
                const double bound = std::exp(-static_cast<double>(i) * a) * d0;
                res.max_violation = std::max(res.max_violation, di / bound);
            }
        }
    }
    // empirical backward-Jacobian distortion over the carved disk
    double jb_min = std::numeric_limits<double>::infinity(), jb_max = 0.0;
    const auto& c0 = cums[0];
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
        const std::size_t ja = idx[k], jb2 = idx[k + 1];
        const double dn = cn[jb2] - cn[ja];
        if (dn < 1e-13) continue;
        const double r = (c0[jb2] - c0[ja]) / dn;
        jb_min = std::min(jb_min, r);
        jb_max = std::max(jb_max, r);
    }
    res.distortion_ratio = (jb_min > 0.0 && std::isfinite(jb_min)) ? jb_max / jb_min : 1.0;
    res.pass = res.max_violation <= 1.0 + 1e-9;
    return res;
}

VitaliSelection vitali_select(const std::vector<VitaliBall>& balls) {
    std::vector<int> order(balls.size());
    for (std::size_t i = 0; i < balls.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return balls[static_cast<std::size_t>(a)].n < balls[static_cast<std::size_t>(b)].n; });
    VitaliSelection sel;
    for (int id : order) {
        const VitaliBall& b = balls[static_cast<std::size_t>(id)];
        int witness = -1;
        for (int acc : sel.accepted) {
            const VitaliBall& o = balls[static_cast<std::size_t>(acc)];
            if (b.hat_lo < o.hi && o.lo < b.hat_hi) {
                witness = acc;
                break;
            }
        }
        if (witness < 0) sel.accepted.push_back(id);
        else sel.rejected_witness.emplace_back(id, witness);
    }
    // small families are re-checked exhaustively on every call
    if (balls.size() <= 1000 && !vitali_verify(balls, sel))
        throw std::logic_error("vitali_select: certificate failed the exhaustive re-check");
    return sel;
}

bool vitali_verify(const std::vector<VitaliBall>& balls, const VitaliSelection& sel) {
    for (std::size_t i = 0; i < sel.accepted.size(); ++i)
        for (std::size_t j = i + 1; j < sel.accepted.size(); ++j) {
            const VitaliBall& a = balls[static_cast<std::size_t>(sel.accepted[i])];
            const VitaliBall& b = balls[static_cast<std::size_t>(sel.accepted[j])];
            if (a.lo < b.hi && b.lo < a.hi) return false;
        }
    if (sel.accepted.size() + sel.rejected_witness.size() != balls.size()) return false;
    for (const auto& [rej, wit] : sel.rejected_witness) {
        const VitaliBall& r = balls[static_cast<std::size_t>(rej)];
        bool meets = false;
        for (int acc : sel.accepted) {
            const VitaliBall& o = balls[static_cast<std::size_t>(acc)];
            if (r.hat_lo < o.hi && o.lo < r.hat_hi) {
                meets = true;
                break;
            }
        }
        const VitaliBall& w = balls[static_cast<std::size_t>(wit)];
        const bool wit_meets = r.hat_lo < w.hi && w.lo < r.hat_hi;
        if (!meets || !wit_meets) return false;
    }
    return true;
}

DoubleSizeResult double_size_ratio(const MapModel& model, const FDisk& disk,
                                   const std::vector<std::pair<double, long>>& anchors_and_times,
                                   double delta0) {
    DoubleSizeResult res;
    for (const auto& [s, n] : anchors_and_times) {
        const BallTriple t = dynamical_ball_triple(model, disk, s, n, delta0);
        if (t.plain.base_mass() <= 0.0) continue;
        DoubleSizeItem item;
        item.n = n;
        item.anchor_s = s;
        item.ratio = t.hathat.base_mass() / t.plain.base_mass();
        res.max_ratio = std::max(res.max_ratio, item.ratio);
        res.items.push_back(item);
    }
    return res;
}

Calibration calibrate(const MapModel& model, double eps, std::uint64_t seed) {
    Calibration cal;
    const double theta_ladder[] = {0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0, 4.0, 8.0};
    bool found = false;
    for (double th : theta_ladder) {
        if (cone_invariance_check(model, th, 2000, seed).pass) {
            cal.theta0 = th;
            found = true;
            break;
        }
    }
    if (!found) throw std::runtime_error("calibrate: no cone aperture certifies invariance");
    cal.theta1 = 0.5 * cal.theta0;
    cal.theta_eps = cal.theta0;

    // disk scale: widest ladder entry whose Pliss-iterate probe passes
    Rng rng(seed, 91);
    const double delta_ladder[] = {0.2, 0.1, 0.05, 0.02};
    found = false;
    for (double d0 : delta_ladder) {
        try {
            const Point c = random_domain_point(model, rng);
            const FDisk disk = make_fdisk(model, c, 2.5 * d0, 256, cal.theta1);
            const OrbitTrace tr = orbit(model, c, 41);
            double mean = 0.0;
            for (double v : tr.log_mini_F) mean += v;
            mean /= static_cast<double>(tr.log_mini_F.size());
            if (mean <= 0.0) continue;
            const auto P = pliss_times(tr.log_mini_F, 0.5 * mean);
            long n_probe = 0;
            for (long t : P.members)
                if (t > cal.N && t <= 20) n_probe = t;
            if (n_probe == 0) continue;
            const PlissIterateResult pr =
                pliss_iterate_check(model, disk, n_probe, 0.25 * mean, d0, 8);
            if (pr.pass) {
                cal.delta0 = d0;
                found = true;
                break;
            }
        } catch (const std::exception&) {
            continue;
        }
    }
    if (!found) throw std::runtime_error("calibrate: Pliss-iterate probe failed at every disk scale");
    cal.delta1 = cal.delta0;

    // delta_eps: widest scale at which log Jac(Df|F) oscillates by < eps/2
    const double eps_ladder[] = {0.05, 0.02, 0.01, 0.005, 0.002};
    cal.delta_eps = eps_ladder[4];
    for (double de : eps_ladder) {
        double worst = 0.0;
        Rng r2(seed, 92);
        for (int k = 0; k < 400; ++k) {
            const Point x = random_domain_point(model, r2);
            Vec dv(model.dim());
            for (int i = 0; i < model.dim(); ++i) dv[i] = r2.normal();
            dv *= de / std::max(dv.norm(), 1e-12);
            const Point y = model.manifold.wrap(Point(Vec(x.coords + dv)));
            if (!model.in_domain(y)) continue;
            const SplitFrames fx = model.splitting(x);
            const SplitFrames fy = model.splitting(y);
            const double jx = std::log(jacobian_on_subspace(model.derivative(x), fx.F));
            const double jy = std::log(jacobian_on_subspace(model.derivative(y), fy.F));
            worst = std::max(worst, std::abs(jx - jy));
        }
        if (worst < 0.5 * eps) {
            cal.delta_eps = de;
            break;
        }
    }
    return cal;
}

} // namespace plisslab
