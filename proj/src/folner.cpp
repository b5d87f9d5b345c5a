#include "plisslab/folner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace plisslab {

namespace {

// boundary of an interval-union TimeSet restricted to pliss membership
bool boundary_in_set(const TimeSet& Q, const TimeSet& P) {
    return P.contains_all(boundary(Q));
}

} // namespace

FolnerPlan folner_select(const std::vector<TimeSet>& pliss_sets,
                         const std::vector<double>& weights, double alpha_target,
                         int level_count, const FolnerOptions& opts) {
    const int S = static_cast<int>(pliss_sets.size());
    if (S == 0) throw std::invalid_argument("folner_select: no samples");
    if (static_cast<int>(weights.size()) != S)
        throw std::invalid_argument("folner_select: weights/samples size mismatch");
    if (level_count < 1) throw std::invalid_argument("folner_select: need at least one level");
    double wtot = 0.0;
    for (double w : weights) {
        if (w <= 0.0) throw std::invalid_argument("folner_select: weights must be positive");
        wtot += w;
    }
    if (std::abs(wtot - 1.0) > 1e-9)
        throw std::invalid_argument("folner_select: weights must sum to 1");
    long N = pliss_sets.front().horizon;
    for (const auto& P : pliss_sets) {
        if (!P.contains(0)) throw std::invalid_argument("folner_select: every Pliss set must contain 0");
        N = std::min(N, P.horizon);
    }

    FolnerPlan plan;
    plan.alpha = alpha_target;
    plan.sample_weights = weights;

    // weighted votes per time over the common horizon
    std::vector<double> vote(static_cast<std::size_t>(N) + 1, 0.0);
    for (int s = 0; s < S; ++s)
        for (long t : pliss_sets[static_cast<std::size_t>(s)].members)
            if (t <= N) vote[static_cast<std::size_t>(t)] += weights[static_cast<std::size_t>(s)];

    for (int lev = 1; lev <= level_count; ++lev) {
        const double shrink = std::pow(opts.schedule_ratio, level_count - lev);
        long n = static_cast<long>(std::llround(static_cast<double>(N) / shrink));
        n = std::max(n, opts.min_horizon);
        n = std::min(n, N);
        if (!plan.levels.empty() && n <= plan.levels.back().n) continue;

        // anchors: majority-held Pliss times in [0, n]
        std::vector<long> anchors;
        for (long t = 0; t <= n; ++t)
            if (vote[static_cast<std::size_t>(t)] >= opts.vote_frac * 1.0 - 1e-12)
                anchors.push_back(t);

        // Q: union of the inter-anchor intervals with gap <= gap_cap
        std::vector<long> q;
        for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
            const long a = anchors[i], b = anchors[i + 1];
            if (b - a <= opts.gap_cap && b <= n)
                for (long t = a; t < b; ++t) q.push_back(t);
        }
        TimeSet Q(n, std::move(q));
        if (Q.size() == 0) {
            plan.warnings.push_back("level " + std::to_string(lev) + ": no anchored interval, dropped");
            continue;
        }

        // retained samples: boundary of Q inside P(x) and enough Pliss mass in Q
        FolnerLevel level;
        level.n = n;
        level.Q = Q;
        for (int s = 0; s < S; ++s) {
            const TimeSet& P = pliss_sets[static_cast<std::size_t>(s)];
            if (!boundary_in_set(Q, P)) continue;
            long hits = 0;
            for (long t : Q.members)
                if (P.contains(t)) ++hits;
            if (static_cast<double>(hits) / static_cast<double>(n) >= alpha_target)
                level.lambda_indices.push_back(s);
        }
        if (level.lambda_indices.empty()) {
            plan.warnings.push_back("level " + std::to_string(lev) +
                                    ": no sample attains the density target, dropped");
            continue;
        }
        plan.levels.push_back(std::move(level));
    }

    if (plan.levels.empty())
        throw std::runtime_error("folner_select: all levels dropped");
    return plan;
}

FolnerReport verify_folner(const FolnerPlan& plan, const std::vector<TimeSet>& pliss_sets,
                           const FolnerTolerances& tol) {
    if (plan.levels.empty()) throw std::invalid_argument("verify_folner: empty plan");
    FolnerReport rep;

    rep.item1_horizons = true;
    for (std::size_t i = 0; i + 1 < plan.levels.size(); ++i)
        if (plan.levels[i + 1].n <= plan.levels[i].n) rep.item1_horizons = false;

    for (const FolnerLevel& level : plan.levels) {
        FolnerLevelReport lr;
        lr.n = level.n;
        const double dn = static_cast<double>(level.n);
        lr.q_density = static_cast<double>(level.Q.size()) / dn;
        lr.boundary_ratio = static_cast<double>(boundary(level.Q).size()) / dn;

        double mass = 0.0;
        for (int s : level.lambda_indices) mass += plan.sample_weights[static_cast<std::size_t>(s)];
        lr.log_mass_ratio = std::log(std::max(mass, 1e-300)) / dn;

        lr.boundary_in_pliss = true;
        lr.fill_deficit = 0.0;
        lr.lower_density = 1.0;
        for (int s : level.lambda_indices) {
            const TimeSet& P = pliss_sets[static_cast<std::size_t>(s)];
            if (!boundary_in_set(level.Q, P)) lr.boundary_in_pliss = false;
            const TimeSet Pm = fill(P, tol.m);
            long missing = 0, hits = 0;
            for (long t : level.Q.members) {
                if (!Pm.contains(t)) ++missing;
                if (P.contains(t)) ++hits;
            }
            lr.fill_deficit = std::max(lr.fill_deficit, static_cast<double>(missing) / dn);
            lr.lower_density = std::min(lr.lower_density, static_cast<double>(hits) / dn);
        }
        rep.levels.push_back(lr);
    }

    const FolnerLevelReport& last = rep.levels.back();
    rep.item2_mass = std::abs(last.log_mass_ratio) <= tol.eps_mass;
    rep.item3_density = last.q_density >= plan.alpha - tol.eps_fill;
    rep.item4_folner = last.boundary_ratio <= tol.eps_boundary;
    rep.item5_boundary_pliss = true;
    for (const auto& lr : rep.levels)
        if (!lr.boundary_in_pliss) rep.item5_boundary_pliss = false;
    rep.item6_fill = last.fill_deficit <= tol.eps_fill;
    rep.item7_lower_density = last.lower_density >= plan.alpha - tol.eps_fill;
    rep.pass = rep.item1_horizons && rep.item2_mass && rep.item3_density && rep.item4_folner &&
               rep.item5_boundary_pliss && rep.item6_fill && rep.item7_lower_density;
    return rep;
}

std::string folner_report_json(const FolnerReport& report, const FolnerTolerances& tol,
                               double alpha) {
    nlohmann::ordered_json j;
    j["alpha"] = alpha;
    j["tolerances"] = {{"eps_boundary", tol.eps_boundary},
                       {"eps_mass", tol.eps_mass},
                       {"eps_fill", tol.eps_fill},
                       {"m", tol.m}};
    j["levels"] = nlohmann::ordered_json::array();
    for (const auto& lr : report.levels) {
        nlohmann::ordered_json l;
        l["n"] = lr.n;
        l["q_density"] = lr.q_density;
        l["boundary_ratio"] = lr.boundary_ratio;
        l["log_mass_ratio"] = lr.log_mass_ratio;
        l["boundary_in_pliss"] = lr.boundary_in_pliss;
        l["fill_deficit"] = lr.fill_deficit;
        l["lower_density"] = lr.lower_density;
        j["levels"].push_back(l);
    }
    j["items"] = {{"item1_horizons", report.item1_horizons},
                  {"item2_mass", report.item2_mass},
                  {"item3_density", report.item3_density},
                  {"item4_folner", report.item4_folner},
                  {"item5_boundary_pliss", report.item5_boundary_pliss},
                  {"item6_fill", report.item6_fill},
                  {"item7_lower_density", report.item7_lower_density}};
    j["pass"] = report.pass;
    return j.dump(2);
}

} // namespace plisslab
