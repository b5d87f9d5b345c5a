#ifndef PLISSLAB_FOLNER_HPP
#define PLISSLAB_FOLNER_HPP

#include <string>
#include <vector>

#include "plisslab/timeset.hpp"

namespace plisslab {

/// One level of the selection: a horizon n, the retained sample indices and
/// the time set Q inside [0, n).
struct FolnerLevel {
    long n = 0;
    std::vector<int> lambda_indices;
    TimeSet Q;
};

struct FolnerPlan {
    std::vector<FolnerLevel> levels; // n strictly increasing
    double alpha = 0.0;              // target Pliss density
    std::vector<double> sample_weights;
    std::vector<std::string> warnings;
};

struct FolnerOptions {
    double vote_frac = 0.5;     // anchor = time held by at least this weight fraction
    long gap_cap = 50;          // inter-anchor gaps longer than this are left out of Q
    long min_horizon = 8;
    double schedule_ratio = 2.0; // geometric horizon schedule
};

/// Greedy constructor for the (n_l, Lambda_l, Q_l) data: anchors are times
/// held by a weighted majority of the sample Pliss sets, Q is the union of
/// short inter-anchor intervals, and a sample is retained when its Pliss set
/// contains the whole boundary of Q and meets the density target. Verification
/// is deferred to verify_folner.
FolnerPlan folner_select(const std::vector<TimeSet>& pliss_sets,
                         const std::vector<double>& weights, double alpha_target,
                         int level_count, const FolnerOptions& opts = {});

struct FolnerTolerances {
    double eps_boundary = 0.05;
    double eps_mass = 0.05;
    double eps_fill = 0.1;
    long m = 50;
};

struct FolnerLevelReport {
    long n = 0;
    double q_density = 0.0;
    double boundary_ratio = 0.0;
    double log_mass_ratio = 0.0;
    bool boundary_in_pliss = false;
    double fill_deficit = 0.0;
    double lower_density = 0.0;
};

/// Pass/fail per Folner-construction item, evaluated at the final level
/// (items 2..7; item 1 is the horizon schedule).
struct FolnerReport {
    std::vector<FolnerLevelReport> levels;
    bool item1_horizons = false;
    bool item2_mass = false;
    bool item3_density = false;
    bool item4_folner = false;
    bool item5_boundary_pliss = false;
    bool item6_fill = false;
    bool item7_lower_density = false;
    bool pass = false;
};

FolnerReport verify_folner(const FolnerPlan& plan, const std::vector<TimeSet>& pliss_sets,
                           const FolnerTolerances& tol);

/// JSON array with one object per level, keys matching the report fields.
std::string folner_report_json(const FolnerReport& report, const FolnerTolerances& tol,
                               double alpha);

} // namespace plisslab

#endif
