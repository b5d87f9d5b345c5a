#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plisslab/cocycle.hpp"
#include "plisslab/disk.hpp"
#include "plisslab/models.hpp"
#include "plisslab/orbit.hpp"
#include "plisslab/rng.hpp"
#include "plisslab/timeset.hpp"

using namespace plisslab;

TEST_CASE("in_cone: pure F, pure E, and the mixed example") {
    const MapModel m = make_cat2();
    const Point x{0.3, 0.8};
    const SplitFrames fr = m.splitting(x);
    CHECK(in_cone(m, x, fr.F.col(0), 0.1));
    CHECK(!in_cone(m, x, fr.E.col(0), 10.0));
    const Vec v = cat2_unstable_direction() + 0.1 * cat2_stable_direction();
    CHECK(in_cone(m, x, v, 0.2));
    CHECK(!in_cone(m, x, v, 0.05));
}

TEST_CASE("cone invariance: cat2 passes, identity-like map fails with ratio 2") {
    const MapModel cat = make_cat2();
    const ConeCheckResult ok = cone_invariance_check(cat, 0.3, 2000);
    CHECK(ok.pass);
    CHECK(ok.worst_ratio < 1.0);

    // a rotation-free isometric model: cat2 frames with the identity map
    MapModel id = make_cat2();
    id.name = "identity";
    id.forward = [man = id.manifold](const Point& p) { return man.wrap(p); };
    id.backward = id.forward;
    id.derivative = [](const Point&) { return Mat::Identity(2, 2); };
    id.inverse_derivative = id.derivative;
    const ConeCheckResult bad = cone_invariance_check(id, 0.3, 200);
    CHECK(!bad.pass);
    CHECK(bad.worst_ratio == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("cone invariance: da2 at theta = 0.3") {
    const MapModel da = make_da2();
    const ConeCheckResult res = cone_invariance_check(da, 0.3, 20000);
    CHECK(res.pass);
}

TEST_CASE("cone invariance: cat3 analytic splitting") {
    const MapModel m = make_cat3();
    CHECK(cone_invariance_check(m, 0.3, 2000).pass);
    // with rotation coupling the splitting is numeric but still certified
    const MapModel coupled = make_cat3({{"eps", 0.1}});
    CHECK(cone_invariance_check(coupled, 0.3, 500).pass);
}

TEST_CASE("cone nesting under iteration") {
    // tangents of the iterated disk contract toward F: after k steps they fit
    // in the halved cone (down to the numerical floor)
    const MapModel m = make_cat2();
    const double theta0 = 0.3;
    const FDisk d = make_fdisk(m, Point{0.15, 0.85}, 0.05, 128, theta0 / 2.0,
                               [](double t) {
                                   Vec g(1);
                                   g[0] = 0.12 * t; // slope inside the theta0/2 cone
                                   return g;
                               });
    for (int k = 1; k <= 4; ++k) {
        const double theta_k = std::max(theta0 / std::pow(2.0, k), 1e-6);
        const IteratedDisk it = iterate_disk(m, d, k, IterateOptions{5e-3, theta_k, 64});
        CHECK(it.steps == k); // would have thrown on a cone violation
    }
}

TEST_CASE("fdisk construction: weights sum to the area, graph validation") {
    const MapModel m = make_cat2();
    const FDisk d = make_fdisk(m, Point{0.5, 0.5}, 0.1, 64, 0.2);
    double mass = 0.0;
    for (long i = 0; i < d.cell_count(); ++i) mass += d.sample_weight(i);
    CHECK(mass == doctest::Approx(d.total_mass()).epsilon(1e-12));
    CHECK(d.total_mass() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d.radius == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d.lipschitz_bound <= 1e-12);

    // a graph with slope above theta1 is rejected
    const auto steep = [](double t) {
        Vec g(1);
        g[0] = 0.5 * t;
        return g;
    };
    CHECK_THROWS_AS(make_fdisk(m, Point{0.5, 0.5}, 0.1, 64, 0.2, steep), std::invalid_argument);
    // and accepted under a generous bound
    const FDisk curved = make_fdisk(m, Point{0.5, 0.5}, 0.1, 64, 0.6, steep);
    CHECK(curved.lipschitz_bound == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("iterate_disk: cat2 segment scales by the eigenvalue") {
    const MapModel m = make_cat2();
    const FDisk d = make_fdisk(m, Point{0.5, 0.5}, 0.05, 64, 0.2);
    const IteratedDisk it = iterate_disk(m, d, 1, IterateOptions{0.01, 0.3, 64});
    const double lam = 0.5 * (3.0 + std::sqrt(5.0));
    CHECK(it.image_mass(m.manifold) == doctest::Approx(0.1 * lam).epsilon(1e-10));
    CHECK(it.jac_weighted_original() == doctest::Approx(0.1 * lam).epsilon(1e-10));
    const IteratedDisk it0 = iterate_disk(m, d, 0);
    CHECK(it0.image_mass(m.manifold) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("iterate_disk: solenoid arc, weight conservation and sub-disk cut") {
    const MapModel m = make_solenoid();
    // theta-circle arc through the attractor region
    const FDisk d = make_fdisk(m, Point{0.25, 0.0, 0.0}, 0.25, 512, 8.0);
    IterateOptions opts;
    opts.max_pitch = 2e-4;
    const IteratedDisk it = iterate_disk(m, d, 3, opts);
    const double ratio = it.image_mass(m.manifold) / it.jac_weighted_original();
    CHECK(std::abs(ratio - 1.0) < 1e-6);

    const double delta0 = 0.6;
    const auto pieces = cut_into_fdisks(m, it, delta0, 8.0);
    double total = 0.0;
    for (const FDisk& piece : pieces) {
        CHECK(piece.radius <= delta0 + 1e-9);
        total += piece.total_mass();
    }
    CHECK(total == doctest::Approx(it.image_mass(m.manifold)).epsilon(1e-9));
    CHECK(pieces.size() <= 1 + static_cast<std::size_t>(it.image_mass(m.manifold) / (2 * delta0)) + 1);
}

TEST_CASE("distortion_check: cat2 affine equality, solenoid and da2 pass") {
    const MapModel cat = make_cat2();
    const FDisk dc = make_fdisk(cat, Point{0.4, 0.7}, 0.1, 256, 0.2);
    for (double eps : {0.05, 0.2}) {
        const DistortionResult r = distortion_check(cat, dc, 8, eps, 0.05);
        CHECK(r.pass);
        CHECK(std::abs(r.mid - r.image_mass) <= 1e-6 * std::max(1.0, r.image_mass));
    }

    const MapModel sol = make_solenoid();
    const FDisk ds = make_fdisk(sol, Point{0.1, 0.05, -0.02}, 0.2, 256, 8.0);
    const DistortionResult rs = distortion_check(sol, ds, 10, 0.1, 0.01);
    CHECK(rs.pass);

    const MapModel da = make_da2();
    Rng rng(51, 0);
    int passes = 0, total = 0;
    for (int k = 0; k < 20; ++k) {
        const Point c = random_domain_point(da, rng);
        const FDisk dd = make_fdisk(da, c, 0.1, 256, 0.3);
        const DistortionResult r = distortion_check(da, dd, 15, 0.05, 0.005);
        ++total;
        if (r.pass) ++passes;
    }
    CHECK(passes == total);
}

TEST_CASE("distortion_check: empty Gamma is an error") {
    const MapModel cat = make_cat2();
    const FDisk dc = make_fdisk(cat, Point{0.4, 0.7}, 0.1, 64, 0.2);
    CHECK_THROWS_WITH_AS(distortion_check(cat, dc, 8, 0.05, 1e-16),
                         doctest::Contains("shrink delta_eps"), std::runtime_error);
}

TEST_CASE("pliss_iterate_check: cat2 exact contraction, C = 1") {
    const MapModel m = make_cat2();
    const FDisk d = make_fdisk(m, Point{0.2, 0.6}, 0.12, 256, 0.2);
    const PlissIterateResult r = pliss_iterate_check(m, d, 12, 0.9, 0.1);
    CHECK(r.pass);
    CHECK(r.max_violation <= 1.0 + 1e-9);
    CHECK(r.distortion_ratio == doctest::Approx(1.0).epsilon(1e-6));
    // contraction at the exact rate: a above log lambda_1 must fail
    const PlissIterateResult bad = pliss_iterate_check(m, d, 12, 1.1, 0.1);
    CHECK(!bad.pass);
}

TEST_CASE("pliss_iterate_check: solenoid passes at a = 0.5 with moderate C") {
    const MapModel m = make_solenoid();
    const FDisk d = make_fdisk(m, Point{0.7, 0.02, 0.01}, 0.3, 512, 8.0);
    const PlissIterateResult r = pliss_iterate_check(m, d, 20, 0.5, 0.25);
    CHECK(r.pass);
    CHECK(r.distortion_ratio < 1.5);
}

TEST_CASE("pliss_iterate_check: undersized disk is an error") {
    const MapModel m = make_cat2();
    const FDisk d = make_fdisk(m, Point{0.2, 0.6}, 0.01, 64, 0.2);
    CHECK_THROWS_WITH_AS(pliss_iterate_check(m, d, 2, 0.5, 0.5),
                         doctest::Contains("smaller than delta0"), std::runtime_error);
}

TEST_CASE("dynamical balls: nesting, n = 0 metric ball, cat2 affine size") {
    const MapModel m = make_cat2();
    const FDisk d = make_fdisk(m, Point{0.3, 0.3}, 0.45, 4096, 0.2);
    const double delta0 = 0.09;
    const double anchor = d.s_center;

    const DynamicalBall b0 = dynamical_ball(m, d, anchor, 0, delta0 / 3.0);
    CHECK(b0.base_mass() == doctest::Approx(2.0 * delta0 / 3.0).epsilon(1e-12));

    const DynamicalBall bs = dynamical_ball_at_sample(m, d, d.cell_count() / 2, 3, delta0 / 3.0);
    CHECK(bs.anchor_index == d.cell_count() / 2);
    CHECK(bs.base_mass() > 0.0);
    CHECK_THROWS_AS(dynamical_ball_at_sample(m, d, d.cell_count() + 7, 3, delta0),
                    std::invalid_argument);

    for (long n : {4L, 7L, 10L}) {
        const BallTriple t = dynamical_ball_triple(m, d, anchor, n, delta0);
        CHECK(t.plain.lo >= t.hat.lo - 1e-12);
        CHECK(t.plain.hi <= t.hat.hi + 1e-12);
        CHECK(t.hat.lo >= t.hathat.lo - 1e-12);
        CHECK(t.hat.hi <= t.hathat.hi + 1e-12);
        const double lam = 0.5 * (3.0 + std::sqrt(5.0));
        const double expect = 2.0 * (delta0 / 3.0) / std::pow(lam, n);
        CHECK(t.plain.base_mass() == doctest::Approx(expect).epsilon(1e-9));
        // member set matches the interval on the sample grid
        for (int idx : t.plain.member_indices) {
            CHECK(d.sample_param(idx) > t.plain.lo);
            CHECK(d.sample_param(idx) < t.plain.hi);
        }
    }
}

TEST_CASE("double_size_ratio: exactly 3 for the affine model, ~3 at n = 0") {
    const MapModel m = make_cat2();
    const FDisk d = make_fdisk(m, Point{0.55, 0.15}, 0.45, 512, 0.2);
    std::vector<std::pair<double, long>> anchors;
    for (long n : {0L, 3L, 6L, 9L}) anchors.emplace_back(d.s_center, n);
    const DoubleSizeResult r = double_size_ratio(m, d, anchors, 0.08);
    REQUIRE(r.items.size() == 4);
    for (const auto& item : r.items) CHECK(item.ratio == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(r.max_ratio == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("double_size_ratio: solenoid stays below 4 and stabilizes") {
    const MapModel m = make_solenoid();
    const FDisk d = make_fdisk(m, Point{0.45, -0.03, 0.04}, 1.5, 2048, 8.0);
    std::vector<std::pair<double, long>> anchors;
    for (long n : {2L, 4L, 6L, 8L, 10L}) anchors.emplace_back(d.s_center, n);
    const DoubleSizeResult r = double_size_ratio(m, d, anchors, 0.3);
    CHECK(r.max_ratio <= 4.0);
    // the ratio does not grow along n at the tail
    REQUIRE(r.items.size() >= 3);
    const double last = r.items.back().ratio;
    const double prev = r.items[r.items.size() - 2].ratio;
    CHECK(last <= std::max(prev, r.max_ratio) + 0.2);
}

TEST_CASE("Lemma-style containment for nested dynamical balls (n1 < n2)") {
    const MapModel m = make_cat2();
    const FDisk d = make_fdisk(m, Point{0.42, 0.58}, 0.45, 1024, 0.2);
    const double delta0 = 0.06;
    Rng rng(52, 0);
    int tested = 0;
    for (int trial = 0; trial < 200 && tested < 60; ++trial) {
        const double s1 = rng.uniform(0.3, 0.6) * d.total_mass();
        const double s2 = rng.uniform(0.3, 0.6) * d.total_mass();
        const long n1 = 2 + static_cast<long>(rng.below(4));
        const long n2 = n1 + 1 + static_cast<long>(rng.below(4));
        const BallTriple t1 = dynamical_ball_triple(m, d, s1, n1, delta0);
        const BallTriple t2 = dynamical_ball_triple(m, d, s2, n2, delta0);
        const bool meet = t1.plain.lo < t2.hat.hi && t2.hat.lo < t1.plain.hi;
        if (!meet) continue;
        ++tested;
        CHECK(t2.plain.lo >= t1.hathat.lo - 1e-12);
        CHECK(t2.plain.hi <= t1.hathat.hi + 1e-12);
    }
    CHECK(tested > 0);
}

TEST_CASE("vitali_select: greedy certificate on synthetic interval balls") {
    // duplicates: exactly one of two identical balls is accepted
    std::vector<VitaliBall> dup{{0.2, 0.4, 0.1, 0.5, 3}, {0.2, 0.4, 0.1, 0.5, 3}};
    const VitaliSelection sd = vitali_select(dup);
    CHECK(sd.accepted.size() == 1);
    REQUIRE(sd.rejected_witness.size() == 1);
    CHECK(sd.rejected_witness[0].second == sd.accepted[0]);
    CHECK(vitali_verify(dup, sd));

    // pairwise disjoint hats: everything is accepted
    std::vector<VitaliBall> disjoint;
    for (int i = 0; i < 10; ++i) {
        const double lo = 0.1 * i + 0.02;
        disjoint.push_back({lo, lo + 0.03, lo - 0.01, lo + 0.04, i});
    }
    const VitaliSelection sall = vitali_select(disjoint);
    CHECK(sall.accepted.size() == disjoint.size());
    CHECK(vitali_verify(disjoint, sall));

    // 1000 random interval balls, exhaustively re-checked
    Rng rng(53, 0);
    std::vector<VitaliBall> balls;
    for (int i = 0; i < 1000; ++i) {
        VitaliBall b;
        const double c = rng.uniform(0.0, 10.0);
        const long n = static_cast<long>(rng.below(12));
        const double r = 0.3 * std::pow(0.7, static_cast<double>(n));
        b.lo = c - r / 3.0;
        b.hi = c + r / 3.0;
        b.hat_lo = c - 2.0 * r / 3.0;
        b.hat_hi = c + 2.0 * r / 3.0;
        b.n = n;
        balls.push_back(b);
    }
    const VitaliSelection sel = vitali_select(balls);
    CHECK(vitali_verify(balls, sel));
    CHECK(sel.accepted.size() + sel.rejected_witness.size() == balls.size());
}

TEST_CASE("dynamical density: da2 ratios near 1 along Pliss times") {
    const MapModel da = make_da2();
    const FDisk d = make_fdisk(da, Point{0.37, 0.66}, 0.3, 1024, 0.3);
    const double app = 0.3;
    auto in_gamma = [&](const Point& p) {
        const RestrictedCocycle rc = restricted_cocycle(da, p, 600);
        return limsup_prefix_average(rc.log_scalar) > app;
    };
    Rng rng(54, 0);
    int good = 0, anchors = 0;
    for (int k = 0; k < 12; ++k) {
        const double s = rng.uniform(0.35, 0.65) * d.total_mass();
        const Point xp = da.manifold.wrap(Point(d.point_at(s)));
        if (!in_gamma(xp)) continue;
        ++anchors;
        const RestrictedCocycle rc = restricted_cocycle(da, xp, 20);
        const TimeSet P = pliss_times(rc.log_scalar, 0.1);
        double last_ratio = 0.0;
        for (long n : {4L, 8L, 12L}) {
            if (!P.contains(n)) continue;
            const DynamicalBall b = dynamical_ball(da, d, s, n, 0.03);
            double mg = 0.0, mt = 0.0;
            for (int c = 0; c < 64; ++c) {
                const double s0 = b.lo + (b.hi - b.lo) * c / 64.0;
                const double s1 = b.lo + (b.hi - b.lo) * (c + 1) / 64.0;
                const Point mid = da.manifold.wrap(Point(d.point_at(0.5 * (s0 + s1))));
                mt += s1 - s0;
                if (in_gamma(mid)) mg += s1 - s0;
            }
            last_ratio = mg / mt;
        }
        if (last_ratio >= 0.95) ++good;
    }
    REQUIRE(anchors > 0);
    CHECK(static_cast<double>(good) >= 0.9 * static_cast<double>(anchors));
}

TEST_CASE("calibrate: produces certified constants for every model") {
    for (const auto& name : {"cat2", "da2"}) {
        const Calibration cal = calibrate(make_model(name), 0.05);
        CHECK(cal.theta0 > 0.0);
        CHECK(cal.delta0 > 0.0);
        CHECK(cal.theta1 == doctest::Approx(0.5 * cal.theta0));
    }
    // the solenoid's disc bundle is exactly invariant, so the cone field
    // around the converged splitting certifies at every ladder aperture
    const Calibration sol = calibrate(make_solenoid(), 0.1);
    CHECK(sol.theta0 > 0.0);
    CHECK(cone_invariance_check(make_solenoid(), sol.theta0, 2000).pass);
}
