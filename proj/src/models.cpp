#include "plisslab/models.hpp"

#include <cmath>
#include <stdexcept>

#include "plisslab/linalg.hpp"

namespace plisslab {

namespace {

constexpr double kTwoPi = 6.283185307179586477;

double get_param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    std::initializer_list<const char*> known) {
    for (const auto& [k, v] : params) {
        bool ok = false;
        for (const char* name : known)
            if (k == name) { ok = true; break; }
        if (!ok) throw std::invalid_argument("unknown model parameter: " + k);
    }
}

// Power-iteration splitting for models without an analytic invariant frame:
// push a reference F-axis forward along the backward orbit ending at x, and
// pull a reference E-frame back along the forward orbit starting at x,
// orthonormalizing each step. Under domination both converge to the true
// frames at rate (lambda_E/lambda_F)^iters.
Mat numeric_frame_F(const MapModel& m, const Point& x, const Mat& refF, int iters) {
    // walk back as far as the model allows (the solenoid has no preimage
    // outside f(U)), then push forward again
    std::vector<Point> chain;
    chain.push_back(x);
    for (int k = 0; k < iters; ++k) {
        try {
            chain.push_back(m.backward(chain.back()));
        } catch (const std::exception&) {
            break;
        }
    }
    Mat V = orthonormalize(refF);
    for (int k = static_cast<int>(chain.size()) - 1; k >= 1; --k)
        V = orthonormalize(m.derivative(chain[k]) * V);
    return V;
}

Mat numeric_frame_E(const MapModel& m, const Point& x, const Mat& refE, int iters) {
    std::vector<Point> chain;
    chain.push_back(x);
    for (int k = 0; k < iters; ++k) chain.push_back(m.forward(chain.back()));
    Mat V = orthonormalize(refE);
    for (int k = static_cast<int>(chain.size()) - 1; k >= 1; --k)
        V = orthonormalize(m.inverse_derivative(chain[k]) * V);
    return V;
}

} // namespace

Vec cat2_unstable_direction() {
    Vec v(2);
    v << 1.0, 0.5 * (std::sqrt(5.0) - 1.0);
    v.normalize();
    return v;
}

Vec cat2_stable_direction() {
    Vec v(2);
    v << 1.0, -0.5 * (std::sqrt(5.0) + 1.0);
    v.normalize();
    return v;
}

double cat2_log_expansion() { return std::log(0.5 * (3.0 + std::sqrt(5.0))); }

MapModel make_cat2() {
    MapModel m;
    m.name = "cat2";
    m.manifold = Manifold::torus(2);
    m.dim_E = 1;
    m.dim_F = 1;
    m.analytic_splitting = true;

    Mat A(2, 2), Ainv(2, 2);
    A << 2, 1, 1, 1;
    Ainv << 1, -1, -1, 2;

    const Manifold man = m.manifold;
    m.forward = [man, A](const Point& p) { return Point(man.wrap(Vec(A * p.coords))); };
    m.backward = [man, Ainv](const Point& p) { return Point(man.wrap(Vec(Ainv * p.coords))); };
    m.derivative = [A](const Point&) { return A; };
    m.inverse_derivative = [Ainv](const Point&) { return Ainv; };

    SplitFrames frames;
    frames.E = cat2_stable_direction();
    frames.F = cat2_unstable_direction();
    m.splitting = [frames](const Point&) { return frames; };
    m.in_domain = [](const Point&) { return true; };
    return m;
}

MapModel make_cat3(const std::map<std::string, double>& params) {
    reject_unknown(params, {"omega", "eps"});
    const double omega = get_param(params, "omega", 0.5 * (std::sqrt(5.0) - 1.0));
    const double eps = get_param(params, "eps", 0.0);

    MapModel m;
    m.name = "cat3";
    m.manifold = Manifold::torus(3);
    m.dim_E = 2; // stable line + rotation fiber
    m.dim_F = 1;
    m.analytic_splitting = (eps == 0.0);
    m.params = {{"omega", omega}, {"eps", eps}};

    const Manifold man = m.manifold;
    m.forward = [man, omega, eps](const Point& p) {
        const Vec& c = p.coords;
        Vec q(3);
        q << 2.0 * c[0] + c[1], c[0] + c[1], c[2] + omega + eps * std::sin(kTwoPi * c[0]);
        return Point(man.wrap(q));
    };
    m.backward = [man, omega, eps](const Point& p) {
        const Vec& c = p.coords;
        Vec q(3);
        q[0] = c[0] - c[1];
        q[1] = -c[0] + 2.0 * c[1];
        q[2] = c[2] - omega - eps * std::sin(kTwoPi * q[0]);
        return Point(man.wrap(q));
    };
    m.derivative = [eps](const Point& p) {
        Mat D = Mat::Zero(3, 3);
        D(0, 0) = 2; D(0, 1) = 1;
        D(1, 0) = 1; D(1, 1) = 1;
        D(2, 0) = eps * kTwoPi * std::cos(kTwoPi * p.coords[0]);
        D(2, 2) = 1;
        return D;
    };
    {
        // capture by value; backward/derivative are already set
        auto bwd = m.backward;
        auto der = m.derivative;
        m.inverse_derivative = [bwd, der](const Point& p) {
            return Mat(der(bwd(p)).inverse());
        };
    }

    Mat refF = Mat::Zero(3, 1);
    refF.topRows(2) = cat2_unstable_direction();
    Mat refE = Mat::Zero(3, 2);
    refE.col(0).topRows(2) = cat2_stable_direction();
    refE(2, 1) = 1.0;

    if (eps == 0.0) {
        SplitFrames frames{refE, refF};
        m.splitting = [frames](const Point&) { return frames; };
    } else {
        MapModel core = m; // copies the closures above, not the splitting
        m.splitting = [core, refE, refF](const Point& x) {
            return SplitFrames{numeric_frame_E(core, x, refE, 50),
                               numeric_frame_F(core, x, refF, 50)};
        };
    }
    m.in_domain = [](const Point&) { return true; };
    return m;
}

MapModel make_solenoid(const std::map<std::string, double>& params) {
    reject_unknown(params, {"lambda", "domain_radius", "skew"});
    const double lambda = get_param(params, "lambda", 0.25);
    const double domain_radius = get_param(params, "domain_radius", 0.9);
    // Tiny smooth skew feeding the disc coordinates back into the angle.
    // Pure binary doubling collapses to the dyadic fixed point within ~53
    // double-precision iterations (one mantissa bit is shifted out per step);
    // the disc coordinates retain the angle history, and this term reinjects
    // it, so long orbits stay faithful to the attractor dynamics. The
    // default amplitude sits far below every model tolerance.
    const double skew = get_param(params, "skew", 1e-9);
    if (lambda <= 0.0 || lambda >= 0.5)
        throw std::invalid_argument("solenoid: lambda must lie in (0, 1/2)");

    MapModel m;
    m.name = "solenoid";
    m.manifold = Manifold::solid_torus();
    m.dim_E = 2;
    m.dim_F = 1;
    m.analytic_splitting = false;
    m.params = {{"lambda", lambda}, {"domain_radius", domain_radius}, {"skew", skew}};

    const Manifold man = m.manifold;
    m.forward = [man, lambda, skew](const Point& p) {
        const double th = p.coords[0];
        Vec q(3);
        q << 2.0 * th + skew * std::sin(kTwoPi * (p.coords[1] + p.coords[2])),
            lambda * p.coords[1] + 0.5 * std::cos(kTwoPi * th),
            lambda * p.coords[2] + 0.5 * std::sin(kTwoPi * th);
        return Point(man.wrap(q));
    };
    m.backward = [man, lambda, skew](const Point& p) {
        // two candidate preimage angles; the disc fibers of the two branches
        // are disjoint, so at most one candidate lands in the unit disc.
        // The skew correction is resolved by two fixed-point refinements.
        const double th = p.coords[0];
        double best_r2 = -1.0;
        Vec best(3);
        for (int branch = 0; branch < 2; ++branch) {
            double th0 = 0.5 * th + 0.5 * branch;
            double u = 0.0, v = 0.0;
            for (int it = 0; it < 3; ++it) {
                u = (p.coords[1] - 0.5 * std::cos(kTwoPi * th0)) / lambda;
                v = (p.coords[2] - 0.5 * std::sin(kTwoPi * th0)) / lambda;
                th0 = 0.5 * (th - skew * std::sin(kTwoPi * (u + v))) + 0.5 * branch;
            }
            const double r2 = u * u + v * v;
            if (best_r2 < 0.0 || r2 < best_r2) {
                best_r2 = r2;
                best << th0, u, v;
            }
        }
        if (best_r2 > 1.0 + 1e-9)
            throw std::domain_error("solenoid: point has no preimage in the solid torus");
        return Point(man.wrap(best));
    };
    m.derivative = [lambda, skew](const Point& p) {
        const double th = p.coords[0];
        const double cs = skew * kTwoPi * std::cos(kTwoPi * (p.coords[1] + p.coords[2]));
        Mat D = Mat::Zero(3, 3);
        D(0, 0) = 2.0;
        D(0, 1) = cs;
        D(0, 2) = cs;
        D(1, 0) = -0.5 * kTwoPi * std::sin(kTwoPi * th);
        D(1, 1) = lambda;
        D(2, 0) = 0.5 * kTwoPi * std::cos(kTwoPi * th);
        D(2, 2) = lambda;
        return D;
    };
    {
        auto bwd = m.backward;
        auto der = m.derivative;
        m.inverse_derivative = [bwd, der](const Point& p) {
            return Mat(der(bwd(p)).inverse());
        };
    }

    Mat refF = Mat::Zero(3, 1);
    refF(0, 0) = 1.0; // theta direction
    Mat E = Mat::Zero(3, 2);
    E(1, 0) = 1.0;
    E(2, 1) = 1.0;
    {
        MapModel core = m;
        m.splitting = [core, E, refF](const Point& x) {
            // the disc-plane bundle is exactly Df-invariant; only F needs
            // power iteration
            return SplitFrames{E, numeric_frame_F(core, x, refF, 50)};
        };
    }
    m.in_domain = [domain_radius](const Point& p) {
        const double r2 = p.coords[1] * p.coords[1] + p.coords[2] * p.coords[2];
        return r2 <= domain_radius * domain_radius + 1e-9;
    };
    return m;
}

MapModel make_da2(const std::map<std::string, double>& params) {
    reject_unknown(params, {"eps", "r"});
    const double eps = get_param(params, "eps", 0.25);
    const double r = get_param(params, "r", 0.2);
    if (r <= 0.0 || r >= 0.5) throw std::invalid_argument("da2: bump radius must lie in (0, 1/2)");
    if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("da2: amplitude must lie in [0, 1)");

    MapModel m;
    m.name = "da2";
    m.manifold = Manifold::torus(2);
    m.dim_E = 1;
    m.dim_F = 1;
    m.analytic_splitting = (eps == 0.0);
    m.params = {{"eps", eps}, {"r", r}};

    Mat A(2, 2), Ainv(2, 2);
    A << 2, 1, 1, 1;
    Ainv << 1, -1, -1, 2;
    const Vec vu = cat2_unstable_direction();
    const Manifold man = m.manifold;

    // shear h(q) = q - eps*c(|q|)*(q.vu)*vu supported in the bump ball of
    // radius r around the fixed point 0; c(s) = (1-(s/r)^2)^3
    auto rep = [man](const Vec& q) { return man.shortest_delta(Vec::Zero(2), q); };
    auto shear = [rep, vu, eps, r](const Vec& q) -> Vec {
        const Vec z = rep(q);
        const double s2 = z.squaredNorm() / (r * r);
        if (s2 >= 1.0) return q;
        const double c = std::pow(1.0 - s2, 3);
        return q - (eps * c * z.dot(vu)) * vu;
    };
    auto shear_deriv = [rep, vu, eps, r](const Vec& q) -> Mat {
        const Vec z = rep(q);
        const double s2 = z.squaredNorm() / (r * r);
        if (s2 >= 1.0) return Mat::Identity(2, 2);
        const double one = 1.0 - s2;
        const double c = one * one * one;
        const Vec grad_c = (-6.0 / (r * r)) * one * one * z;
        const Vec grad_w = c * vu + z.dot(vu) * grad_c;
        return Mat(Mat::Identity(2, 2) - eps * vu * grad_w.transpose());
    };

    m.forward = [man, A, shear](const Point& p) {
        return Point(man.wrap(shear(Vec(A * p.coords))));
    };
    m.backward = [man, Ainv, shear, shear_deriv](const Point& p) {
        // invert the shear by Newton iteration in the bump chart
        const Vec target = man.shortest_delta(Vec::Zero(2), p.coords);
        Vec q = target;
        for (int it = 0; it < 60; ++it) {
            const Vec res = shear(q) - target;
            if (res.norm() < 1e-14) break;
            q -= shear_deriv(q).partialPivLu().solve(res);
        }
        const Vec corrected = p.coords + (q - target);
        return Point(man.wrap(Vec(Ainv * corrected)));
    };
    m.derivative = [A, shear_deriv](const Point& p) {
        return Mat(shear_deriv(A * p.coords) * A);
    };
    {
        auto bwd = m.backward;
        auto der = m.derivative;
        m.inverse_derivative = [bwd, der](const Point& p) {
            return Mat(der(bwd(p)).inverse());
        };
    }

    const Mat refF = vu;
    const Mat refE = cat2_stable_direction();
    if (eps == 0.0) {
        SplitFrames frames{refE, refF};
        m.splitting = [frames](const Point&) { return frames; };
    } else {
        MapModel core = m;
        m.splitting = [core, refE, refF](const Point& x) {
            return SplitFrames{numeric_frame_E(core, x, refE, 50),
                               numeric_frame_F(core, x, refF, 50)};
        };
    }
    m.in_domain = [](const Point&) { return true; };
    return m;
}

MapModel make_model(const std::string& name, const std::map<std::string, double>& params) {
    if (name == "cat2") {
        if (!params.empty()) throw std::invalid_argument("cat2 takes no parameters");
        return make_cat2();
    }
    if (name == "cat3") return make_cat3(params);
    if (name == "solenoid") return make_solenoid(params);
    if (name == "da2") return make_da2(params);
    throw std::invalid_argument("unknown model: " + name);
}

} // namespace plisslab
