#ifndef PLISSLAB_MANIFOLD_HPP
#define PLISSLAB_MANIFOLD_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace plisslab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A point on a flat model manifold, stored as raw chart coordinates.
/// Periodic coordinates are kept reduced to [0,1) by the owning manifold's
/// wrap(); local computations (disk polylines) may hold unwrapped copies.
struct Point {
    Vec coords;

    Point() = default;
    explicit Point(Vec c) : coords(std::move(c)) {}
    Point(std::initializer_list<double> c) : coords(Eigen::Map<const Vec>(c.begin(), static_cast<Eigen::Index>(c.size()))) {}

    int dim() const { return static_cast<int>(coords.size()); }
};

/// Flat model manifolds: the torus [0,1)^d with the product metric, or the
/// solid torus S^1 x D^2 with coordinates (theta, x, y), theta periodic with
/// circumference 1 and (x,y) Euclidean on the closed unit disc.
class Manifold {
public:
    enum class Kind { Torus, SolidTorus };

    Manifold() : kind_(Kind::Torus), dim_(2) {}
    Manifold(Kind k, int dim) : kind_(k), dim_(dim) {
        if (k == Kind::SolidTorus && dim != 3)
            throw std::invalid_argument("solid torus is 3-dimensional");
        if (dim < 1) throw std::invalid_argument("manifold dimension must be >= 1");
    }

    static Manifold torus(int d) { return Manifold(Kind::Torus, d); }
    static Manifold solid_torus() { return Manifold(Kind::SolidTorus, 3); }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool periodic(int axis) const { return kind_ == Kind::Torus || axis == 0; }

    /// Reduce periodic coordinates to [0,1).
    Vec wrap(const Vec& v) const {
        check_dim(v);
        Vec w = v;
        for (int i = 0; i < dim_; ++i)
            if (periodic(i)) {
                w[i] = w[i] - std::floor(w[i]);
                if (w[i] >= 1.0) w[i] = 0.0; // guards w[i] == 1.0 after rounding
            }
        return w;
    }

    Point wrap(const Point& p) const { return Point(wrap(p.coords)); }

    /// Shortest displacement q - p, taking the wraparound representative on
    /// periodic axes. |delta[i]| <= 1/2 there.
    Vec shortest_delta(const Vec& p, const Vec& q) const {
        check_dim(p);
        check_dim(q);
        Vec d = q - p;
        for (int i = 0; i < dim_; ++i)
            if (periodic(i)) {
                d[i] -= std::round(d[i]);
            }
        return d;
    }

    double distance(const Point& p, const Point& q) const {
        return shortest_delta(p.coords, q.coords).norm();
    }

    /// True if the point lies in the chart domain (disc constraint for the
    /// solid torus, tolerance for roundoff).
    bool contains(const Point& p, double tol = 1e-9) const {
        if (p.dim() != dim_) return false;
        if (kind_ == Kind::SolidTorus) {
            const double r2 = p.coords[1] * p.coords[1] + p.coords[2] * p.coords[2];
            return r2 <= 1.0 + tol;
        }
        return true;
    }

    std::string name() const {
        if (kind_ == Kind::SolidTorus) return "solid_torus";
        return "torus" + std::to_string(dim_);
    }

    bool operator==(const Manifold& o) const { return kind_ == o.kind_ && dim_ == o.dim_; }

private:
    void check_dim(const Vec& v) const {
        if (static_cast<int>(v.size()) != dim_)
            throw std::invalid_argument("manifold dimension mismatch: expected " +
                                        std::to_string(dim_) + ", got " + std::to_string(v.size()));
    }

    Kind kind_;
    int dim_;
};

/// Riemannian distance between two points on the same manifold.
inline double manifold_distance(const Manifold& m, const Point& p, const Point& q) {
    return m.distance(p, q);
}

} // namespace plisslab

#endif
