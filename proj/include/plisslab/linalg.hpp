#ifndef PLISSLAB_LINALG_HPP
#define PLISSLAB_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>

namespace plisslab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Mini-norm (co-norm) m(L) = inf_{|v|=1} |Lv|, the smallest singular value.
/// Accepts any non-empty matrix; rank-deficient input returns 0.
inline double mini_norm(const Mat& L) {
    if (L.size() == 0)
        throw std::invalid_argument("mini_norm: empty matrix");
    if (L.cols() == 1) return L.col(0).norm();
    if (L.rows() == 2 && L.cols() == 2) {
        // closed form via eigenvalues of L^T L
        const double a = L.col(0).squaredNorm();
        const double b = L.col(0).dot(L.col(1));
        const double c = L.col(1).squaredNorm();
        const double tr = a + c;
        const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
        return std::sqrt(std::max(0.0, 0.5 * (tr - disc)));
    }
    Eigen::JacobiSVD<Mat> svd(L);
    return svd.singularValues().tail(1)(0);
}

/// Operator norm |L| = largest singular value.
inline double op_norm(const Mat& L) {
    if (L.size() == 0)
        throw std::invalid_argument("op_norm: empty matrix");
    if (L.cols() == 1) return L.col(0).norm();
    if (L.cols() == 2) {
        const double a = L.col(0).squaredNorm();
        const double b = L.col(0).dot(L.col(1));
        const double c = L.col(1).squaredNorm();
        const double tr = a + c;
        const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
        return std::sqrt(std::max(0.0, 0.5 * (tr + disc)));
    }
    Eigen::JacobiSVD<Mat> svd(L);
    return svd.singularValues()(0);
}

/// k-volume expansion of L restricted to span(V): sqrt(det((LV)^T (LV))).
/// V must have orthonormal columns for the Jacobian interpretation.
inline double jacobian_on_subspace(const Mat& L, const Mat& V) {
    if (L.size() == 0 || V.size() == 0)
        throw std::invalid_argument("jacobian_on_subspace: empty input");
    if (L.cols() != V.rows())
        throw std::invalid_argument("jacobian_on_subspace: shape mismatch");
    const Mat LV = L * V;
    if (V.cols() == 1) return LV.col(0).norm();
    const Mat G = LV.transpose() * LV;
    return std::sqrt(std::max(0.0, G.determinant()));
}

/// Gram-Schmidt orthonormalization of the columns (thin QR with the sign of
/// the R diagonal fixed, so results are deterministic).
inline Mat orthonormalize(const Mat& M) {
    Eigen::HouseholderQR<Mat> qr(M);
    Mat Q = qr.householderQ() * Mat::Identity(M.rows(), M.cols());
    const Mat R = qr.matrixQR().topLeftCorner(M.cols(), M.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
    return Q;
}

} // namespace plisslab

#endif
