#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "detail.hpp"
#include "errors.hpp"

namespace ellipsum {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Asymmetry below this (relative to the largest entry) is silently
/// symmetrized; above it construction fails.
inline constexpr double kSymmetryRelTol = 1e-10;
inline constexpr double kUnitNormTol = 1e-9;

/// Unit vector used to parameterize boundaries and outer bounds.
class Direction {
public:
    explicit Direction(Vector v) : v_(std::move(v)) {
        require(v_.size() >= 1, ErrorCode::dimension_mismatch, "direction must have dimension >= 1");
        require(std::abs(v_.norm() - 1.0) <= kUnitNormTol, ErrorCode::validation_error,
                "direction is not unit length");
    }

    static Direction normalized(const Vector& v) {
        double n = v.norm();
        require(n > 0.0 && std::isfinite(n), ErrorCode::validation_error,
                "cannot normalize a zero or non-finite vector");
        return Direction(Vector(v / n));
    }

    const Vector& vec() const noexcept { return v_; }
    Eigen::Index dim() const noexcept { return v_.size(); }
    double operator[](Eigen::Index i) const { return v_(i); }

private:
    Vector v_;
};

/**
 * @brief Solid ellipsoid { x | (x-c)^T Q^{-1} (x-c) <= 1 } with symmetric
 * positive definite shape matrix Q and center c.
 *
 * The shape matrix is validated on construction: near-symmetric input is
 * symmetrized, genuinely asymmetric input is rejected, and positive
 * definiteness is established through a Cholesky factorization which is kept
 * for later solves. Instances are immutable.
 */
class Ellipsoid {
public:
    Ellipsoid(Matrix shape, Vector center)
        : shape_(std::move(shape)), center_(std::move(center)) {
        require(shape_.rows() >= 1, ErrorCode::dimension_mismatch, "shape matrix must be at least 1x1");
        require(shape_.rows() == shape_.cols(), ErrorCode::dimension_mismatch, "shape matrix must be square");
        require(center_.size() == shape_.rows(), ErrorCode::dimension_mismatch,
                "center length must match shape dimension");
        require(shape_.allFinite() && center_.allFinite(), ErrorCode::validation_error,
                "ellipsoid entries must be finite");
        double asym = detail::max_asymmetry(shape_);
        require(asym <= kSymmetryRelTol * std::max(detail::max_abs(shape_), 1e-300),
                ErrorCode::non_symmetric, "shape matrix is not symmetric");
        shape_ = detail::symmetrize(shape_);
        llt_.compute(shape_);
        require(llt_.info() == Eigen::Success, ErrorCode::not_positive_definite,
                "shape matrix is not positive definite");
    }

    explicit Ellipsoid(const Matrix& shape) : Ellipsoid(shape, Vector::Zero(shape.rows())) {}

    const Matrix& shape() const noexcept { return shape_; }
    const Vector& center() const noexcept { return center_; }
    Eigen::Index dim() const noexcept { return shape_.rows(); }
    double trace() const { return shape_.trace(); }

    /// Cholesky factorization of the shape matrix.
    const Eigen::LLT<Matrix>& factorization() const noexcept { return llt_; }

private:
    Matrix shape_;
    Vector center_;
    Eigen::LLT<Matrix> llt_;
};

inline Ellipsoid make_ellipsoid(Matrix shape, Vector center) {
    return Ellipsoid(std::move(shape), std::move(center));
}

inline void check_same_dim(const Ellipsoid& e, const Direction& ell) {
    require(e.dim() == ell.dim(), ErrorCode::dimension_mismatch,
            "ellipsoid and direction dimensions differ");
}

/// Largest projection of the ellipsoid onto ell: <ell,c> + sqrt(ell^T Q ell).
inline double support(const Ellipsoid& e, const Direction& ell) {
    check_same_dim(e, ell);
    const Vector& l = ell.vec();
    return l.dot(e.center()) + std::sqrt(l.dot(e.shape() * l));
}

/// The boundary point where the supporting hyperplane with normal ell touches:
/// c + Q ell / sqrt(ell^T Q ell).
inline Vector support_point(const Ellipsoid& e, const Direction& ell) {
    check_same_dim(e, ell);
    const Vector& l = ell.vec();
    Vector ql = e.shape() * l;
    return e.center() + ql / std::sqrt(l.dot(ql));
}

/// Image of the ellipsoid under x -> M x + b: shape M Q M^T, center M c + b.
/// Fails with rank_deficient when M flattens the ellipsoid.
inline Ellipsoid affine_image(const Ellipsoid& e, const Matrix& m, const Vector& offset) {
    require(m.cols() == e.dim(), ErrorCode::dimension_mismatch,
            "map column count must match ellipsoid dimension");
    require(offset.size() == m.rows(), ErrorCode::dimension_mismatch,
            "offset length must match map row count");
    Matrix image = detail::symmetrize(m * e.shape() * m.transpose());
    try {
        return Ellipsoid(std::move(image), Vector(m * e.center() + offset));
    } catch (const Error& err) {
        if (err.code() == ErrorCode::not_positive_definite)
            fail(ErrorCode::rank_deficient, "affine image is degenerate (map not full row rank)");
        throw;
    }
}

inline Ellipsoid affine_image(const Ellipsoid& e, const Matrix& m) {
    return affine_image(e, m, Vector::Zero(m.rows()));
}

/// Membership test (x-c)^T Q^{-1} (x-c) <= 1 + tol, via a factorized solve.
inline bool contains_point(const Ellipsoid& e, const Vector& x, double tol = 1e-12) {
    require(x.size() == e.dim(), ErrorCode::dimension_mismatch,
            "point dimension must match ellipsoid dimension");
    Vector r = x - e.center();
    return r.dot(e.factorization().solve(r)) <= 1.0 + tol;
}

} // namespace ellipsum
