#pragma once

#include <Eigen/Eigenvalues>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "minkowski.hpp"

namespace ellipsum {

/**
 * @brief Positive pair coefficients p_ij over the index set
 * { (i,j) | 0 <= i < j < k } that combine term shape matrices into an outer
 * bound of the geometric sum.
 *
 * Stored densely in lexicographic pair order; construction requires exactly
 * k(k-1)/2 strictly positive entries.
 */
class PairWeights {
public:
    PairWeights(std::size_t term_count, std::vector<double> values)
        : k_(term_count), values_(std::move(values)) {
        require(values_.size() == pair_count_for(k_), ErrorCode::incomplete_weights,
                "pair weights must cover every index pair (i < j)");
        for (double v : values_)
            require(v > 0.0 && std::isfinite(v), ErrorCode::validation_error,
                    "pair weights must be positive and finite");
    }

    static PairWeights constant(std::size_t term_count, double value) {
        return PairWeights(term_count, std::vector<double>(pair_count_for(term_count), value));
    }

    static std::size_t pair_count_for(std::size_t k) { return k * (k - 1) / 2; }

    std::size_t term_count() const noexcept { return k_; }
    std::size_t pair_count() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Flat index of pair (i, j), 0 <= i < j < k, lexicographic order.
    std::size_t pair_index(std::size_t i, std::size_t j) const {
        require(i < j && j < k_, ErrorCode::validation_error, "pair index out of range");
        return i * k_ - i * (i + 1) / 2 + (j - i - 1);
    }

    double operator()(std::size_t i, std::size_t j) const { return values_[pair_index(i, j)]; }

private:
    std::size_t k_;
    std::vector<double> values_;
};

/// Outcome of checking a regularizer (or a whole bound) against the sum.
struct FeasibilityReport {
    bool pd_ok = false;        ///< combined shape matrix is positive definite
    bool support_ok = false;   ///< support dominance holds on the grid
    std::optional<bool> kernel_ok; ///< direction lies in ker(Q0); tangent bases only
    int grid_count = 0;
    double min_margin = std::numeric_limits<double>::quiet_NaN();
    double trace_reduction = 0.0;  ///< trace(Q0); negative means a tighter bound

    bool feasible() const { return pd_ok && support_ok && kernel_ok.value_or(true); }
};

/// Symmetric correction term together with the certificate that was
/// established for it.
struct RegularizerMatrix {
    Matrix q0;
    FeasibilityReport certificate;
};

/// Outer bound that touches the exact boundary at `tangency_point`.
struct TangentBound {
    Ellipsoid ellipsoid;
    Vector tangency_point;
    Direction direction;
};

struct FamilyBound {
    Ellipsoid ellipsoid;
    FeasibilityReport feasibility;
};

namespace detail_bounds {

/// Support-dominance margins of a symmetric candidate shape against the sum,
/// evaluated on centered shapes. margin(l) = sqrt(l^T Q l) - sum_i sqrt(l^T Q_i l);
/// a non-PD quadratic form counts as zero support.
inline std::vector<double> shape_margins(const Matrix& q, const EllipsoidSum& s,
                                         const DirectionGrid& grid) {
    std::vector<double> margins(grid.size(), 0.0);
    detail::parallel_for(grid.size(), [&](std::size_t i) {
        const Vector& l = grid[i].vec();
        double qf = l.dot(q * l);
        double lhs = qf > 0.0 ? std::sqrt(qf) : 0.0;
        double rhs = 0.0;
        for (const auto& e : s.terms()) rhs += std::sqrt(l.dot(e.shape() * l));
        margins[i] = lhs - rhs;
    });
    return margins;
}

inline bool is_pd(const Matrix& m) {
    Eigen::LLT<Matrix> llt(detail::symmetrize(m));
    return llt.info() == Eigen::Success;
}

inline Matrix checked_symmetric(const Matrix& q0, Eigen::Index dim) {
    require(q0.rows() == dim && q0.cols() == dim, ErrorCode::dimension_mismatch,
            "regularizer dimensions must match the sum");
    require(q0.allFinite(), ErrorCode::validation_error, "regularizer entries must be finite");
    require(detail::max_asymmetry(q0) <= kSymmetryRelTol * std::max(detail::max_abs(q0), 1e-300),
            ErrorCode::non_symmetric, "regularizer must be symmetric");
    return detail::symmetrize(q0);
}

} // namespace detail_bounds

/// Pairwise combination Q_u = sum_i Q_i + sum_{i<j} (p_ij Q_i + Q_j / p_ij).
inline Matrix pair_combination(const EllipsoidSum& s, const PairWeights& p) {
    require(p.term_count() == s.size(), ErrorCode::incomplete_weights,
            "weights sized for a different number of terms");
    const auto& terms = s.terms();
    Matrix q = Matrix::Zero(s.dim(), s.dim());
    for (const auto& e : terms) q += e.shape();
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j) {
            double pij = p(i, j);
            q += pij * terms[i].shape() + terms[j].shape() / pij;
        }
    return q;
}

/// Tangent-family shape Q_l = (sum_i sqrt(l^T Q_i l)) (sum_i Q_i / sqrt(l^T Q_i l)).
inline Matrix tangent_shape(const EllipsoidSum& s, const Direction& ell) {
    check_same_dim(s, ell);
    const Vector& l = ell.vec();
    double scale = 0.0;
    Matrix mix = Matrix::Zero(s.dim(), s.dim());
    for (const auto& e : s.terms()) {
        double root = std::sqrt(l.dot(e.shape() * l));
        scale += root;
        mix += e.shape() / root;
    }
    return scale * mix;
}

/**
 * @brief Checks the regularizer conditions for an arbitrary symmetric base
 * shape: Q0 + base positive definite, and support dominance of Q0 + base over
 * the sum on the grid.
 *
 * Failures are reported, not thrown. kernel_ok is left unset here; the
 * tangent-base overload fills it.
 */
inline FeasibilityReport verify_regularizer(const EllipsoidSum& s, const Matrix& q0,
                                            const Matrix& base_shape, const DirectionGrid& grid,
                                            double tol = 1e-9) {
    Matrix q0s = detail_bounds::checked_symmetric(q0, s.dim());
    Matrix combined = detail::symmetrize(base_shape) + q0s;
    FeasibilityReport report;
    report.grid_count = static_cast<int>(grid.size());
    report.pd_ok = detail_bounds::is_pd(combined);
    auto margins = detail_bounds::shape_margins(combined, s, grid);
    report.min_margin = *std::min_element(margins.begin(), margins.end());
    report.support_ok = report.min_margin >= -tol;
    report.trace_reduction = q0s.trace();
    return report;
}

/// Regularizer check against the pairwise base Q_u(p).
inline FeasibilityReport verify_regularizer(const EllipsoidSum& s, const Matrix& q0,
                                            const PairWeights& p, const DirectionGrid& grid,
                                            double tol = 1e-9) {
    return verify_regularizer(s, q0, pair_combination(s, p), grid, tol);
}

/// Regularizer check against the tangent base Q_l; also requires ell to lie
/// in the kernel of Q0 (zero Q0 passes trivially).
inline FeasibilityReport verify_regularizer(const EllipsoidSum& s, const Matrix& q0,
                                            const Direction& ell, const DirectionGrid& grid,
                                            double tol = 1e-9) {
    FeasibilityReport report = verify_regularizer(s, q0, tangent_shape(s, ell), grid, tol);
    double scale = q0.norm();  // Frobenius
    report.kernel_ok = (q0 * ell.vec()).norm() <= 1e-10 * scale || scale == 0.0;
    return report;
}

/**
 * @brief Outer ellipsoidal bound E(Q0 + Q_u(p)) of the geometric sum, centered
 * at the sum of term centers.
 *
 * The positive-definiteness condition is verified exactly and support
 * dominance on the grid; an infeasible regularizer throws, with the failed
 * certificate attached to the message.
 */
inline FamilyBound family_bound(const EllipsoidSum& s, const PairWeights& p, const Matrix& q0,
                                const DirectionGrid& grid, double tol = 1e-9) {
    FeasibilityReport report = verify_regularizer(s, q0, p, grid, tol);
    require(report.pd_ok, ErrorCode::infeasible_regularizer,
            "regularized shape is not positive definite");
    require(report.support_ok, ErrorCode::infeasible_regularizer,
            "support dominance fails on the verification grid");
    Matrix shape = pair_combination(s, p) + detail_bounds::checked_symmetric(q0, s.dim());
    return FamilyBound{Ellipsoid(detail::symmetrize(shape), s.center_sum()), std::move(report)};
}

/// Trace-optimal pair weights p_ij = sqrt(tr Q_j / tr Q_i). Empty for k = 1.
inline PairWeights optimal_p(const EllipsoidSum& s) {
    const auto& terms = s.terms();
    std::vector<double> values;
    values.reserve(PairWeights::pair_count_for(terms.size()));
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            values.push_back(std::sqrt(terms[j].trace() / terms[i].trace()));
    return PairWeights(terms.size(), std::move(values));
}

/**
 * @brief Minimum-trace outer bound of the geometric sum:
 * Q* = (sum_i sqrt(tr Q_i)) (sum_i Q_i / sqrt(tr Q_i)).
 *
 * Equals the pairwise family evaluated at the trace-optimal weights with a
 * zero regularizer; tr(Q*) = (sum_i sqrt(tr Q_i))^2 by construction.
 */
inline Ellipsoid min_trace_bound(const EllipsoidSum& s) {
    if (s.size() == 1) return s.terms().front();
    double scale = 0.0;
    Matrix mix = Matrix::Zero(s.dim(), s.dim());
    for (const auto& e : s.terms()) {
        double root = std::sqrt(e.trace());
        scale += root;
        mix += e.shape() / root;
    }
    return Ellipsoid(Matrix(scale * detail::symmetrize(mix)), s.center_sum());
}

/**
 * @brief Tight outer bound E(Q0 + Q_l) touching the exact boundary of the sum
 * at the support point for ell.
 *
 * Requires Q0 + Q_l positive definite, ell in ker(Q0) and support dominance
 * on the grid. The zero-regularizer overload skips the grid since dominance
 * then holds identically.
 */
inline TangentBound tangent_bound(const EllipsoidSum& s, const Direction& ell, const Matrix& q0,
                                  const DirectionGrid& grid, double tol = 1e-9) {
    FeasibilityReport report = verify_regularizer(s, q0, ell, grid, tol);
    require(report.kernel_ok.value(), ErrorCode::kernel_violation,
            "direction is not in the kernel of the regularizer");
    require(report.pd_ok, ErrorCode::infeasible_regularizer,
            "regularized tangent shape is not positive definite");
    require(report.support_ok, ErrorCode::infeasible_regularizer,
            "support dominance fails on the verification grid");
    Matrix shape = tangent_shape(s, ell) + detail_bounds::checked_symmetric(q0, s.dim());
    BoundarySample touch = boundary_point(s, ell);
    return TangentBound{Ellipsoid(detail::symmetrize(shape), s.center_sum()),
                        std::move(touch.point), ell};
}

inline TangentBound tangent_bound(const EllipsoidSum& s, const Direction& ell) {
    Matrix shape = tangent_shape(s, ell);
    BoundarySample touch = boundary_point(s, ell);
    return TangentBound{Ellipsoid(detail::symmetrize(shape), s.center_sum()),
                        std::move(touch.point), ell};
}

struct RefineOptions {
    int max_iters = 500;
    double step_scale = 1e-2;    ///< initial step = step_scale * tr(base) / n
    double margin_zone = 1e-3;   ///< soft zone, relative to the largest sum support
    int stall_limit = 6;         ///< stop after this many consecutive rejected steps
    double tol = 1e-9;
};

/**
 * @brief Numerical search for a trace-reducing regularizer on top of a
 * feasible base bound.
 *
 * Minimizes tr(Q0) over symmetric Q0 subject to positive definiteness of
 * base + Q0 and support dominance on the grid. The search is a projected
 * gradient descent on the n(n+1)/2 symmetric coordinates: soft hinge
 * penalties on near-violated margins tilt the descent direction along the
 * active constraints, and a candidate step is only accepted while strictly
 * feasible with nonpositive trace. Any feasible improving point is a valid
 * result; when nothing improves, the zero matrix is returned.
 *
 * Deterministic for fixed inputs and options.
 */
inline RegularizerMatrix refine_q0(const EllipsoidSum& s, const Ellipsoid& base,
                                   const DirectionGrid& grid, const RefineOptions& opts = {}) {
    require(base.dim() == s.dim() && grid.dim() == s.dim(), ErrorCode::dimension_mismatch,
            "base, sum and grid dimensions differ");
    const Eigen::Index n = s.dim();
    const Matrix& qb = base.shape();

    // The base must itself pass its containment check (centers included).
    {
        ContainmentReport base_check = check_containment(base, s, grid, opts.tol);
        require(base_check.contained_on_grid, ErrorCode::infeasible_base,
                "base bound does not contain the sum on the grid");
    }

    // Precompute per-direction data on centered shapes.
    const std::size_t g = grid.size();
    std::vector<double> sigma(g, 0.0);
    detail::parallel_for(g, [&](std::size_t i) {
        const Vector& l = grid[i].vec();
        double rhs = 0.0;
        for (const auto& e : s.terms()) rhs += std::sqrt(l.dot(e.shape() * l));
        sigma[i] = rhs;
    });
    const double sigma_max = *std::max_element(sigma.begin(), sigma.end());
    const double zone = opts.margin_zone * sigma_max;
    const double eps_pd = 1e-9 * qb.trace();
    const double eps_zone =
        1e-3 * Eigen::SelfAdjointEigenSolver<Matrix>(qb).eigenvalues().minCoeff();
    const double mu = 10.0 * qb.trace() / zone;

    // Symmetric coordinates: diagonal entries first in (a,b) row order.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> coords;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a; b < n; ++b) coords.emplace_back(a, b);

    auto to_matrix = [&](const Vector& theta) {
        Matrix q0 = Matrix::Zero(n, n);
        for (std::size_t c = 0; c < coords.size(); ++c) {
            auto [a, b] = coords[c];
            q0(a, b) += theta(static_cast<Eigen::Index>(c));
            if (a != b) q0(b, a) += theta(static_cast<Eigen::Index>(c));
        }
        return q0;
    };

    auto margins_of = [&](const Matrix& q0) {
        Matrix m = qb + q0;
        std::vector<double> out(g, 0.0);
        for (std::size_t i = 0; i < g; ++i) {
            const Vector& l = grid[i].vec();
            double qf = l.dot(m * l);
            out[i] = (qf > 0.0 ? std::sqrt(qf) : 0.0) - sigma[i];
        }
        return out;
    };

    auto lambda_min = [&](const Matrix& q0) {
        return Eigen::SelfAdjointEigenSolver<Matrix>(qb + q0).eigenvalues().minCoeff();
    };

    auto is_feasible = [&](const Matrix& q0) {
        if (lambda_min(q0) < eps_pd) return false;
        auto m = margins_of(q0);
        return *std::min_element(m.begin(), m.end()) >= 0.0;
    };

    auto objective = [&](const Matrix& q0) {
        double f = q0.trace();
        auto m = margins_of(q0);
        double pen = 0.0;
        for (std::size_t i = 0; i < g; ++i) {
            double h = zone - m[i];
            if (h > 0.0) pen += h * h;
        }
        double lam = lambda_min(q0);
        double hpd = eps_zone - lam;
        if (hpd > 0.0) pen += hpd * hpd;
        return f + mu * pen;
    };

    auto gradient = [&](const Matrix& q0) {
        Matrix m = qb + q0;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
        double lam = eig.eigenvalues().minCoeff();
        Vector vmin = eig.eigenvectors().col(0);
        Vector grad = Vector::Zero(static_cast<Eigen::Index>(coords.size()));
        std::vector<double> qf(g, 0.0);
        for (std::size_t i = 0; i < g; ++i) {
            const Vector& l = grid[i].vec();
            qf[i] = std::max(l.dot(m * l), 1e-300);
        }
        for (std::size_t c = 0; c < coords.size(); ++c) {
            auto [a, b] = coords[c];
            double gc = (a == b) ? 1.0 : 0.0;  // d tr(Q0) / d theta_c
            for (std::size_t i = 0; i < g; ++i) {
                double margin = std::sqrt(qf[i]) - sigma[i];
                double h = zone - margin;
                if (h <= 0.0) continue;
                const Vector& l = grid[i].vec();
                double dqf = l(a) * l(b) * (a == b ? 1.0 : 2.0);
                gc += mu * (-2.0 * h) * dqf / (2.0 * std::sqrt(qf[i]));
            }
            double hpd = eps_zone - lam;
            if (hpd > 0.0) {
                double dlam = vmin(a) * vmin(b) * (a == b ? 1.0 : 2.0);
                gc += mu * (-2.0 * hpd) * dlam;
            }
            grad(static_cast<Eigen::Index>(c)) = gc;
        }
        return grad;
    };

    Vector theta = Vector::Zero(static_cast<Eigen::Index>(coords.size()));
    double f_cur = objective(to_matrix(theta));
    const double eta0 = opts.step_scale * qb.trace() / static_cast<double>(n);
    int stall = 0;
    for (int iter = 0; iter < opts.max_iters && stall < opts.stall_limit; ++iter) {
        Vector g_vec = gradient(to_matrix(theta));
        double eta = eta0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt, eta *= 0.5) {
            Vector cand = theta - eta * g_vec;
            Matrix q0c = to_matrix(cand);
            if (q0c.trace() > 0.0) continue;
            if (!is_feasible(q0c)) continue;
            double f_cand = objective(q0c);
            if (f_cand < f_cur) {
                theta = std::move(cand);
                f_cur = f_cand;
                accepted = true;
                break;
            }
        }
        stall = accepted ? 0 : stall + 1;
    }

    Matrix q0 = to_matrix(theta);
    if (q0.trace() > -1e-12 * std::max(qb.trace(), 1.0)) q0.setZero();
    FeasibilityReport certificate = verify_regularizer(s, q0, qb, grid, opts.tol);
    return RegularizerMatrix{std::move(q0), std::move(certificate)};
}

} // namespace ellipsum
