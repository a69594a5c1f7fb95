#pragma once

#include <Eigen/Eigenvalues>
#include <optional>
#include <utility>
#include <vector>

#include "bounds.hpp"

namespace ellipsum {

/// One bounded input channel: per-step gain B and positive definite input
/// shape R. A single matrix broadcasts over all steps.
struct InputChannel {
    std::vector<Matrix> gains;   ///< B, n x m, size 1 or horizon
    std::vector<Matrix> shapes;  ///< R, m x m PD, size 1 or horizon
};

/**
 * @brief Discrete-time linear time-varying system
 * s_{k+1} = A_k s_k + sum_i B_{i,k} u_{i,k} with independent inputs bounded by
 * u_{i,k} in E(R_{i,k}).
 *
 * Step indices are 1-based (k = 1..horizon). Per-step matrices may be given
 * as single entries, which broadcast and mark the system time-invariant.
 */
class LtvSystem {
public:
    LtvSystem(std::vector<Matrix> dynamics, std::vector<InputChannel> inputs, int horizon)
        : dynamics_(std::move(dynamics)), inputs_(std::move(inputs)), horizon_(horizon) {
        require(horizon_ >= 1, ErrorCode::validation_error, "horizon must be >= 1");
        require(!dynamics_.empty(), ErrorCode::validation_error, "dynamics sequence is empty");
        require(!inputs_.empty(), ErrorCode::validation_error, "at least one input channel required");
        n_ = dynamics_.front().rows();
        require(n_ >= 1, ErrorCode::dimension_mismatch, "state dimension must be >= 1");
        auto check_length = [&](std::size_t len, const char* what) {
            require(len == 1 || len == static_cast<std::size_t>(horizon_), ErrorCode::validation_error,
                    std::string(what) + " must have one entry or one per step");
        };
        check_length(dynamics_.size(), "dynamics sequence");
        lti_ = dynamics_.size() == 1;
        for (const auto& a : dynamics_)
            require(a.rows() == n_ && a.cols() == n_, ErrorCode::dimension_mismatch,
                    "dynamics matrices must be square and consistently sized");
        for (auto& ch : inputs_) {
            check_length(ch.gains.size(), "input gain sequence");
            check_length(ch.shapes.size(), "input shape sequence");
            lti_ = lti_ && ch.gains.size() == 1 && ch.shapes.size() == 1;
            Eigen::Index m = ch.gains.front().cols();
            for (const auto& b : ch.gains)
                require(b.rows() == n_ && b.cols() == m, ErrorCode::dimension_mismatch,
                        "input gains must be n x m with a fixed m per channel");
            for (auto& r : ch.shapes) {
                require(r.rows() == m && r.cols() == m, ErrorCode::dimension_mismatch,
                        "input shapes must match the channel input dimension");
                r = Ellipsoid(r).shape();  // PD + symmetry validation
            }
        }
    }

    static LtvSystem lti(Matrix dynamics, std::vector<InputChannel> inputs, int horizon) {
        return LtvSystem(std::vector<Matrix>{std::move(dynamics)}, std::move(inputs), horizon);
    }

    Eigen::Index state_dim() const noexcept { return n_; }
    int horizon() const noexcept { return horizon_; }
    bool is_lti() const noexcept { return lti_; }
    std::size_t channel_count() const noexcept { return inputs_.size(); }

    const Matrix& dynamics(int step) const { return at(dynamics_, step); }
    const Matrix& gain(std::size_t channel, int step) const { return at(inputs_[channel].gains, step); }
    const Matrix& input_shape(std::size_t channel, int step) const {
        return at(inputs_[channel].shapes, step);
    }

private:
    const Matrix& at(const std::vector<Matrix>& seq, int step) const {
        require(step >= 1 && step <= horizon_, ErrorCode::validation_error, "step out of range");
        return seq.size() == 1 ? seq.front() : seq[static_cast<std::size_t>(step - 1)];
    }

    std::vector<Matrix> dynamics_;
    std::vector<InputChannel> inputs_;
    int horizon_;
    Eigen::Index n_;
    bool lti_ = false;
};

/// Reachability query: states reachable at `target_step` from s_1 = 0.
struct ReachSpec {
    LtvSystem system;
    int target_step;

    ReachSpec(LtvSystem sys, int step) : system(std::move(sys)), target_step(step) {
        require(target_step >= 2 && target_step <= system.horizon() + 1, ErrorCode::validation_error,
                "target step must lie in [2, horizon + 1]");
    }
};

/**
 * @brief State-transition products D_j = A_{k-1} * ... * A_{j+1} for
 * j = 1..k-1 (latest factor leftmost; D_{k-1} is the empty product, identity).
 *
 * Returned with D_j at index j-1.
 */
inline std::vector<Matrix> transition_products(const ReachSpec& spec) {
    const int k = spec.target_step;
    const Eigen::Index n = spec.system.state_dim();
    std::vector<Matrix> d(static_cast<std::size_t>(k - 1));
    d[static_cast<std::size_t>(k - 2)] = Matrix::Identity(n, n);
    for (int j = k - 2; j >= 1; --j)
        d[static_cast<std::size_t>(j - 1)] =
            d[static_cast<std::size_t>(j)] * spec.system.dynamics(j + 1);
    return d;
}

/**
 * @brief Transformed input shape matrices
 * Sigma_{i,j} = D_j B_{i,j} R_{i,j} B_{i,j}^T D_j^T.
 *
 * Entries whose image is rank-deficient (singular transition product or
 * rank-deficient gain) are flagged degenerate rather than rejected; the
 * reach-set operations skip them.
 */
struct ShapeTable {
    struct Entry {
        std::size_t channel;  ///< 0-based channel index
        int step;             ///< input step j, 1-based
        Matrix sigma;
        bool degenerate;
    };
    std::vector<Entry> entries;  ///< ordered by channel, then step
    std::size_t degenerate_count = 0;
};

inline ShapeTable input_shape_matrices(const ReachSpec& spec) {
    const auto d = transition_products(spec);
    ShapeTable table;
    table.entries.reserve(spec.system.channel_count() * d.size());
    for (std::size_t i = 0; i < spec.system.channel_count(); ++i) {
        for (int j = 1; j <= spec.target_step - 1; ++j) {
            Matrix db = d[static_cast<std::size_t>(j - 1)] * spec.system.gain(i, j);
            Matrix sigma = detail::symmetrize(db * spec.system.input_shape(i, j) * db.transpose());
            bool degenerate = !detail_bounds::is_pd(sigma);
            if (degenerate) ++table.degenerate_count;
            table.entries.push_back({i, j, std::move(sigma), degenerate});
        }
    }
    return table;
}

/// The reachable set at the target step as a geometric sum of the transformed
/// input ellipsoids (zero centers; the initial state is the origin).
inline EllipsoidSum reach_sum(const ReachSpec& spec) {
    ShapeTable table = input_shape_matrices(spec);
    std::vector<Ellipsoid> terms;
    terms.reserve(table.entries.size());
    for (auto& entry : table.entries)
        if (!entry.degenerate) terms.emplace_back(std::move(entry.sigma));
    require(!terms.empty(), ErrorCode::all_degenerate,
            "every transformed input shape is degenerate");
    return EllipsoidSum(std::move(terms));
}

/// Minimum-trace outer bound of the reachable set.
inline Ellipsoid reach_min_trace(const ReachSpec& spec) {
    return min_trace_bound(reach_sum(spec));
}

/// Exact boundary sweep of the reachable set.
inline std::vector<BoundarySample> reach_boundary(const ReachSpec& spec, const DirectionGrid& grid) {
    return sample_boundary(reach_sum(spec), grid);
}

namespace detail_reach {

inline void check_axes(Eigen::Index dim, Eigen::Index a, Eigen::Index b) {
    require(a >= 0 && b >= 0 && a < dim && b < dim && a != b, ErrorCode::bad_axes,
            "projection axes must be distinct and in range");
}

} // namespace detail_reach

/// Orthogonal shadow of an ellipsoid on the (a, b) coordinate plane: the
/// 2x2 principal submatrix of the shape matrix (support functions restrict).
inline Ellipsoid project_to_plane(const Ellipsoid& e, Eigen::Index a, Eigen::Index b) {
    detail_reach::check_axes(e.dim(), a, b);
    Matrix q(2, 2);
    q << e.shape()(a, a), e.shape()(a, b), e.shape()(b, a), e.shape()(b, b);
    Vector c(2);
    c << e.center()(a), e.center()(b);
    return Ellipsoid(std::move(q), std::move(c));
}

/// Shadow of a geometric sum: the sum of the projected terms. Boundaries of
/// the projection should be recomputed from these 2-D terms.
inline EllipsoidSum project_to_plane(const EllipsoidSum& s, Eigen::Index a, Eigen::Index b) {
    detail_reach::check_axes(s.dim(), a, b);
    std::vector<Ellipsoid> terms;
    terms.reserve(s.size());
    for (const auto& e : s.terms()) terms.push_back(project_to_plane(e, a, b));
    return EllipsoidSum(std::move(terms));
}

/// Spectral radius (largest eigenvalue magnitude). Dense solve for small
/// matrices, power-iteration growth estimate above 64 states.
inline double spectral_radius(const Matrix& a) {
    if (a.rows() <= 64) {
        return Eigen::EigenSolver<Matrix>(a, /*computeEigenvectors=*/false)
            .eigenvalues()
            .cwiseAbs()
            .maxCoeff();
    }
    Vector v = Vector::Ones(a.rows()).normalized();
    double growth = 0.0;
    const int warmup = 50, window = 50;
    for (int it = 0; it < warmup + window; ++it) {
        Vector w = a * v;
        double nw = w.norm();
        if (nw == 0.0) return 0.0;
        if (it >= warmup) growth += std::log(nw);
        v = w / nw;
    }
    return std::exp(growth / window);
}

/**
 * @brief Convergence diagnostics for the minimum-trace reach bound at a fixed
 * target step.
 *
 * trace_roots[t] is the trace root of the bound built from the t newest
 * input terms (t = 0..k-1), so trace_roots.back() matches
 * sqrt(tr(reach_min_trace)). increments[t] is the contribution of the term
 * of age t; ratio_estimates[t] = increments[t+1] / increments[t]. Degenerate
 * entries are excluded, matching the bound itself.
 *
 * converged requires the oldest included contribution to fall below
 * tol * trace_roots.back() and every step matrix to have spectral radius
 * below one.
 */
struct BoundednessReport {
    std::vector<double> trace_roots;
    std::vector<double> increments;
    std::vector<double> ratio_estimates;
    double spectral_radius_max = 0.0;
    bool converged = false;
    std::optional<int> settling_step;
    double tol = 0.0;
};

inline BoundednessReport boundedness_check(const LtvSystem& system, int k, double tol) {
    require(k >= 3, ErrorCode::validation_error, "need a target step of at least 3");
    ReachSpec spec(system, k);
    ShapeTable table = input_shape_matrices(spec);

    BoundednessReport report;
    report.tol = tol;
    // Contribution of the term of age t (t = 0 newest, t = k-2 oldest).
    std::vector<double> by_age(static_cast<std::size_t>(k - 1), 0.0);
    for (const auto& entry : table.entries) {
        if (entry.degenerate) continue;
        by_age[static_cast<std::size_t>(k - 1 - entry.step)] += std::sqrt(entry.sigma.trace());
    }
    report.increments = by_age;
    report.trace_roots.assign(static_cast<std::size_t>(k), 0.0);
    for (int t = 0; t < k - 1; ++t)
        report.trace_roots[static_cast<std::size_t>(t + 1)] =
            report.trace_roots[static_cast<std::size_t>(t)] + by_age[static_cast<std::size_t>(t)];
    report.ratio_estimates.assign(by_age.size() > 1 ? by_age.size() - 1 : 0, 0.0);
    for (std::size_t t = 0; t + 1 < by_age.size(); ++t)
        report.ratio_estimates[t] = by_age[t + 1] / by_age[t];

    for (int j = 1; j <= k - 1; ++j)
        report.spectral_radius_max =
            std::max(report.spectral_radius_max, spectral_radius(system.dynamics(j)));

    const double total = report.trace_roots.back();
    for (std::size_t t = 1; t < by_age.size(); ++t) {
        if (by_age[t] <= tol * report.trace_roots[t + 1]) {
            report.settling_step = static_cast<int>(t) + 1;
            break;
        }
    }
    report.converged = by_age.back() <= tol * total && report.spectral_radius_max < 1.0;
    return report;
}

/**
 * @brief Smallest horizon beyond which older inputs stop mattering:
 * the first k >= 2 whose next-oldest contribution
 * sum_i sqrt(tr(A^{k-1} B_i R_i B_i^T A^{(k-1)T})) falls below tol times the
 * accumulated trace root. Time-invariant systems only.
 */
inline int settling_horizon(const LtvSystem& system, double tol, int k_max) {
    require(system.is_lti(), ErrorCode::validation_error,
            "settling horizon is defined for time-invariant systems");
    require(tol > 0.0, ErrorCode::validation_error, "tolerance must be positive");
    require(k_max >= 2, ErrorCode::validation_error, "cap must be at least 2");
    const Matrix& a = system.dynamics(1);
    Matrix power = a;  // A^{k-1} for the k under test
    double total = 0.0;
    Matrix reach_term = Matrix::Identity(a.rows(), a.cols());  // A^{k-2}
    for (int k = 2; k <= k_max; ++k) {
        double newest = 0.0, next_oldest = 0.0;
        for (std::size_t i = 0; i < system.channel_count(); ++i) {
            Matrix brb = system.gain(i, 1) * system.input_shape(i, 1) *
                         system.gain(i, 1).transpose();
            newest += std::sqrt((reach_term * brb * reach_term.transpose()).trace());
            next_oldest += std::sqrt((power * brb * power.transpose()).trace());
        }
        total += newest;
        if (next_oldest < tol * total) return k;
        reach_term = power;
        power = a * power;
    }
    fail(ErrorCode::not_settled, "no settling step found below the cap");
}

} // namespace ellipsum
