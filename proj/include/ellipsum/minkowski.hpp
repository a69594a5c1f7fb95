#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core.hpp"

namespace ellipsum {

/**
 * @brief Ordered collection of same-dimension ellipsoids whose geometric
 * (Minkowski) sum is the convex body under study.
 *
 * The sum itself is generally not an ellipsoid; it is handled through its
 * support function, which is the sum of the terms' support functions.
 */
class EllipsoidSum {
public:
    explicit EllipsoidSum(std::vector<Ellipsoid> terms) : terms_(std::move(terms)) {
        require(!terms_.empty(), ErrorCode::validation_error, "sum needs at least one term");
        for (const auto& t : terms_)
            require(t.dim() == terms_.front().dim(), ErrorCode::dimension_mismatch,
                    "all terms must share one dimension");
        center_sum_ = Vector::Zero(dim());
        for (const auto& t : terms_) center_sum_ += t.center();
    }

    EllipsoidSum(std::initializer_list<Ellipsoid> terms)
        : EllipsoidSum(std::vector<Ellipsoid>(terms)) {}

    const std::vector<Ellipsoid>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    Eigen::Index dim() const noexcept { return terms_.front().dim(); }

    /// Center of the sum: the term centers add.
    const Vector& center_sum() const noexcept { return center_sum_; }

private:
    std::vector<Ellipsoid> terms_;
    Vector center_sum_;
};

enum class GridScheme { circle_uniform, fibonacci_sphere, gaussian_normalized };

inline const char* grid_scheme_name(GridScheme s) {
    switch (s) {
    case GridScheme::circle_uniform:      return "circle-uniform";
    case GridScheme::fibonacci_sphere:    return "fibonacci-sphere";
    case GridScheme::gaussian_normalized: return "random-gaussian-normalized";
    }
    return "unknown";
}

/**
 * @brief Deterministic set of unit directions used to sweep boundaries and to
 * check support-function dominance.
 *
 * n = 2 uses equispaced angles starting at 0, n = 3 a Fibonacci sphere, and
 * higher dimensions seeded normalized Gaussian draws. For fixed
 * (dimension, count, seed) the grid is reproducible bit for bit.
 */
class DirectionGrid {
public:
    static DirectionGrid make(Eigen::Index dim, int count, std::uint64_t seed = 0) {
        require(dim >= 1, ErrorCode::dimension_mismatch, "grid dimension must be >= 1");
        require(count >= 1, ErrorCode::validation_error, "grid count must be >= 1");
        std::vector<Direction> dirs;
        dirs.reserve(static_cast<std::size_t>(count));
        GridScheme scheme;
        if (dim == 2) {
            scheme = GridScheme::circle_uniform;
            for (int i = 0; i < count; ++i) {
                double a = 2.0 * M_PI * i / count;
                dirs.emplace_back(Vector(Eigen::Vector2d(std::cos(a), std::sin(a))));
            }
        } else if (dim == 3) {
            scheme = GridScheme::fibonacci_sphere;
            const double golden = M_PI * (3.0 - std::sqrt(5.0));
            for (int i = 0; i < count; ++i) {
                double z = 1.0 - (2.0 * i + 1.0) / count;
                double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                double a = golden * i;
                Eigen::Vector3d v(r * std::cos(a), r * std::sin(a), z);
                dirs.emplace_back(Direction::normalized(v));
            }
        } else {
            scheme = GridScheme::gaussian_normalized;
            detail::GaussianStream g(seed);
            while (dirs.size() < static_cast<std::size_t>(count)) {
                Vector v = g.vector(dim);
                if (v.norm() > 1e-12) dirs.push_back(Direction::normalized(v));
            }
        }
        return DirectionGrid(std::move(dirs), scheme, seed);
    }

    /// Grid sizes used when the caller does not ask for a specific count.
    static int default_count(Eigen::Index dim) {
        if (dim == 2) return 720;
        if (dim == 3) return 2562;
        return static_cast<int>(10 * dim * dim);
    }

    static DirectionGrid make_default(Eigen::Index dim, std::uint64_t seed = 0) {
        return make(dim, default_count(dim), seed);
    }

    const std::vector<Direction>& directions() const noexcept { return dirs_; }
    const Direction& operator[](std::size_t i) const { return dirs_[i]; }
    std::size_t size() const noexcept { return dirs_.size(); }
    Eigen::Index dim() const noexcept { return dirs_.front().dim(); }
    GridScheme scheme() const noexcept { return scheme_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    DirectionGrid(std::vector<Direction> dirs, GridScheme scheme, std::uint64_t seed)
        : dirs_(std::move(dirs)), scheme_(scheme), seed_(seed) {}

    std::vector<Direction> dirs_;
    GridScheme scheme_;
    std::uint64_t seed_;
};

/// One point of the parametric boundary sweep.
struct BoundarySample {
    Direction direction;
    Vector point;
    double support;
};

inline void check_same_dim(const EllipsoidSum& s, const Direction& ell) {
    require(s.dim() == ell.dim(), ErrorCode::dimension_mismatch,
            "sum and direction dimensions differ");
}

/// Support function of the geometric sum: sum of term support functions.
inline double sum_support(const EllipsoidSum& s, const Direction& ell) {
    check_same_dim(s, ell);
    double total = 0.0;
    for (const auto& e : s.terms()) total += support(e, ell);
    return total;
}

/**
 * @brief Exact boundary point of the geometric sum in direction ell.
 *
 * Each term contributes its own support point; the contributions add:
 *   x = sum_i Q_i ell / sqrt(ell^T Q_i ell) + sum_i c_i.
 * By construction <ell, x> equals the summed support value.
 */
inline BoundarySample boundary_point(const EllipsoidSum& s, const Direction& ell) {
    check_same_dim(s, ell);
    const Vector& l = ell.vec();
    Vector x = s.center_sum();
    double rho = l.dot(s.center_sum());
    for (const auto& e : s.terms()) {
        Vector ql = e.shape() * l;
        double root = std::sqrt(l.dot(ql));
        x += ql / root;
        rho += root;
    }
    return BoundarySample{ell, std::move(x), rho};
}

/// Dense boundary sweep; one sample per grid direction, grid order preserved.
/// Directions are evaluated independently (parallel-safe).
inline std::vector<BoundarySample> sample_boundary(const EllipsoidSum& s, const DirectionGrid& grid) {
    require(grid.dim() == s.dim(), ErrorCode::dimension_mismatch,
            "grid and sum dimensions differ");
    std::vector<BoundarySample> out(grid.size(), BoundarySample{grid[0], Vector(), 0.0});
    detail::parallel_for(grid.size(), [&](std::size_t i) {
        out[i] = boundary_point(s, grid[i]);
    });
    return out;
}

/**
 * @brief Grid-sampled containment check of the geometric sum inside a
 * candidate ellipsoid.
 *
 * Per direction the margin is support(candidate) - support(sum); the sum is
 * contained only if every margin is nonnegative. A finite grid makes this a
 * necessary-condition check, hence "contained on grid".
 */
struct ContainmentReport {
    bool contained_on_grid = false;
    double min_margin = 0.0;
    std::size_t min_index = 0;     ///< grid index of the near-tangency witness
    double tol = 0.0;
    std::vector<double> margins;   ///< one entry per grid direction, grid order
};

inline ContainmentReport check_containment(const Ellipsoid& candidate, const EllipsoidSum& s,
                                           const DirectionGrid& grid, double tol) {
    require(candidate.dim() == s.dim() && grid.dim() == s.dim(), ErrorCode::dimension_mismatch,
            "candidate, sum and grid dimensions differ");
    ContainmentReport report;
    report.tol = tol;
    report.margins.assign(grid.size(), 0.0);
    detail::parallel_for(grid.size(), [&](std::size_t i) {
        report.margins[i] = support(candidate, grid[i]) - sum_support(s, grid[i]);
    });
    report.min_index = 0;
    for (std::size_t i = 1; i < report.margins.size(); ++i)
        if (report.margins[i] < report.margins[report.min_index]) report.min_index = i;
    report.min_margin = report.margins[report.min_index];
    report.contained_on_grid = report.min_margin >= -tol;
    return report;
}

} // namespace ellipsum
