#pragma once

// Shared deterministic generators for the test suites.

#include <cstdint>
#include <random>
#include <vector>

#include <ellipsum/core.hpp>
#include <ellipsum/minkowski.hpp>

namespace ts {

using ellipsum::Matrix;
using ellipsum::Vector;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gauss_(seed) {}

    double gaussian() { return gauss_.next(); }
    double uniform() { return gauss_.uniform_open(); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(uniform() * (hi - lo + 1)) % (hi - lo + 1);
    }

    Vector gaussian_vector(Eigen::Index n) { return gauss_.vector(n); }

    ellipsum::Direction direction(Eigen::Index n) {
        for (;;) {
            Vector v = gaussian_vector(n);
            if (v.norm() > 1e-8) return ellipsum::Direction::normalized(v);
        }
    }

    Matrix gaussian_matrix(Eigen::Index r, Eigen::Index c) {
        Matrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = gaussian();
        return m;
    }

    /// Random well-conditioned SPD matrix A A^T + eps I.
    Matrix spd(Eigen::Index n, double eps = 0.05) {
        Matrix a = gaussian_matrix(n, n);
        return Matrix(a * a.transpose() + eps * Matrix::Identity(n, n));
    }

    ellipsum::Ellipsoid ellipsoid(Eigen::Index n, bool zero_center = true) {
        Vector c = zero_center ? Vector(Vector::Zero(n)) : Vector(gaussian_vector(n));
        return ellipsum::Ellipsoid(spd(n), c);
    }

    ellipsum::EllipsoidSum sum(Eigen::Index n, std::size_t k, bool zero_center = true) {
        std::vector<ellipsum::Ellipsoid> terms;
        terms.reserve(k);
        for (std::size_t i = 0; i < k; ++i) terms.push_back(ellipsoid(n, zero_center));
        return ellipsum::EllipsoidSum(std::move(terms));
    }

    /// Uniform draw from the unit ball (rejection sampling).
    Vector unit_ball_point(Eigen::Index n) {
        for (;;) {
            Vector v(n);
            for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(-1.0, 1.0);
            if (v.squaredNorm() <= 1.0) return v;
        }
    }

private:
    ellipsum::detail::GaussianStream gauss_;
};

inline Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

// The four published 2-D shape matrices used in the worked example.
inline std::vector<Matrix> demo_shapes() {
    return {mat2(0.41, 0.33, 0.33, 0.31), mat2(0.23, 0.11, 0.11, 0.06),
            mat2(0.17, -0.1, -0.1, 0.15), mat2(0.01, 0.0, 0.0, 0.65)};
}

inline ellipsum::EllipsoidSum demo_sum() {
    std::vector<ellipsum::Ellipsoid> terms;
    for (const auto& q : demo_shapes()) terms.emplace_back(q);
    return ellipsum::EllipsoidSum(std::move(terms));
}

// The 3-D stable dynamics matrix used in the worked reachability example.
inline Matrix demo_dynamics() {
    Matrix f(3, 3);
    f << 0.67, 0.35, -0.12, -0.66, -0.55, 0.41, 2.12, 1.83, 0.47;
    return f;
}

} // namespace ts
