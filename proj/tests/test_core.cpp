#include <catch2/catch_amalgamated.hpp>

#include <ellipsum/core.hpp>

#include "test_support.hpp"

using namespace ellipsum;
using ts::mat2;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("ellipsoid construction validates its shape matrix") {
    SECTION("identity gives the unit disk") {
        Ellipsoid e(Matrix(Matrix::Identity(2, 2)));
        CHECK(e.dim() == 2);
        CHECK(e.center().isZero());
    }
    SECTION("published demo shape is accepted") {
        Ellipsoid e(mat2(0.41, 0.33, 0.33, 0.31));
        CHECK_THAT(e.shape()(0, 1), WithinAbs(0.33, 0.0));
    }
    SECTION("indefinite matrix is rejected") {
        CHECK_THROWS_MATCHES(Ellipsoid(mat2(1, 2, 2, 1)), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == ErrorCode::not_positive_definite;
                             }));
    }
    SECTION("asymmetry above tolerance is rejected, below it symmetrized") {
        CHECK_THROWS_AS(Ellipsoid(mat2(1, 0.2, 0.1, 1)), Error);
        Ellipsoid e(mat2(1, 0.1 + 1e-13, 0.1, 1));
        CHECK(e.shape()(0, 1) == e.shape()(1, 0));
    }
    SECTION("dimension mismatches are rejected") {
        CHECK_THROWS_AS(Ellipsoid(Matrix(Matrix::Identity(2, 2)), Vector(Vector::Zero(3))), Error);
        CHECK_THROWS_AS(Ellipsoid(Matrix(Matrix::Zero(2, 3)), Vector(Vector::Zero(2))), Error);
        CHECK_THROWS_AS(Ellipsoid(Matrix(0, 0)), Error);
    }
}

TEST_CASE("support function evaluation") {
    Ellipsoid disk(Matrix(Matrix::Identity(2, 2)));
    ts::Rng rng(11);
    SECTION("unit disk supports 1 in every direction") {
        for (int i = 0; i < 20; ++i)
            CHECK_THAT(support(disk, rng.direction(2)), WithinAbs(1.0, 1e-12));
    }
    SECTION("axis-aligned ellipsoid") {
        Ellipsoid e(Matrix(Eigen::Vector2d(4.0, 1.0).asDiagonal()));
        CHECK_THAT(support(e, Direction(Vector(Eigen::Vector2d(1, 0)))), WithinAbs(2.0, 1e-15));
    }
    SECTION("demo shape along the first axis") {
        Ellipsoid e(ts::demo_shapes()[0]);
        CHECK_THAT(support(e, Direction(Vector(Eigen::Vector2d(1, 0)))),
                   WithinAbs(0.6403124237432849, 1e-15));
    }
    SECTION("center shifts the support affinely") {
        Ellipsoid e(Matrix(Matrix::Identity(2, 2)), Vector(Eigen::Vector2d(3.0, -1.0)));
        CHECK_THAT(support(e, Direction(Vector(Eigen::Vector2d(1, 0)))), WithinAbs(4.0, 1e-12));
    }
    SECTION("dimension mismatch throws") {
        CHECK_THROWS_AS(support(disk, Direction(Vector(Eigen::Vector3d(1, 0, 0)))), Error);
    }
}

TEST_CASE("support point lies on the surface and achieves the support") {
    SECTION("unit disk") {
        Ellipsoid disk(Matrix(Matrix::Identity(2, 2)));
        Vector p = support_point(disk, Direction(Vector(Eigen::Vector2d(0, 1))));
        CHECK_THAT((p - Eigen::Vector2d(0, 1)).norm(), WithinAbs(0.0, 1e-15));
    }
    SECTION("axis endpoint") {
        Ellipsoid e(Matrix(Eigen::Vector2d(4.0, 1.0).asDiagonal()));
        Vector p = support_point(e, Direction(Vector(Eigen::Vector2d(1, 0))));
        CHECK_THAT((p - Eigen::Vector2d(2, 0)).norm(), WithinAbs(0.0, 1e-15));
    }
    SECTION("demo shape: frozen value") {
        Ellipsoid e(ts::demo_shapes()[0]);
        Vector p = support_point(e, Direction(Vector(Eigen::Vector2d(1, 0))));
        CHECK_THAT(p(0), WithinAbs(0.6403124237432848, 1e-15));
        CHECK_THAT(p(1), WithinAbs(0.5153734142324000, 1e-15));
    }
    SECTION("random instances: consistency and surface membership") {
        ts::Rng rng(17);
        for (int trial = 0; trial < 200; ++trial) {
            Eigen::Index n = 1 + trial % 6;
            Ellipsoid e = rng.ellipsoid(n, /*zero_center=*/false);
            Direction l = rng.direction(n);
            Vector x = support_point(e, l);
            CHECK_THAT(l.vec().dot(x), WithinRel(support(e, l), 1e-12));
            Vector r = x - e.center();
            CHECK_THAT(r.dot(e.factorization().solve(r)), WithinAbs(1.0, 1e-10));
        }
    }
}

TEST_CASE("affine image transforms shape and center") {
    Ellipsoid disk(Matrix(Matrix::Identity(2, 2)));
    SECTION("identity map is a no-op") {
        Ellipsoid img = affine_image(disk, Matrix(Matrix::Identity(2, 2)));
        CHECK(img.shape().isApprox(Matrix::Identity(2, 2)));
    }
    SECTION("scaling squares into the shape matrix") {
        Ellipsoid img = affine_image(disk, Matrix(2.0 * Matrix::Identity(2, 2)));
        CHECK(img.shape().isApprox(Matrix(4.0 * Matrix::Identity(2, 2)), 1e-14));
    }
    SECTION("demo dynamics map the unit ball to F F^T") {
        Matrix f = ts::demo_dynamics();
        Ellipsoid img = affine_image(Ellipsoid(Matrix(Matrix::Identity(3, 3))), f);
        CHECK(img.shape().isApprox(Matrix(f * f.transpose()), 1e-14));
    }
    SECTION("offset shifts the center") {
        Ellipsoid img = affine_image(disk, Matrix(Matrix::Identity(2, 2)), Vector(Eigen::Vector2d(1, 2)));
        CHECK(img.center().isApprox(Eigen::Vector2d(1, 2)));
    }
    SECTION("rank-deficient maps are flagged") {
        Matrix flat(1, 2);
        flat << 1, 0;
        Ellipsoid line = affine_image(disk, flat);  // 1-D image is fine
        CHECK(line.dim() == 1);
        Matrix widen(2, 1);
        widen << 1, 0;
        CHECK_THROWS_MATCHES(affine_image(line, widen), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == ErrorCode::rank_deficient;
                             }));
    }
    SECTION("support is affinely covariant") {
        ts::Rng rng(23);
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::Index n = 2 + trial % 4;
            Ellipsoid e = rng.ellipsoid(n);
            Matrix m = rng.spd(n, 0.3);  // invertible
            Direction l = rng.direction(n);
            Vector mtl = m.transpose() * l.vec();
            double lhs = support(affine_image(e, m), l);
            double rhs = support(e, Direction::normalized(mtl)) * mtl.norm();
            CHECK_THAT(lhs, WithinRel(rhs, 1e-10));
        }
    }
}

TEST_CASE("point containment") {
    Ellipsoid disk(Matrix(Matrix::Identity(2, 2)));
    CHECK(contains_point(disk, Vector(Eigen::Vector2d(0, 0))));
    CHECK(contains_point(disk, Vector(Eigen::Vector2d(1, 0))));
    CHECK_FALSE(contains_point(disk, Vector(Eigen::Vector2d(1.01, 0)), 1e-9));
    CHECK_THROWS_AS(contains_point(disk, Vector(Vector::Zero(3))), Error);
}

TEST_CASE("sampled interior points never exceed the support function") {
    // Uniform draws in the ellipsoid: unit-ball rejection samples pushed
    // through the Cholesky factor, plus the center.
    ts::Rng rng(29);
    Ellipsoid e = rng.ellipsoid(2, /*zero_center=*/false);
    Matrix l = e.factorization().matrixL();
    std::vector<Direction> dirs;
    std::vector<double> rho;
    for (int i = 0; i < 100; ++i) {
        dirs.push_back(rng.direction(2));
        rho.push_back(support(e, dirs.back()));
    }
    long violations = 0;
    for (int i = 0; i < 10000; ++i) {
        Vector x = e.center() + l * rng.unit_ball_point(2);
        for (std::size_t d = 0; d < dirs.size(); ++d)
            if (dirs[d].vec().dot(x) > rho[d] + 1e-12) ++violations;
    }
    CHECK(violations == 0);
}
