#include <doctest.h>

#include <cmath>

#include "hyperball/errors.hpp"
#include "hyperball/geometry.hpp"
#include "support.hpp"

using namespace hyperball;
using namespace hyperball::geometry;
using testing::point;

namespace {

// Term-by-term Möbius addition in extended precision.
std::array<long double, 2> mobius_oracle(long double x0, long double x1, long double y0, long double y1) {
    const long double xy = x0 * y0 + x1 * y1;
    const long double xx = x0 * x0 + x1 * x1;
    const long double yy = y0 * y0 + y1 * y1;
    const long double den = 1.0L + 2.0L * xy + xx * yy;
    const long double a = (1.0L + 2.0L * xy + yy) / den;
    const long double b = (1.0L - xx) / den;
    return {a * x0 + b * y0, a * x1 + b * y1};
}

long double distance_oracle(long double u0, long double u1, long double v0, long double v1) {
    const long double diff = (u0 - v0) * (u0 - v0) + (u1 - v1) * (u1 - v1);
    const long double uu = u0 * u0 + u1 * u1;
    const long double vv = v0 * v0 + v1 * v1;
    return std::acosh(1.0L + 2.0L * diff / ((1.0L - uu) * (1.0L - vv)));
}

}  // namespace

TEST_CASE("conformal factor") {
    CHECK(conformal_factor(point({0.0, 0.0})) == 2.0);
    CHECK(conformal_factor(point({0.5, 0.0})) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
    CHECK(conformal_factor(point({0.0, 0.9})) == doctest::Approx(2.0 / 0.19).epsilon(1e-12));
}

TEST_CASE("mobius addition") {
    SUBCASE("origin is the identity") {
        const auto y = point({0.2, -0.7});
        CHECK(mobius_add(point({0.0, 0.0}), y) == y);
    }
    SUBCASE("left inverse") {
        const auto r = mobius_add(point({-0.5, 0.0}), point({0.5, 0.0}));
        CHECK(r.norm() < 1e-15);
    }
    SUBCASE("matches the extended-precision oracle") {
        const auto expect = mobius_oracle(0.3L, 0.0L, 0.0L, 0.4L);
        const auto r = mobius_add(point({0.3, 0.0}), point({0.0, 0.4}));
        CHECK(r[0] == doctest::Approx(static_cast<double>(expect[0])).epsilon(1e-14));
        CHECK(r[1] == doctest::Approx(static_cast<double>(expect[1])).epsilon(1e-14));
        // frozen from a 40-digit evaluation
        CHECK(r[0] == doctest::Approx(0.34305993690851735).epsilon(1e-14));
        CHECK(r[1] == doctest::Approx(0.35883280757097792).epsilon(1e-14));
    }
    SUBCASE("result stays in the ball") {
        const auto r = mobius_add(point({0.99999, 0.0}), point({0.99999, 0.0}));
        CHECK(r.norm() <= kMaxNorm);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(mobius_add(point({0.1}), point({0.1, 0.2})), ShapeError);
    }
}

TEST_CASE("poincare distance") {
    CHECK(distance(point({0.4, 0.1}), point({0.4, 0.1})) == 0.0);
    const double d0 = distance(point({0.0, 0.0}), point({0.5, 0.0}));
    CHECK(d0 == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(d0 == doctest::Approx(2.0 * std::atanh(0.5)).epsilon(1e-12));
    CHECK(d0 == doctest::Approx(static_cast<double>(distance_oracle(0, 0, 0.5L, 0))).epsilon(1e-12));
    const double d1 = distance(point({0.3, 0.0}), point({-0.3, 0.0}));
    CHECK(d1 == doctest::Approx(static_cast<double>(distance_oracle(0.3L, 0, -0.3L, 0))).epsilon(1e-12));
    CHECK(d1 == doctest::Approx(1.2380784168124469).epsilon(1e-12));
}

TEST_CASE("exp0 and log0") {
    CHECK(exp0({{0.0, 0.0}}).norm() == 0.0);
    const auto e = exp0({{0.5, 0.0}});
    CHECK(e[0] == doctest::Approx(std::tanh(0.5)).epsilon(1e-15));
    CHECK(e[0] == doctest::Approx(0.46211715726000974).epsilon(1e-14));
    CHECK(e[1] == 0.0);
    CHECK(exp0({{6.0, 8.0}}).norm() < 1.0);
    CHECK(log0(point({0.0, 0.0})).coords == Vec{0.0, 0.0});
    CHECK(log0(e).coords[0] == doctest::Approx(0.5).epsilon(1e-12));

    SplitMix64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const Vec v = testing::random_vector(rng, 5, 0.0, 3.0);
        const auto back = log0(exp0({v})).coords;
        for (std::size_t k = 0; k < v.size(); ++k) CHECK(std::abs(back[k] - v[k]) < 1e-9);
    }
}

TEST_CASE("project_to_ball") {
    const Vec inside{0.3, 0.4};
    const auto kept = project_to_ball(inside);
    CHECK(kept[0] == 0.3);
    CHECK(kept[1] == 0.4);
    const auto clamped = project_to_ball(Vec{0.9, 1.2});
    CHECK(clamped.norm() <= kMaxNorm);
    CHECK(clamped.norm() == doctest::Approx(kMaxNorm).epsilon(1e-15));
    CHECK(clamped[0] / clamped[1] == doctest::Approx(0.75));
    CHECK(project_to_ball(Vec{0.0, 0.0}).norm() == 0.0);
    CHECK_THROWS_AS(project_to_ball(Vec{NAN, 0.0}), InvalidInput);
    CHECK_THROWS_AS(project_to_ball(Vec{INFINITY, 0.0}), InvalidInput);
}

TEST_CASE("geometry properties on random points") {
    SplitMix64 rng(2024);
    for (std::size_t n : {2u, 7u}) {
        for (int i = 0; i < 300; ++i) {
            const auto u = testing::random_point(rng, n, 0.99);
            const auto v = testing::random_point(rng, n, 0.99);
            const auto w = testing::random_point(rng, n, 0.99);
            CHECK(std::abs(distance(u, v) - distance(v, u)) < 1e-12);
            CHECK(distance(u, w) <= distance(u, v) + distance(v, w) + 1e-9);
            CHECK(mobius_add(negate(u), u).norm() < 1e-12);
            CHECK(std::abs(distance(HyperbolicPoint(n), v) - 2.0 * std::atanh(v.norm())) < 1e-9);
            CHECK(mobius_add(u, v).norm() <= kMaxNorm);
        }
    }
}
