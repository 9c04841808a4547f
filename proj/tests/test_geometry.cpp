#include "scallops/geometry.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace scallops;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

TEST_CASE("link directions") {
    CHECK((link_direction(0.0, pi, 1) - Vec2(1, 0)).norm() < 1e-15);
    CHECK((link_direction(0.0, pi, 2) - Vec2(-1, 0)).norm() < 1e-15);
    CHECK((link_direction(pi / 2, pi / 2, 2) - Vec2(-1, 0)).norm() < 1e-15);
    CHECK_THROWS_AS(link_direction(0.0, pi, 3), std::out_of_range);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        const double th = u(rng), sg = u(rng);
        for (int j : {1, 2}) CHECK(link_direction(th, sg, j).norm() == Approx(1.0).epsilon(1e-15));
        // second link turns with sigma
        const double h = 1e-6;
        const Vec2 de = (link_direction(th, sg + h, 2) - link_direction(th, sg - h, 2)) / (2 * h);
        CHECK((de - perp(link_direction(th, sg, 2))).norm() < 1e-8);
    }
}

TEST_CASE("perp and cross") {
    CHECK(perp(Vec2(1, 0)) == Vec2(0, 1));
    CHECK(perp(Vec2(0, 1)) == Vec2(-1, 0));
    CHECK(perp(Vec2(3, 4)) == Vec2(-4, 3));
    const Vec2 v(0.3, -1.7);
    CHECK(perp(perp(v)) == -v);
    CHECK(perp(v).dot(v) == 0.0);
    CHECK(cross(Vec2(1, 0), Vec2(0, 1)) == 1.0);
    CHECK(cross(v, v) == 0.0);
}

TEST_CASE("points on links") {
    const auto params = ScallopPairParams::from_lambda(1.0, 0.5, {});
    SystemState s;
    s.x1 = 2;
    s.y1 = 3;
    CHECK((point_on_link(s, params, 1, 1, 0.0) - Vec2(2, 3)).norm() < 1e-15);
    s = SystemState{};
    CHECK((point_on_link(s, params, 1, 2, 1.0) - Vec2(-1, 0)).norm() < 1e-15);
    s.x1 = 1;
    s.y1 = 1;
    s.theta1 = pi / 2;
    CHECK((point_on_link(s, params, 1, 1, 0.5) - Vec2(1, 1.5)).norm() < 1e-15);
    CHECK_THROWS_AS(point_on_link(s, params, 1, 1, 1.5), std::out_of_range);
    CHECK_THROWS_AS(point_on_link(s, params, 1, 1, -0.1), std::out_of_range);
    CHECK_THROWS_AS(point_on_link(s, params, 0, 1, 0.5), std::out_of_range);
}

TEST_CASE("point velocities") {
    const auto params = ScallopPairParams::from_lambda(3.0, 0.5, {});
    SystemState s;
    StateRates r;
    CHECK(point_velocity(s, r, params, 1, 2, 1.0).norm() == 0.0);
    r.xdot1 = 1;
    for (int j : {1, 2})
        for (double sv : {0.0, 1.3, 3.0}) CHECK((point_velocity(s, r, params, 1, j, sv) - Vec2(1, 0)).norm() < 1e-15);
    r = StateRates{};
    r.thetadot1 = 1;
    CHECK((point_velocity(s, r, params, 1, 1, 2.0) - Vec2(0, 2)).norm() < 1e-15);

    // the opening rate only moves the second link
    r = StateRates{};
    r.sigmadot1 = 1;
    CHECK(point_velocity(s, r, params, 1, 1, 2.0).norm() == 0.0);
    CHECK(point_velocity(s, r, params, 1, 2, 2.0).norm() == Approx(2.0));

    // linear in the rates and consistent with differentiating positions
    std::mt19937_64 rng(11);
    for (int k = 0; k < 50; ++k) {
        const SystemState st = testing_support::random_state(rng);
        const StateRates a = testing_support::random_rates(rng), b = testing_support::random_rates(rng);
        const StateRates sum = StateRates::from_vector(a.to_vector() + 2.0 * b.to_vector());
        for (int i : {1, 2})
            for (int j : {1, 2}) {
                const Vec2 lhs = point_velocity(st, sum, params, i, j, 1.1);
                const Vec2 rhs = point_velocity(st, a, params, i, j, 1.1) + 2.0 * point_velocity(st, b, params, i, j, 1.1);
                CHECK((lhs - rhs).norm() < 1e-12);
                const double h = 1e-6;
                const auto moved = [&](double t) {
                    return point_on_link(SystemState::from_vector(st.to_vector() + t * a.to_vector()), params, i, j, 1.1);
                };
                const Vec2 fd = (moved(h) - moved(-h)) / (2 * h);
                CHECK((fd - point_velocity(st, a, params, i, j, 1.1)).norm() < 1e-7);
            }
    }
}

TEST_CASE("parameters") {
    const auto p = ScallopPairParams::from_geometry(10.0, 1.0, 0.25, {1.0, 2.0});
    CHECK(p.lambda() == Approx(std::log(0.1) / std::log(0.025)).epsilon(1e-15));
    CHECK(p.lambda() == Approx(0.624196).epsilon(1e-6));
    CHECK(p.big_lambda() == Approx(1.0 - p.lambda() * p.lambda()));
    CHECK(p.link_length() == 10.0);

    const auto q = ScallopPairParams::from_geometry(10.0, 1.0, 0.25, {1.0, 2.0}, LengthConvention::paper_nondimensional);
    CHECK(q.link_length() == 1.0);
    CHECK(q.distance() == Approx(0.1));
    CHECK(q.thickness() == Approx(0.025));
    CHECK(q.lambda() == Approx(p.lambda()).epsilon(1e-15));

    CHECK_THROWS_AS(ScallopPairParams::from_geometry(10.0, 20.0, 0.25, {}), std::invalid_argument);
    CHECK_THROWS_AS(ScallopPairParams::from_geometry(10.0, 0.1, 0.25, {}), std::invalid_argument);
    CHECK_THROWS_AS(ScallopPairParams::from_geometry(-1.0, 1.0, 0.25, {}), std::invalid_argument);

    const auto r = ScallopPairParams::from_lambda(2.0, 0.3, {});
    CHECK(std::log(r.distance() / r.link_length()) / std::log(r.thickness() / r.link_length()) ==
          Approx(0.3).epsilon(1e-12));
    CHECK(r.with_lambda(0.0).lambda() == 0.0);
    CHECK_THROWS_AS(r.with_lambda(1.0), std::invalid_argument);
}

TEST_CASE("state round trips and validation") {
    std::mt19937_64 rng(3);
    const SystemState s = testing_support::random_state(rng);
    CHECK(SystemState::from_vector(s.to_vector()).to_vector() == s.to_vector());
    CHECK((s.midpoint() - 0.5 * (Vec2(s.x1, s.y1) + Vec2(s.x2, s.y2))).norm() < 1e-15);
    CHECK_NOTHROW(validate_state(s));

    SystemState bad = s;
    bad.sigma1 = 0.0;
    CHECK_THROWS_AS(validate_state(bad), std::invalid_argument);
    bad = s;
    bad.x2 = std::nan("");
    CHECK_THROWS_AS(validate_state(bad), std::invalid_argument);

    SystemState wide;
    CHECK(validity_warnings(wide).empty());
    wide.sigma2 = pi + 0.8;
    CHECK(validity_warnings(wide).size() == 1);
}
