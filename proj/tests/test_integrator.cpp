#include "scallops/errors.hpp"
#include "scallops/integrator.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

using namespace scallops;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

namespace {

const ScallopPairParams kRef = testing_support::reference_params();

double pose_distance(const SystemState& a, const SystemState& b) {
    return (a.to_vector() - b.to_vector()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("control strokes") {
    const auto sq = ControlStroke::square(2.0, 3.0, 0.5);
    CHECK(sq.period() == 2.0);
    const ControlPair a = control_at(sq, 0.25);
    CHECK(a.u1 == 0.0);
    CHECK(a.u2 == -3.0);
    const ControlPair b = control_at(sq, 4 * 0.5 + 0.25);
    CHECK(b.u1 == 0.0);
    CHECK(b.u2 == -3.0);
    CHECK(control_at(sq, 0.75).u1 == -2.0);
    CHECK(control_at(sq, 1.25).u2 == 3.0);
    CHECK(control_at(sq, 1.75).u1 == 2.0);
    // right-continuous at the switches
    CHECK(control_at(sq, 0.5).u1 == -2.0);
    CHECK_THROWS_AS(control_at(sq, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(ControlStroke::square(1, 1, 0.0), std::invalid_argument);

    const auto sn = ControlStroke::sinusoidal(0.1, 20.0, 0.9);
    CHECK(sn.period() == Approx(2 * pi / 20));
    const ControlPair c = control_at(sn, 0.0);
    CHECK(c.u1 == 0.0);
    CHECK(c.u2 == Approx(-0.1 * 20 * std::sin(0.9)));
    // u_i is the derivative of pi + eps cos(omega t + (i-1) phi)
    const double t = 0.137, h = 1e-6;
    const auto sigma2 = [&](double tt) { return pi + 0.1 * std::cos(20 * tt + 0.9); };
    CHECK(control_at(sn, t).u2 == Approx((sigma2(t + h) - sigma2(t - h)) / (2 * h)).epsilon(1e-8));

    // the reversed stroke is the mirror image with flipped sign
    const auto rev = sq.reversed();
    CHECK(rev.reversed().is_reversed() == false);
    for (double s : {0.1, 0.6, 1.1, 1.9}) {
        const ControlPair f = sq.at(2.0 - s), r = rev.at(s);
        CHECK(r.u1 == -f.u1);
        CHECK(r.u2 == -f.u2);
    }
    CHECK(ControlStroke::square(1, 1, pi / 40).period() == Approx(ControlStroke::sinusoidal(0.1, 20, 0).period()));
}

TEST_CASE("no controls, no motion") {
    std::mt19937_64 rng(9);
    const SystemState s = testing_support::random_state(rng);
    const Trajectory tr = integrate(s, kRef, ControlStroke::square(0.0, 0.0, 0.1), 2, 0.001);
    for (const SystemState& st : tr.states) CHECK(st.to_vector() == s.to_vector());
    CHECK(tr.states.front().to_vector() == s.to_vector());
    for (std::size_t k = 1; k < tr.times.size(); ++k) CHECK(tr.times[k] > tr.times[k - 1]);
}

TEST_CASE("shape closure") {
    const SystemState s = perturbed_aligned_state(0.1, pi / 3, 0.2);
    const Trajectory sn = integrate(s, kRef, ControlStroke::sinusoidal(0.1, 20.0, pi / 3), 3);
    CHECK(sn.summary.shape_closure_error < 1e-12);
    const Trajectory sq = integrate(s, kRef, ControlStroke::square(2.0, 2.0, pi / 40), 2);
    CHECK(sq.summary.shape_closure_error < 1e-12);
    CHECK(sq.summary.min_det_margin > 1.0);
    CHECK(sn.summary.min_det_margin > 1.0);
}

TEST_CASE("time reversal undoes a square stroke") {
    std::mt19937_64 rng(10);
    for (int k = 0; k < 5; ++k) {
        const SystemState s = testing_support::random_state(rng, 0.3);
        const auto stroke = ControlStroke::square(1.5, 2.5, 0.05);
        const Trajectory fwd = integrate(s, kRef, stroke, 1, 0.05 / 50);
        const Trajectory back = integrate(fwd.states.back(), kRef, stroke.reversed(), 1, 0.05 / 50);
        CHECK(pose_distance(back.states.back(), s) < 1e-8);
        CHECK(pose_distance(fwd.states.back(), s) > 1e-8);
    }
}

TEST_CASE("uncoupled scallops do not swim") {
    const auto decoupled = kRef.with_lambda(0.0);
    const SystemState s = perturbed_aligned_state(0.1, pi / 2, 0.4);
    const Trajectory tr = integrate(s, decoupled, ControlStroke::sinusoidal(0.1, 20.0, pi / 2), 1);
    CHECK(tr.summary.delta_m < 1e-9);
    CHECK(std::abs(tr.summary.rotation1) < 1e-9);
    CHECK(std::abs(tr.summary.rotation2) < 1e-9);
}

TEST_CASE("reference out-of-phase stroke") {
    const SystemState s = perturbed_aligned_state(0.1, pi / 2, 0.0);
    const Trajectory tr = integrate(s, kRef, ControlStroke::sinusoidal(0.1, 20.0, pi / 2), 1);
    CHECK(tr.summary.delta_m == Approx(2.0318e-6).epsilon(0.02));
    CHECK(tr.summary.richardson_change < kRichardsonTolerance);
    CHECK(tr.summary.richardson_abs_error > 0.0);
}

TEST_CASE("square stroke moves opposite to the bracket") {
    // the clockwise loop displaces by -gamma1 gamma2 tau^2 [v1, v2]
    const double eps = 0.05, tau = 1e-3;
    for (double phi : {pi / 4, pi / 2, 3 * pi / 4}) {
        const SystemState s = perturbed_aligned_state(eps, phi, 0.0);
        const Trajectory tr = integrate_fixed_step(s, kRef, ControlStroke::square(1.0, 1.0, tau), tau / 20, 80);
        const StateVector moved = tr.states.back().to_vector() - s.to_vector();
        const StateVector predicted = -tau * tau * lie_bracket_numeric(s, kRef);
        CHECK(moved.head<6>().dot(predicted.head<6>()) > 0.0);
        CHECK((moved - predicted).norm() < 0.05 * predicted.norm());
        // counterclockwise loop reverses the drift
        const Trajectory ccw = integrate_fixed_step(s, kRef, ControlStroke::square(-1.0, 1.0, tau), tau / 20, 80);
        const StateVector back = ccw.states.back().to_vector() - s.to_vector();
        CHECK(back.head<6>().dot(predicted.head<6>()) < 0.0);
    }
}

TEST_CASE("step policy") {
    const SystemState s = perturbed_aligned_state(0.1, pi / 2, 0.0);
    const auto sq = ControlStroke::square(2.0, 2.0, 0.1);
    CHECK_THROWS_AS(integrate(s, kRef, sq, 1, 0.03), std::invalid_argument);
    CHECK_THROWS_AS(integrate(s, kRef, sq, 1, 0.01), std::invalid_argument);  // above period / 200
    CHECK_THROWS_AS(integrate(s, kRef, sq, 0, 0.001), std::invalid_argument);
    CHECK_NOTHROW(integrate(s, kRef, sq, 1, 0.001));

    // even a wide stroke at the coarsest admissible mesh passes the step-halving check
    const SystemState wide = perturbed_aligned_state(1.5, pi / 2, 0.0);
    const Trajectory tr = integrate(wide, kRef, ControlStroke::sinusoidal(1.5, 20.0, pi / 2), 1, 2 * pi / 20 / 200);
    CHECK(tr.summary.richardson_change < 1e-6);
}

TEST_CASE("singular resistance aborts with the failure time") {
    const auto touching = kRef.with_lambda(0.999999);
    const SystemState s = perturbed_aligned_state(0.1, pi / 2, 0.0);
    try {
        integrate(s, touching, ControlStroke::sinusoidal(0.1, 20.0, pi / 2), 1);
        FAIL("expected a singular resistance matrix");
    } catch (const SingularResistance& e) {
        CHECK(e.time() >= 0.0);
    }
}

TEST_CASE("fourth-order convergence") {
    const SystemState s = perturbed_aligned_state(0.1, pi / 2, 0.0);
    const auto stroke = ControlStroke::sinusoidal(0.1, 20.0, pi / 2);
    const double T = stroke.period();
    const Vec2 ref = integrate_fixed_step(s, kRef, stroke, T / 3200, 3200).summary.midpoint_displacement;
    std::vector<double> dts, errs;
    for (long n : {25, 50, 100, 200}) {
        dts.push_back(T / n);
        errs.push_back((integrate_fixed_step(s, kRef, stroke, T / n, n).summary.midpoint_displacement - ref).norm());
    }
    const double slope = std::log(errs.front() / errs.back()) / std::log(dts.front() / dts.back());
    CHECK(slope == Approx(4.0).epsilon(0.3 / 4.0));
}

TEST_CASE("trajectory csv") {
    const SystemState s = perturbed_aligned_state(0.1, pi / 2, 0.0);
    const Trajectory tr = integrate_fixed_step(s, kRef, ControlStroke::sinusoidal(0.1, 20.0, pi / 2), 0.001, 5);
    std::ostringstream out;
    write_trajectory_csv(out, tr);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x1,y1,theta1,x2,y2,theta2,sigma1,sigma2,detR");
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string f;
        std::vector<double> vals;
        while (std::getline(fields, f, ',')) vals.push_back(std::stod(f));
        REQUIRE(vals.size() == 10);
        CHECK(vals[7] == tr.states[rows].sigma1);  // 17 digits round-trip exactly
        CHECK(vals[9] == tr.det_history[rows]);
        ++rows;
    }
    CHECK(rows == 6);
}

TEST_CASE("loop areas") {
    const LoopAreaReport r = square_vs_smooth_area_report(0.1, 20.0);
    CHECK(r.square_area == Approx(0.024674).epsilon(1e-5));
    CHECK(r.circle_area == Approx(0.031416).epsilon(1e-5));
    CHECK(r.relative_error == Approx(0.21).epsilon(0.01 / 0.21));
    CHECK(r.ratio == Approx(4 / pi).epsilon(1e-14));
    const LoopAreaReport tiny = square_vs_smooth_area_report(1e-6, 3.0);
    CHECK(tiny.ratio == Approx(4 / pi).epsilon(1e-14));
    CHECK(tiny.circle_area < 1e-11);
    CHECK_THROWS_AS(square_vs_smooth_area_report(0.0, 3.0), std::invalid_argument);
}
