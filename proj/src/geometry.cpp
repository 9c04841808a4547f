#include "scallops/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scallops {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void check_drag(const DragCoefficients& drag) {
    if (!positive_finite(drag.parallel) || !positive_finite(drag.perpendicular))
        throw std::invalid_argument("drag coefficients must be positive");
}

}  // namespace

void check_index(int index, const char* what) {
    if (index != 1 && index != 2)
        throw std::out_of_range(std::string(what) + " index must be 1 or 2, got " + std::to_string(index));
}

ScallopPairParams::ScallopPairParams(double link_length, double distance, double thickness,
                                     DragCoefficients drag, double lambda)
    : link_length_(link_length), distance_(distance), thickness_(thickness), drag_(drag), lambda_(lambda) {}

ScallopPairParams ScallopPairParams::from_geometry(double link_length, double distance, double thickness,
                                                   DragCoefficients drag, LengthConvention convention) {
    if (!positive_finite(link_length) || !positive_finite(distance) || !positive_finite(thickness))
        throw std::invalid_argument("L, h and a must be positive");
    check_drag(drag);
    if (thickness >= link_length) throw std::invalid_argument("thickness a must be smaller than L");

    const double lambda = std::log(distance / link_length) / std::log(thickness / link_length);
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw std::invalid_argument("interaction strength lambda = " + std::to_string(lambda) +
                                    " outside [0, 1); need a < h <= L");

    if (convention == LengthConvention::paper_nondimensional)
        return ScallopPairParams(1.0, distance / link_length, thickness / link_length, drag, lambda);
    return ScallopPairParams(link_length, distance, thickness, drag, lambda);
}

ScallopPairParams ScallopPairParams::from_lambda(double link_length, double lambda, DragCoefficients drag,
                                                 double thickness_ratio) {
    if (!positive_finite(link_length)) throw std::invalid_argument("L must be positive");
    check_drag(drag);
    if (!(thickness_ratio > 0.0 && thickness_ratio < 1.0))
        throw std::invalid_argument("thickness ratio a/L must lie in (0, 1)");
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw std::invalid_argument("lambda must lie in [0, 1)");
    const double distance = link_length * std::pow(thickness_ratio, lambda);
    return ScallopPairParams(link_length, distance, thickness_ratio * link_length, drag, lambda);
}

ScallopPairParams ScallopPairParams::with_lambda(double lambda) const {
    return from_lambda(link_length_, lambda, drag_, thickness_ / link_length_);
}

Vec2 SystemState::hinge(int i) const {
    check_index(i, "scallop");
    return i == 1 ? Vec2(x1, y1) : Vec2(x2, y2);
}

double SystemState::theta(int i) const {
    check_index(i, "scallop");
    return i == 1 ? theta1 : theta2;
}

double SystemState::sigma(int i) const {
    check_index(i, "scallop");
    return i == 1 ? sigma1 : sigma2;
}

StateVector SystemState::to_vector() const {
    StateVector v;
    v << x1, y1, theta1, x2, y2, theta2, sigma1, sigma2;
    return v;
}

SystemState SystemState::from_vector(const StateVector& v) {
    return SystemState{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

Vec2 StateRates::hinge_velocity(int i) const {
    check_index(i, "scallop");
    return i == 1 ? Vec2(xdot1, ydot1) : Vec2(xdot2, ydot2);
}

double StateRates::thetadot(int i) const {
    check_index(i, "scallop");
    return i == 1 ? thetadot1 : thetadot2;
}

double StateRates::sigmadot(int i) const {
    check_index(i, "scallop");
    return i == 1 ? sigmadot1 : sigmadot2;
}

StateVector StateRates::to_vector() const {
    StateVector v;
    v << xdot1, ydot1, thetadot1, xdot2, ydot2, thetadot2, sigmadot1, sigmadot2;
    return v;
}

StateRates StateRates::from_vector(const StateVector& v) {
    return StateRates{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

Vec2 link_direction(double theta, double sigma, int j) {
    check_index(j, "link");
    const double angle = theta + (j - 1) * sigma;
    return Vec2(std::cos(angle), std::sin(angle));
}

Vec2 link_direction(const SystemState& state, int i, int j) {
    return link_direction(state.theta(i), state.sigma(i), j);
}

namespace {

void check_arclength(const ScallopPairParams& params, double s) {
    if (!(s >= 0.0 && s <= params.link_length()))
        throw std::out_of_range("arclength s = " + std::to_string(s) + " outside [0, L]");
}

}  // namespace

Vec2 point_on_link(const SystemState& state, const ScallopPairParams& params, int i, int j, double s) {
    check_arclength(params, s);
    return state.hinge(i) + s * link_direction(state, i, j);
}

Vec2 point_velocity(const SystemState& state, const StateRates& rates, const ScallopPairParams& params,
                    int i, int j, double s) {
    check_arclength(params, s);
    const double spin = rates.thetadot(i) + (j - 1) * rates.sigmadot(i);
    return rates.hinge_velocity(i) + s * spin * perp(link_direction(state, i, j));
}

void validate_state(const SystemState& state) {
    if (!state.to_vector().allFinite()) throw std::invalid_argument("state has non-finite coordinates");
    for (int i : {1, 2}) {
        const double sigma = state.sigma(i);
        if (!(sigma > 0.0 && sigma < 2.0 * std::numbers::pi))
            throw std::invalid_argument("opening angle sigma" + std::to_string(i) + " = " + std::to_string(sigma) +
                                        " outside (0, 2 pi)");
    }
}

std::vector<std::string> validity_warnings(const SystemState& state, double window) {
    std::vector<std::string> warnings;
    for (int i : {1, 2}) {
        const double offset = std::abs(state.sigma(i) - std::numbers::pi);
        if (offset > window)
            warnings.push_back("sigma" + std::to_string(i) + " is " + std::to_string(offset) +
                               " rad from pi; the near-aligned interaction model is inaccurate there");
    }
    return warnings;
}

}  // namespace scallops
