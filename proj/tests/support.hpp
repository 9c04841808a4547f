#pragma once

#include "scallops/geometry.hpp"

#include <numbers>
#include <random>

namespace testing_support {

inline scallops::SystemState random_state(std::mt19937_64& rng, double opening_spread = 1.0) {
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> open(std::numbers::pi - opening_spread, std::numbers::pi + opening_spread);
    scallops::SystemState s;
    s.x1 = pos(rng);
    s.y1 = pos(rng);
    s.theta1 = ang(rng);
    s.x2 = pos(rng);
    s.y2 = pos(rng);
    s.theta2 = ang(rng);
    s.sigma1 = open(rng);
    s.sigma2 = open(rng);
    return s;
}

inline scallops::StateRates random_rates(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    scallops::StateVector v;
    for (int k = 0; k < 8; ++k) v[k] = n(rng);
    return scallops::StateRates::from_vector(v);
}

inline scallops::ScallopPairParams reference_params(double lambda = 0.6241963505817848) {
    return scallops::ScallopPairParams::from_lambda(1.0, lambda, {1.0, 2.0});
}

}  // namespace testing_support
