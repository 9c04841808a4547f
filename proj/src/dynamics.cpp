#include "scallops/dynamics.hpp"

#include "scallops/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scallops {

namespace {

using Mat8 = Eigen::Matrix<double, 8, 8>;

/// Factorize R once and solve for -R^{-1} Phi.
Eigen::Matrix<double, 6, 2> mobility_columns(const SystemState& state, const ScallopPairParams& params) {
    const ResistanceAssembly assembly = assemble(state, params);
    if (assembly.is_singular()) throw SingularResistance(assembly.det_R, assembly.singularity_floor());
    return -assembly.R.partialPivLu().solve(assembly.Phi);
}

void check_open_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::domain_error("lambda must lie in (0, 1)");
}

double sin_half_squared(double phi) {
    const double s = std::sin(0.5 * phi);
    return s * s;
}

}  // namespace

StateRates solve_rates(const SystemState& state, const ScallopPairParams& params, ControlPair controls) {
    const Eigen::Matrix<double, 6, 2> M = mobility_columns(state, params);
    const Eigen::Vector2d u(controls.u1, controls.u2);
    StateVector rates;
    rates.head<6>() = M * u;
    rates.tail<2>() = u;
    return StateRates::from_vector(rates);
}

std::pair<StateVector, StateVector> control_vector_fields(const SystemState& state,
                                                          const ScallopPairParams& params) {
    const Eigen::Matrix<double, 6, 2> M = mobility_columns(state, params);
    StateVector v1 = StateVector::Zero();
    StateVector v2 = StateVector::Zero();
    v1.head<6>() = M.col(0);
    v1[6] = 1.0;
    v2.head<6>() = M.col(1);
    v2[7] = 1.0;
    return {v1, v2};
}

StateVector control_vector_field(const SystemState& state, const ScallopPairParams& params, int k) {
    check_index(k, "control");
    auto [v1, v2] = control_vector_fields(state, params);
    return k == 1 ? v1 : v2;
}

namespace {

StateVector bracket_at_step(const SystemState& state, const ScallopPairParams& params, double step,
                            const StateVector& v1, const StateVector& v2) {
    Mat8 D1;
    Mat8 D2;
    const StateVector q = state.to_vector();
    for (int m = 0; m < 8; ++m) {
        StateVector plus = q;
        StateVector minus = q;
        plus[m] += step;
        minus[m] -= step;
        const auto [p1, p2] = control_vector_fields(SystemState::from_vector(plus), params);
        const auto [m1, m2] = control_vector_fields(SystemState::from_vector(minus), params);
        D1.col(m) = (p1 - m1) / (2.0 * step);
        D2.col(m) = (p2 - m2) / (2.0 * step);
    }
    return D2 * v1 - D1 * v2;
}

}  // namespace

StateVector lie_bracket_numeric(const SystemState& state, const ScallopPairParams& params, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    const auto [v1, v2] = control_vector_fields(state, params);
    const StateVector coarse = bracket_at_step(state, params, step, v1, v2);
    const StateVector fine = bracket_at_step(state, params, 0.5 * step, v1, v2);

    // absolute floor for brackets that vanish identically (e.g. uncoupled scallops)
    const double floor = 1e-9 * std::max(1.0, v1.norm() * v2.norm());
    const double change = (coarse - fine).norm();
    if (change > 1e-4 * std::max(fine.norm(), floor))
        throw FDUnstable("Lie bracket changed by " + std::to_string(change) + " under step halving");
    return fine;
}

ExpansionCoefficients expansion_coefficients(double phi, double theta0, const ScallopPairParams& params) {
    const double lambda = params.lambda();
    check_open_lambda(lambda);
    const double L = params.link_length();
    const double cpa = params.c_par();
    const double cpe = params.c_perp();

    const double s2 = sin_half_squared(phi);
    const double prefactor = L * lambda * s2 / (64.0 * cpa * cpe * (1.0 - lambda * lambda));
    const double self = cpe * cpe * (2.0 + lambda) - cpa * cpe;
    const double cross_term = 3.0 * cpa * cpa - 2.0 * cpe * cpa - cpe * cpe;
    const double first = prefactor * (self + std::cos(phi) * cross_term);
    const double second = prefactor * (cross_term + std::cos(phi) * self);

    ExpansionCoefficients c;
    c.xi1 = first * std::cos(theta0);
    c.eta1 = first * std::sin(theta0);
    c.vartheta = -lambda / (16.0 * (1.0 - lambda)) * s2;
    c.xi2 = second * std::cos(theta0);
    c.eta2 = second * std::sin(theta0);
    return c;
}

StateVector square_stroke_displacement_prediction(double gamma1, double gamma2, double tau, double eps,
                                                  double phi, double theta0, const ScallopPairParams& params) {
    const ExpansionCoefficients c = expansion_coefficients(phi, theta0, params);
    const double area = gamma1 * gamma2 * tau * tau;
    const double eps2 = eps * eps;
    StateVector delta;
    delta << c.xi1 * eps2, c.eta1 * eps2, c.vartheta * eps, c.xi2 * eps2, c.eta2 * eps2, c.vartheta * eps, 0.0, 0.0;
    return -area * delta;
}

double constant_C(const ScallopPairParams& params) {
    const double lambda = params.lambda();
    check_open_lambda(lambda);
    const double cpa = params.c_par();
    const double cpe = params.c_perp();
    return params.link_length() * lambda * (cpe * cpe * (1.0 + lambda) - 3.0 * cpa * cpe + 3.0 * cpa * cpa) /
           (128.0 * cpa * cpe * (1.0 - lambda * lambda));
}

double constant_C_tilde(double lambda, double link_length) {
    check_open_lambda(lambda);
    return link_length * lambda * (1.0 + 4.0 * lambda) / (256.0 * (1.0 - lambda * lambda));
}

double theoretical_midpoint_displacement(double phi, double eps, double gamma1, double gamma2, double tau,
                                         const ScallopPairParams& params) {
    const double s = std::sin(phi);
    return std::abs(constant_C(params) * gamma1 * gamma2) * tau * tau * eps * eps * s * s / 2.0;
}

LambdaBounds lambda_bounds(double kappa, double thickness, double link_length) {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    if (!(thickness > 0.0 && thickness < link_length)) throw std::invalid_argument("need 0 < a < L");
    const double log_ratio = std::log(thickness / link_length);

    LambdaBounds bounds;
    bounds.upper = -std::log(kappa) / log_ratio;
    bounds.lower = 1.0 - bounds.upper;
    bounds.kappa_min = std::sqrt(link_length / thickness);
    bounds.kappa_max = link_length / thickness;
    if (!(bounds.upper > 0.0 && bounds.upper < 1.0))
        throw std::invalid_argument("kappa = " + std::to_string(kappa) + " gives an upper bound outside (0, 1)");
    return bounds;
}

double estimate_lambda0(std::span<const SystemState> samples, const ScallopPairParams& params_template,
                        int resolution) {
    if (resolution < 1) throw std::invalid_argument("resolution must be positive");
    auto singular_somewhere = [&](double lambda) {
        const ScallopPairParams p = params_template.with_lambda(lambda);
        return std::any_of(samples.begin(), samples.end(),
                           [&](const SystemState& s) { return assemble(s, p).is_singular(); });
    };

    // grid k / resolution: doubling the resolution scans a superset of points
    double previous = 0.0;
    for (int k = 1; k < resolution; ++k) {
        const double lambda = static_cast<double>(k) / resolution;
        if (!singular_somewhere(lambda)) {
            previous = lambda;
            continue;
        }
        double lo = previous;
        double hi = lambda;
        for (int iter = 0; iter < 60 && hi - lo > 1e-12; ++iter) {
            const double mid = 0.5 * (lo + hi);
            (singular_somewhere(mid) ? hi : lo) = mid;
        }
        return hi;
    }
    return 1.0;
}

SystemState perturbed_aligned_state(double eps, double phi, double theta0, const Vec2& hinge1,
                                    const Vec2& hinge2) {
    SystemState s;
    s.x1 = hinge1.x();
    s.y1 = hinge1.y();
    s.theta1 = theta0;
    s.x2 = hinge2.x();
    s.y2 = hinge2.y();
    s.theta2 = theta0;
    s.sigma1 = std::numbers::pi + eps;
    s.sigma2 = std::numbers::pi + eps * std::cos(phi);
    return s;
}

}  // namespace scallops
