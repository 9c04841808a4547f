#pragma once

#include "scallops/hydrodynamics.hpp"

#include <span>

namespace scallops {

/// Shape angular velocities u_i = dsigma_i/dt.
struct ControlPair {
    double u1 = 0.0;
    double u2 = 0.0;
};

/// Position and orientation rates -R^{-1} Phi u, with the shape rates equal to u.
/// Throws SingularResistance when |det R| is below the relative singularity floor.
StateRates solve_rates(const SystemState& state, const ScallopPairParams& params, ControlPair controls);

/// Control vector field v_k (k = 1, 2) of the drift-less system qdot = u1 v1 + u2 v2.
StateVector control_vector_field(const SystemState& state, const ScallopPairParams& params, int k);

/// Both control fields from a single factorization of R.
std::pair<StateVector, StateVector> control_vector_fields(const SystemState& state,
                                                          const ScallopPairParams& params);

/// [v1, v2] = Dv2 v1 - Dv1 v2 with Jacobians from central differences over all eight
/// coordinates. The result is checked against a half-step evaluation and FDUnstable is
/// thrown when they differ by more than 1e-4 relative.
StateVector lie_bracket_numeric(const SystemState& state, const ScallopPairParams& params,
                                double step = 1e-5);

/// Leading-order expansion of [v1, v2] at the perturbed aligned configuration
/// (theta0, theta0, pi + eps, pi + eps cos(phi)).
/// Position entries scale as eps^2 (xi, eta), the rotation entry as eps (vartheta,
/// shared by both scallops).
struct ExpansionCoefficients {
    double xi1 = 0.0;
    double eta1 = 0.0;
    double vartheta = 0.0;
    double xi2 = 0.0;
    double eta2 = 0.0;
};

ExpansionCoefficients expansion_coefficients(double phi, double theta0, const ScallopPairParams& params);

/// Predicted state change after one square stroke: -gamma1 gamma2 tau^2 times the expanded bracket.
StateVector square_stroke_displacement_prediction(double gamma1, double gamma2, double tau, double eps,
                                                  double phi, double theta0, const ScallopPairParams& params);

/// Midpoint displacement constant C(L, lambda, C_par, C_perp).
/// Throws std::domain_error for lambda outside (0, 1).
double constant_C(const ScallopPairParams& params);

/// C with C_perp = 2 C_par: L lambda (1 + 4 lambda) / (256 (1 - lambda^2)).
double constant_C_tilde(double lambda, double link_length);

/// Leading-order net midpoint displacement |C| gamma1 gamma2 tau^2 eps^2 sin^2(phi) / 2.
double theoretical_midpoint_displacement(double phi, double eps, double gamma1, double gamma2, double tau,
                                         const ScallopPairParams& params);

/// Interaction band implied by kappa a < h < L / kappa.
struct LambdaBounds {
    double lower = 0.0;      ///< 1 - upper
    double upper = 0.0;      ///< -ln(kappa) / ln(a/L)
    double kappa_min = 0.0;  ///< sqrt(L/a): upper > 1/2 above this
    double kappa_max = 0.0;  ///< L/a: upper < 1 below this

    bool kappa_admissible(double kappa) const { return kappa > kappa_min && kappa < kappa_max; }
};

/// Throws std::invalid_argument unless kappa > 0, 0 < a < L and the upper bound lies in (0, 1).
LambdaBounds lambda_bounds(double kappa, double thickness, double link_length);

/// Empirical estimate of the coupling above which R becomes singular on the sampled
/// states. Scans the grid k / resolution inside (0, 1), then bisects inside the
/// first failing interval. Returns 1 when no sampled state is singular.
double estimate_lambda0(std::span<const SystemState> samples, const ScallopPairParams& params_template,
                        int resolution);

/// Initial condition theta_i = theta0, sigma_i = pi + eps cos((i-1) phi).
SystemState perturbed_aligned_state(double eps, double phi, double theta0, const Vec2& hinge1 = Vec2::Zero(),
                                    const Vec2& hinge2 = Vec2::Zero());

}  // namespace scallops
