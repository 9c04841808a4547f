#pragma once

#include "scallops/integrator.hpp"

#include <json.hpp>

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace scallops {

/// Dimensional inputs as they appear in the config file.
struct PhysicalParams {
    double L_um = 10.0;
    double h_um = 1.0;
    double a_um = 0.25;
    double c_par = 1.0;   ///< N s / um^2
    double c_perp = 2.0;  ///< N s / um^2
};

/// The thirteen phases of the reference sweep, 0 .. pi.
std::vector<double> reference_phases();

struct RunConfig {
    PhysicalParams physical;
    double eps = 0.1;
    double omega_freq = 20.0;
    std::vector<double> phases = reference_phases();
    int n_periods = 1;
    double dt = 0.0;  ///< <= 0 selects period / 2000
    double theta0 = 0.0;
    LengthConvention convention = LengthConvention::paper_nondimensional;
    std::optional<double> lambda_override;
    double kappa = 10.0;
    std::string output_dir = "out";

    /// Parses the JSON document; unit-suffixed keys, unknown keys rejected. Throws ConfigError.
    static RunConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;

    /// Throws ConfigError when a field violates a module precondition.
    void validate() const;
    ScallopPairParams params() const;
    /// Square-stroke equivalent of the sinusoidal controls: gamma = eps omega, tau = pi / (2 omega).
    double gamma() const { return eps * omega_freq; }
    double tau() const;
};

LengthConvention parse_convention(const std::string& name);
std::string convention_name(LengthConvention c);

struct SweepRecord {
    double phi = 0.0;
    double delta_m_numeric = 0.0;
    double delta_m_theory = 0.0;
    double relative_error = 0.0;
    double rotation_net = 0.0;
    double runtime = 0.0;  ///< seconds; never written to output files
    std::string error;     ///< empty when the run succeeded

    bool ok() const { return error.empty(); }
};

/// |numeric - theory| / max(theory, 1e-300)
double relative_error(double numeric, double theory);

struct PhaseSweepResult {
    std::vector<SweepRecord> records;  ///< sorted by phi
    double argmax_phi = 0.0;
    double fit_amplitude = 0.0;  ///< least-squares A in delta ~ A sin^2(phi)
    double fit_r_squared = 0.0;
};

/// Integrate the sinusoidal stroke once per phase (concurrently) and pair each run with
/// the leading-order prediction. Failed phases keep their error message; others are unaffected.
PhaseSweepResult phase_sweep(const RunConfig& config);

void write_phase_sweep_csv(std::ostream& out, const PhaseSweepResult& result);
std::string phase_sweep_svg(const PhaseSweepResult& result);

struct TheoryVsNumericReport {
    double phi = 0.0;
    double lambda = 0.0;
    double delta_m_theory = 0.0;
    double delta_m_numeric = 0.0;
    std::optional<double> relative_error;  ///< |num - th| / th, undefined when the prediction vanishes
    std::optional<double> relative_error_vs_numeric;  ///< |num - th| / num
    LoopAreaReport areas;
    double richardson_change = 0.0;

    // doubled frequency, same eps
    double delta_m_theory_fixed_tau_2w = 0.0;    ///< tau held fixed: gamma1 gamma2 quadruples
    double delta_m_theory_matched_tau_2w = 0.0;  ///< tau = pi / (2 omega) follows omega
    double delta_m_numeric_2w = 0.0;
    double rate_independence_rel_diff = 0.0;

    nlohmann::json to_json() const;
};

/// Theory vs numerics at one phase, the optimal pi/2 unless given.
TheoryVsNumericReport theory_vs_numeric_report(const RunConfig& config, std::optional<double> phi = {});

struct LambdaStudy {
    double kappa = 0.0;
    LambdaBounds bounds;
    double c_tilde_lower = 0.0;
    double c_tilde_upper = 0.0;
    std::vector<double> lambdas;
    std::vector<double> c_tilde;
    bool strictly_increasing = false;
    bool band_bounds_hold = false;
    bool pole_detected = false;

    nlohmann::json to_json() const;
};

/// Tabulate C~ on (0, 1), derive the interaction band from kappa and check the ordering
/// C~(lower) < C~(lambda) < C~(upper) on the band. Throws std::invalid_argument when kappa
/// is outside (sqrt(L/a), L/a).
LambdaStudy lambda_study(const RunConfig& config, int grid_points = 199);

void write_lambda_study_csv(std::ostream& out, const LambdaStudy& study);
std::string lambda_study_svg(const LambdaStudy& study);

struct NullCheck {
    std::string name;
    double drift = 0.0;
    double tolerance = 0.0;
    double richardson_abs_error = 0.0;
    bool passed = false;
};

struct NullTestReport {
    std::vector<NullCheck> checks;
    /// (eps, delta_m at phi = 0, delta_m at phi = pi/2)
    std::vector<std::array<double, 3>> eps_sweep;
    double slope_out_of_phase = 0.0;
    std::optional<double> slope_synchronized;  ///< unset when every residual is at round-off level

    bool all_passed() const;
    nlohmann::json to_json() const;
};

/// Scallop-theorem checks: uncoupled periodic strokes and the synchronized (phi = 0) stroke.
NullTestReport null_tests(const RunConfig& config);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace scallops
