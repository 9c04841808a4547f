// Command-line driver for the coupled-scallop toolkit.
//
//   scallops phase-sweep  [--config f] [--out dir] [--dt s] [--periods n] [--convention paper|dimensional]
//   scallops report       [...] [--phi rad]
//   scallops lambda-study [...] [--kappa k]
//   scallops null-tests   [...]
//   scallops integrate    [...] [--phi rad] [--stroke sinusoidal|square]
//
// Exit codes: 0 success, 2 invalid configuration, 3 singular resistance, 4 failed null test.

#include "scallops/errors.hpp"
#include "scallops/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>

namespace fs = std::filesystem;
using scallops::RunConfig;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSingular = 3;
constexpr int kExitNullFailure = 4;

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<double> dt;
    std::optional<int> periods;
    std::optional<std::string> convention;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON run configuration");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--dt", flags.dt, "integration step [s] (default period / 2000)");
    cmd->add_option("--periods", flags.periods, "number of stroke periods");
    cmd->add_option("--convention", flags.convention, "length convention: paper or dimensional");
}

RunConfig load_config(const CommonFlags& flags) {
    RunConfig config;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw scallops::ConfigError("cannot open config file " + flags.config_path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw scallops::ConfigError(std::string("malformed config: ") + e.what());
        }
        config = RunConfig::from_json(doc);
    }
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    if (flags.dt) config.dt = *flags.dt;
    if (flags.periods) config.n_periods = *flags.periods;
    if (flags.convention) config.convention = scallops::parse_convention(*flags.convention);
    config.validate();
    return config;
}

fs::path prepare_output(const RunConfig& config) {
    fs::path dir(config.output_dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

int run_phase_sweep(const RunConfig& config) {
    const auto result = scallops::phase_sweep(config);
    const fs::path dir = prepare_output(config);
    {
        std::ofstream csv(dir / "phase_sweep.csv");
        scallops::write_phase_sweep_csv(csv, result);
    }
    write_text(dir / "phase_sweep.svg", scallops::phase_sweep_svg(result));

    std::printf("%10s %16s %16s %10s\n", "phi", "delta_m_numeric", "delta_m_theory", "rel_err");
    for (const auto& r : result.records) {
        if (!r.ok()) {
            std::fprintf(stderr, "phi = %.6f failed: %s\n", r.phi, r.error.c_str());
            continue;
        }
        std::printf("%10.6f %16.6e %16.6e %10.4f\n", r.phi, r.delta_m_numeric, r.delta_m_theory, r.relative_error);
    }
    std::printf("argmax phi = %.6f, sin^2 fit A = %.6e, R^2 = %.6f\n", result.argmax_phi, result.fit_amplitude,
                result.fit_r_squared);
    return 0;
}

int run_report(const RunConfig& config, std::optional<double> phi) {
    const auto report = scallops::theory_vs_numeric_report(config, phi);
    const fs::path dir = prepare_output(config);
    const std::string text = report.to_json().dump(2) + "\n";
    write_text(dir / "report.json", text);
    std::cout << text;
    return 0;
}

int run_lambda_study(const RunConfig& config) {
    const auto study = scallops::lambda_study(config);
    const fs::path dir = prepare_output(config);
    {
        std::ofstream csv(dir / "lambda_study.csv");
        scallops::write_lambda_study_csv(csv, study);
    }
    write_text(dir / "lambda_study.svg", scallops::lambda_study_svg(study));
    std::cout << study.to_json().dump(2) << "\n";
    return 0;
}

int run_null_tests(const RunConfig& config) {
    const auto report = scallops::null_tests(config);
    const fs::path dir = prepare_output(config);
    const std::string text = report.to_json().dump(2) + "\n";
    write_text(dir / "null_tests.json", text);
    for (const auto& c : report.checks)
        std::printf("[%s] %s: %.3e (tolerance %.3e)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.drift,
                    c.tolerance);
    return report.all_passed() ? 0 : kExitNullFailure;
}

int run_integrate(const RunConfig& config, double phi, const std::string& stroke_kind) {
    const auto params = config.params();
    const auto start = scallops::perturbed_aligned_state(config.eps, phi, config.theta0);
    scallops::ControlStroke stroke = stroke_kind == "square"
                                         ? scallops::ControlStroke::square(config.gamma(), config.gamma(), config.tau())
                                         : scallops::ControlStroke::sinusoidal(config.eps, config.omega_freq, phi);
    double dt = config.dt;
    if (stroke_kind == "square" && dt <= 0.0) dt = config.tau() / 500.0;
    const auto traj = scallops::integrate(start, params, stroke, config.n_periods, dt);

    const fs::path dir = prepare_output(config);
    std::ofstream csv(dir / "trajectory.csv");
    scallops::write_trajectory_csv(csv, traj);
    for (const auto& w : scallops::validity_warnings(traj.states.back())) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("delta_m = %.10e  rotation = (%.6e, %.6e)  min|detR| = %.6e\n", traj.summary.delta_m,
                traj.summary.rotation1, traj.summary.rotation2, traj.summary.min_abs_det);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two hydrodynamically coupled scallops: sweeps, reports and trajectories"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::optional<double> phi;
    double kappa_flag = 0.0;
    std::string stroke_kind = "sinusoidal";

    auto* sweep = app.add_subcommand("phase-sweep", "net displacement over the reference phases");
    auto* report = app.add_subcommand("report", "leading-order theory vs numerical integration");
    auto* lambda = app.add_subcommand("lambda-study", "C~(lambda) and the kappa interaction band");
    auto* nulls = app.add_subcommand("null-tests", "scallop-theorem null checks");
    auto* integ = app.add_subcommand("integrate", "export a single trajectory");
    for (auto* cmd : {sweep, report, lambda, nulls, integ}) add_common(cmd, flags);
    report->add_option("--phi", phi, "phase difference [rad] (default pi/2)");
    integ->add_option("--phi", phi, "phase difference [rad] (default pi/2)");
    integ->add_option("--stroke", stroke_kind, "sinusoidal or square")->check(CLI::IsMember({"sinusoidal", "square"}));
    lambda->add_option("--kappa", kappa_flag, "band parameter kappa (default from config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        RunConfig config = load_config(flags);
        if (kappa_flag > 0.0) config.kappa = kappa_flag;
        if (*sweep) return run_phase_sweep(config);
        if (*report) return run_report(config, phi);
        if (*lambda) return run_lambda_study(config);
        if (*nulls) return run_null_tests(config);
        if (*integ) return run_integrate(config, phi.value_or(std::numbers::pi / 2), stroke_kind);
    } catch (const scallops::SingularResistance& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSingular;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
