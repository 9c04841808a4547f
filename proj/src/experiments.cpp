#include "scallops/experiments.hpp"

#include "scallops/errors.hpp"
#include "scallops/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>
#include <ostream>
#include <set>

namespace scallops {

using nlohmann::json;

std::vector<double> reference_phases() {
    constexpr double pi = std::numbers::pi;
    return {0.0,          pi / 8,      pi / 6,          pi / 4,      pi / 3,          3 * pi / 8, pi / 2,
            5 * pi / 8,   2 * pi / 3,  3 * pi / 4,      5 * pi / 6,  7 * pi / 8,      pi};
}

LengthConvention parse_convention(const std::string& name) {
    if (name == "paper" || name == "paper_nondimensional") return LengthConvention::paper_nondimensional;
    if (name == "dimensional") return LengthConvention::dimensional;
    throw ConfigError("unknown length convention '" + name + "' (expected paper or dimensional)");
}

std::string convention_name(LengthConvention c) {
    return c == LengthConvention::paper_nondimensional ? "paper" : "dimensional";
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "L_um",         "h_um",     "a_um",      "c_par_Ns_per_um2",  "c_perp_Ns_per_um2",
        "eps_rad",      "omega_freq_rad_per_s",  "phases_rad",        "n_periods",
        "dt_s",         "theta0_rad",            "length_convention", "lambda_override",
        "kappa",        "output_dir"};
    return keys;
}

template <typename T>
void read(const json& doc, const char* key, T& target) {
    if (!doc.contains(key)) return;
    try {
        target = doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

}  // namespace

RunConfig RunConfig::from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!known_keys().count(key)) throw ConfigError("unknown config field '" + key + "'");

    RunConfig c;
    read(doc, "L_um", c.physical.L_um);
    read(doc, "h_um", c.physical.h_um);
    read(doc, "a_um", c.physical.a_um);
    read(doc, "c_par_Ns_per_um2", c.physical.c_par);
    read(doc, "c_perp_Ns_per_um2", c.physical.c_perp);
    read(doc, "eps_rad", c.eps);
    read(doc, "omega_freq_rad_per_s", c.omega_freq);
    read(doc, "phases_rad", c.phases);
    read(doc, "n_periods", c.n_periods);
    read(doc, "dt_s", c.dt);
    read(doc, "theta0_rad", c.theta0);
    read(doc, "kappa", c.kappa);
    read(doc, "output_dir", c.output_dir);
    if (doc.contains("length_convention")) {
        std::string name;
        read(doc, "length_convention", name);
        c.convention = parse_convention(name);
    }
    if (doc.contains("lambda_override") && !doc.at("lambda_override").is_null()) {
        double lambda = 0.0;
        read(doc, "lambda_override", lambda);
        c.lambda_override = lambda;
    }
    return c;
}

json RunConfig::to_json() const {
    json doc;
    doc["L_um"] = physical.L_um;
    doc["h_um"] = physical.h_um;
    doc["a_um"] = physical.a_um;
    doc["c_par_Ns_per_um2"] = physical.c_par;
    doc["c_perp_Ns_per_um2"] = physical.c_perp;
    doc["eps_rad"] = eps;
    doc["omega_freq_rad_per_s"] = omega_freq;
    doc["phases_rad"] = phases;
    doc["n_periods"] = n_periods;
    doc["dt_s"] = dt;
    doc["theta0_rad"] = theta0;
    doc["length_convention"] = convention_name(convention);
    doc["lambda_override"] = lambda_override ? json(*lambda_override) : json(nullptr);
    doc["kappa"] = kappa;
    doc["output_dir"] = output_dir;
    return doc;
}

void RunConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(physical.L_um) || !positive(physical.h_um) || !positive(physical.a_um))
        throw ConfigError("L_um, h_um and a_um must be positive");
    if (!positive(physical.c_par) || !positive(physical.c_perp)) throw ConfigError("drag coefficients must be positive");
    if (!positive(eps) || eps >= std::numbers::pi) throw ConfigError("eps_rad must lie in (0, pi)");
    if (!positive(omega_freq)) throw ConfigError("omega_freq_rad_per_s must be positive");
    if (n_periods < 1) throw ConfigError("n_periods must be at least 1");
    if (!std::isfinite(dt) || dt > 2.0 * std::numbers::pi / omega_freq / 200.0)
        throw ConfigError("dt_s must not exceed period / 200 (use 0 for the default)");
    if (!std::isfinite(theta0)) throw ConfigError("theta0_rad must be finite");
    for (double phi : phases)
        if (!std::isfinite(phi)) throw ConfigError("phases_rad must be finite");
    if (!positive(kappa)) throw ConfigError("kappa must be positive");
    if (lambda_override && !(*lambda_override >= 0.0 && *lambda_override < 1.0))
        throw ConfigError("lambda_override must lie in [0, 1)");
    try {
        (void)params();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ScallopPairParams RunConfig::params() const {
    const DragCoefficients drag{physical.c_par, physical.c_perp};
    ScallopPairParams p =
        lambda_override ? ScallopPairParams::from_lambda(physical.L_um, *lambda_override, drag, physical.a_um / physical.L_um)
                        : ScallopPairParams::from_geometry(physical.L_um, physical.h_um, physical.a_um, drag);
    if (convention == LengthConvention::paper_nondimensional)
        p = ScallopPairParams::from_lambda(1.0, p.lambda(), drag, p.thickness() / p.link_length());
    return p;
}

double RunConfig::tau() const { return std::numbers::pi / (2.0 * omega_freq); }

double relative_error(double numeric, double theory) {
    return std::abs(numeric - theory) / std::max(theory, 1e-300);
}

namespace {

/// Leading-order prediction for the sinusoidal stroke; vanishes without coupling.
double predicted_delta(const RunConfig& config, const ScallopPairParams& params, double phi,
                       double omega_freq) {
    if (params.lambda() == 0.0) return 0.0;
    const double gamma = config.eps * omega_freq;
    const double tau = std::numbers::pi / (2.0 * omega_freq);
    return theoretical_midpoint_displacement(phi, config.eps, gamma, gamma, tau, params);
}

Trajectory run_sinusoidal(const RunConfig& config, const ScallopPairParams& params, double phi,
                          double omega_freq, double dt) {
    const SystemState start = perturbed_aligned_state(config.eps, phi, config.theta0);
    return integrate(start, params, ControlStroke::sinusoidal(config.eps, omega_freq, phi), config.n_periods, dt);
}

SweepRecord sweep_point(const RunConfig& config, const ScallopPairParams& params, double phi) {
    SweepRecord rec;
    rec.phi = phi;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Trajectory traj = run_sinusoidal(config, params, phi, config.omega_freq, config.dt);
        rec.delta_m_numeric = traj.summary.delta_m;
        rec.rotation_net = 0.5 * (traj.summary.rotation1 + traj.summary.rotation2);
        rec.delta_m_theory = predicted_delta(config, params, phi, config.omega_freq);
        rec.relative_error = relative_error(rec.delta_m_numeric, rec.delta_m_theory);
    } catch (const std::exception& e) {
        rec.error = e.what();
        rec.delta_m_numeric = rec.delta_m_theory = rec.relative_error = std::nan("");
    }
    rec.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

PhaseSweepResult phase_sweep(const RunConfig& config) {
    config.validate();
    const ScallopPairParams params = config.params();

    std::vector<std::future<SweepRecord>> jobs;
    jobs.reserve(config.phases.size());
    for (double phi : config.phases)
        jobs.push_back(std::async(std::launch::async, [&config, &params, phi] { return sweep_point(config, params, phi); }));

    PhaseSweepResult result;
    for (auto& job : jobs) result.records.push_back(job.get());
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const SweepRecord& a, const SweepRecord& b) { return a.phi < b.phi; });

    double best = -1.0;
    double sxy = 0.0, sxx = 0.0, sum_y = 0.0;
    int n = 0;
    for (const SweepRecord& r : result.records) {
        if (!r.ok()) continue;
        if (r.delta_m_numeric > best) {
            best = r.delta_m_numeric;
            result.argmax_phi = r.phi;
        }
        const double s = std::sin(r.phi) * std::sin(r.phi);
        sxx += s * s;
        sxy += s * r.delta_m_numeric;
        sum_y += r.delta_m_numeric;
        ++n;
    }
    if (n > 0 && sxx > 0.0) {
        result.fit_amplitude = sxy / sxx;
        const double mean = sum_y / n;
        double ss_res = 0.0, ss_tot = 0.0;
        for (const SweepRecord& r : result.records) {
            if (!r.ok()) continue;
            const double s = std::sin(r.phi) * std::sin(r.phi);
            ss_res += std::pow(r.delta_m_numeric - result.fit_amplitude * s, 2);
            ss_tot += std::pow(r.delta_m_numeric - mean, 2);
        }
        result.fit_r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    }
    return result;
}

void write_phase_sweep_csv(std::ostream& out, const PhaseSweepResult& result) {
    out << "phi,delta_m_numeric,delta_m_theory,rel_err\n";
    for (const SweepRecord& r : result.records)
        out << fmt17(r.phi) << ',' << fmt17(r.delta_m_numeric) << ',' << fmt17(r.delta_m_theory) << ','
            << fmt17(r.relative_error) << '\n';
}

std::string phase_sweep_svg(const PhaseSweepResult& result) {
    svg::Series numeric{"numerical delta_m", "#1f77b4", {}, {}, false};
    svg::Series theory{"leading-order theory", "#d62728", {}, {}, true};
    for (const SweepRecord& r : result.records) {
        if (!r.ok()) continue;
        numeric.x.push_back(r.phi);
        numeric.y.push_back(r.delta_m_numeric);
    }
    // smooth sin^2 curve scaled from the same predictions
    double scale = 0.0;
    for (const SweepRecord& r : result.records) {
        const double s = std::sin(r.phi) * std::sin(r.phi);
        if (r.ok() && s > 0.5) scale = r.delta_m_theory / s;
    }
    for (int k = 0; k <= 200; ++k) {
        const double phi = std::numbers::pi * k / 200.0;
        theory.x.push_back(phi);
        theory.y.push_back(scale * std::sin(phi) * std::sin(phi));
    }
    return svg::render({"Net midpoint displacement vs phase", "phase difference phi [rad]", "delta_m",
                        {numeric, theory}, std::nullopt, std::nullopt});
}

json TheoryVsNumericReport::to_json() const {
    json doc;
    doc["phi_rad"] = phi;
    doc["lambda"] = lambda;
    doc["delta_m_theory"] = delta_m_theory;
    doc["delta_m_numeric"] = delta_m_numeric;
    doc["relative_error"] = relative_error ? json(*relative_error) : json(nullptr);
    doc["relative_error_vs_numeric"] = relative_error_vs_numeric ? json(*relative_error_vs_numeric) : json(nullptr);
    doc["richardson_change"] = richardson_change;
    doc["loop_area"] = {{"square", areas.square_area},
                        {"circle", areas.circle_area},
                        {"relative_error", areas.relative_error},
                        {"ratio", areas.ratio}};
    doc["double_frequency"] = {{"delta_m_theory_fixed_tau", delta_m_theory_fixed_tau_2w},
                               {"delta_m_theory_matched_tau", delta_m_theory_matched_tau_2w},
                               {"delta_m_numeric", delta_m_numeric_2w},
                               {"rate_independence_rel_diff", rate_independence_rel_diff}};
    return doc;
}

TheoryVsNumericReport theory_vs_numeric_report(const RunConfig& config, std::optional<double> phi) {
    config.validate();
    const ScallopPairParams params = config.params();
    TheoryVsNumericReport rep;
    rep.phi = phi.value_or(std::numbers::pi / 2);
    rep.lambda = params.lambda();

    const Trajectory traj = run_sinusoidal(config, params, rep.phi, config.omega_freq, config.dt);
    rep.delta_m_numeric = traj.summary.delta_m;
    rep.richardson_change = traj.summary.richardson_change;
    rep.delta_m_theory = predicted_delta(config, params, rep.phi, config.omega_freq);
    if (rep.delta_m_theory > 0.0) {
        rep.relative_error = relative_error(rep.delta_m_numeric, rep.delta_m_theory);
        if (rep.delta_m_numeric > 0.0)
            rep.relative_error_vs_numeric = std::abs(rep.delta_m_numeric - rep.delta_m_theory) / rep.delta_m_numeric;
    }
    rep.areas = square_vs_smooth_area_report(config.eps, config.omega_freq);

    // Same stroke at twice the frequency: the step is halved so both runs share a mesh.
    const double w2 = 2.0 * config.omega_freq;
    const double dt2 = 0.5 * (config.dt > 0.0 ? config.dt : 2.0 * std::numbers::pi / config.omega_freq / kDefaultStepsPerPeriod);
    const Trajectory fast = run_sinusoidal(config, params, rep.phi, w2, dt2);
    rep.delta_m_numeric_2w = fast.summary.delta_m;
    rep.rate_independence_rel_diff =
        (fast.summary.midpoint_displacement - traj.summary.midpoint_displacement).norm() /
        std::max(traj.summary.delta_m, 1e-300);
    rep.delta_m_theory_matched_tau_2w = predicted_delta(config, params, rep.phi, w2);
    if (params.lambda() > 0.0) {
        const double gamma = config.eps * w2;
        rep.delta_m_theory_fixed_tau_2w =
            theoretical_midpoint_displacement(rep.phi, config.eps, gamma, gamma, config.tau(), params);
    }
    return rep;
}

json LambdaStudy::to_json() const {
    json doc;
    doc["kappa"] = kappa;
    doc["lambda_lower"] = bounds.lower;
    doc["lambda_upper"] = bounds.upper;
    doc["kappa_admissible"] = {bounds.kappa_min, bounds.kappa_max};
    doc["C_tilde_lower"] = c_tilde_lower;
    doc["C_tilde_upper"] = c_tilde_upper;
    doc["strictly_increasing"] = strictly_increasing;
    doc["band_bounds_hold"] = band_bounds_hold;
    doc["pole_at_one"] = pole_detected;
    return doc;
}

LambdaStudy lambda_study(const RunConfig& config, int grid_points) {
    config.validate();
    if (grid_points < 2) throw std::invalid_argument("need at least two grid points");
    const ScallopPairParams params = config.params();
    const double L = params.link_length();

    LambdaStudy st;
    st.kappa = config.kappa;
    st.bounds = lambda_bounds(config.kappa, params.thickness(), L);
    if (!st.bounds.kappa_admissible(config.kappa))
        throw std::invalid_argument("kappa = " + std::to_string(config.kappa) + " outside the admissible window (" +
                                    std::to_string(st.bounds.kappa_min) + ", " + std::to_string(st.bounds.kappa_max) +
                                    ")");
    st.c_tilde_lower = constant_C_tilde(st.bounds.lower, L);
    st.c_tilde_upper = constant_C_tilde(st.bounds.upper, L);

    for (int k = 1; k <= grid_points; ++k) {
        const double lambda = static_cast<double>(k) / (grid_points + 1);
        st.lambdas.push_back(lambda);
        st.c_tilde.push_back(constant_C_tilde(lambda, L));
    }
    st.strictly_increasing = std::adjacent_find(st.c_tilde.begin(), st.c_tilde.end(),
                                                [](double a, double b) { return !(a < b); }) == st.c_tilde.end();
    st.band_bounds_hold = st.c_tilde_lower < st.c_tilde_upper;
    for (std::size_t k = 0; k < st.lambdas.size(); ++k) {
        if (st.lambdas[k] <= st.bounds.lower || st.lambdas[k] >= st.bounds.upper) continue;
        if (!(st.c_tilde_lower < st.c_tilde[k] && st.c_tilde[k] < st.c_tilde_upper)) st.band_bounds_hold = false;
    }
    // growth without bound as lambda -> 1
    const double near_one = constant_C_tilde(1.0 - 1e-9, L);
    st.pole_detected = near_one > 1e6 * st.c_tilde_upper;
    return st;
}

void write_lambda_study_csv(std::ostream& out, const LambdaStudy& study) {
    out << "lambda,C_tilde,in_band\n";
    for (std::size_t k = 0; k < study.lambdas.size(); ++k) {
        const bool in_band = study.lambdas[k] > study.bounds.lower && study.lambdas[k] < study.bounds.upper;
        out << fmt17(study.lambdas[k]) << ',' << fmt17(study.c_tilde[k]) << ',' << (in_band ? 1 : 0) << '\n';
    }
}

std::string lambda_study_svg(const LambdaStudy& study) {
    svg::Series curve{"C~(lambda)", "#1f77b4", study.lambdas, study.c_tilde, false};
    svg::Series band{"interaction band", "#2ca02c", {study.bounds.lower, study.bounds.upper},
                     {study.c_tilde_lower, study.c_tilde_upper}, true};
    const double clip = 4.0 * study.c_tilde_upper;
    return svg::render({"C~ as a function of the interaction strength", "lambda", "C~", {curve, band}, 1.0, clip});
}

bool NullTestReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const NullCheck& c) { return c.passed; });
}

json NullTestReport::to_json() const {
    json doc;
    doc["all_passed"] = all_passed();
    for (const NullCheck& c : checks)
        doc["checks"].push_back({{"name", c.name},
                                 {"drift", c.drift},
                                 {"tolerance", c.tolerance},
                                 {"richardson_abs_error", c.richardson_abs_error},
                                 {"passed", c.passed}});
    for (const auto& row : eps_sweep)
        doc["eps_sweep"].push_back({{"eps", row[0]}, {"delta_m_phi0", row[1]}, {"delta_m_phi_half_pi", row[2]}});
    doc["slope_out_of_phase"] = slope_out_of_phase;
    doc["slope_synchronized"] = slope_synchronized ? json(*slope_synchronized) : json(nullptr);
    return doc;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) throw std::invalid_argument("need at least two points for a slope");
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += std::log(x[k]);
        my += std::log(y[k]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = std::log(x[k]) - mx;
        sxy += dx * (std::log(y[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

namespace {

double pose_drift(const Trajectory& traj) {
    const SystemState& a = traj.states.front();
    const SystemState& b = traj.states.back();
    return std::max({std::abs(b.x1 - a.x1), std::abs(b.y1 - a.y1), std::abs(b.theta1 - a.theta1),
                     std::abs(b.x2 - a.x2), std::abs(b.y2 - a.y2), std::abs(b.theta2 - a.theta2)});
}

// 10x the step-halving error estimate, kept above round-off and below the fixed cap.
double null_tolerance(double richardson_abs, double cap, double link_length) {
    return std::min(cap, std::max(10.0 * richardson_abs, 1e-14 * link_length));
}

}  // namespace

NullTestReport null_tests(const RunConfig& config) {
    config.validate();
    const ScallopPairParams coupled = config.params();
    const ScallopPairParams uncoupled = coupled.with_lambda(0.0);
    const double L = coupled.link_length();
    constexpr double kUncoupledCap = 1e-9;
    constexpr double kSynchronizedFraction = 1e-2;

    NullTestReport rep;

    {
        // one scallop strokes back and forth, the other is idle
        const double gamma = config.gamma();
        const double tau = config.tau();
        const SystemState start = perturbed_aligned_state(config.eps, 0.0, config.theta0);
        const Trajectory traj =
            integrate(start, uncoupled, ControlStroke::square(gamma, 0.0, tau), config.n_periods, tau / 500.0);
        NullCheck c{"uncoupled single-scallop reciprocal stroke", pose_drift(traj), 0.0,
                    traj.summary.richardson_abs_error, false};
        c.tolerance = null_tolerance(c.richardson_abs_error, kUncoupledCap, L);
        c.passed = c.drift < c.tolerance;
        rep.checks.push_back(c);
    }
    {
        const Trajectory traj = run_sinusoidal(config, uncoupled, std::numbers::pi / 2, config.omega_freq, config.dt);
        NullCheck c{"uncoupled pair, out-of-phase sinusoidal stroke", pose_drift(traj), 0.0,
                    traj.summary.richardson_abs_error, false};
        c.tolerance = null_tolerance(c.richardson_abs_error, kUncoupledCap, L);
        c.passed = c.drift < c.tolerance;
        rep.checks.push_back(c);
    }

    std::vector<double> eps_values = {config.eps / 4.0, config.eps / 2.0, config.eps};
    std::vector<double> sync, out_of_phase;
    for (double eps : eps_values) {
        RunConfig c = config;
        c.eps = eps;
        const Trajectory t0 = run_sinusoidal(c, coupled, 0.0, c.omega_freq, c.dt);
        const Trajectory t1 = run_sinusoidal(c, coupled, std::numbers::pi / 2, c.omega_freq, c.dt);
        sync.push_back(t0.summary.delta_m);
        out_of_phase.push_back(t1.summary.delta_m);
        rep.eps_sweep.push_back({eps, t0.summary.delta_m, t1.summary.delta_m});
        if (eps == config.eps) {
            NullCheck check{"synchronized stroke (phi = 0) with coupling", t0.summary.delta_m, 0.0,
                            t0.summary.richardson_abs_error, false};
            check.tolerance = kSynchronizedFraction * t1.summary.delta_m;
            check.passed = check.drift <= check.tolerance;
            rep.checks.push_back(check);
        }
    }

    rep.slope_out_of_phase = loglog_slope(eps_values, out_of_phase);
    const double roundoff = 1e-15 * L;
    const bool resolvable = std::all_of(sync.begin(), sync.end(), [&](double d) { return d > roundoff; });
    if (resolvable) rep.slope_synchronized = loglog_slope(eps_values, sync);

    NullCheck order{"synchronized residual is higher order in eps", 0.0, 0.0, 0.0, true};
    for (std::size_t k = 0; k < sync.size(); ++k)
        order.drift = std::max(order.drift, sync[k] / std::max(out_of_phase[k], 1e-300));
    order.tolerance = kSynchronizedFraction;
    order.passed = order.drift <= kSynchronizedFraction &&
                   (!rep.slope_synchronized || *rep.slope_synchronized > rep.slope_out_of_phase);
    rep.checks.push_back(order);
    return rep;
}

}  // namespace scallops
