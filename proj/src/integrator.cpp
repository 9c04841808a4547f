#include "scallops/integrator.hpp"

#include "scallops/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace scallops {

ControlStroke ControlStroke::square(double gamma1, double gamma2, double tau) {
    if (!std::isfinite(gamma1) || !std::isfinite(gamma2)) throw std::invalid_argument("gamma must be finite");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
    ControlStroke s;
    s.kind_ = Kind::square;
    s.gamma1_ = gamma1;
    s.gamma2_ = gamma2;
    s.tau_ = tau;
    return s;
}

ControlStroke ControlStroke::sinusoidal(double eps, double omega_freq, double phi) {
    if (!std::isfinite(eps) || !std::isfinite(phi)) throw std::invalid_argument("eps and phi must be finite");
    if (!(omega_freq > 0.0) || !std::isfinite(omega_freq)) throw std::invalid_argument("omega must be positive");
    ControlStroke s;
    s.kind_ = Kind::sinusoidal;
    s.eps_ = eps;
    s.omega_ = omega_freq;
    s.phi_ = phi;
    return s;
}

ControlStroke ControlStroke::reversed() const {
    ControlStroke s = *this;
    s.reversed_ = !reversed_;
    return s;
}

double ControlStroke::period() const {
    return kind_ == Kind::square ? 4.0 * tau_ : 2.0 * std::numbers::pi / omega_;
}

ControlPair ControlStroke::forward_at(double t) const {
    if (kind_ == Kind::sinusoidal) {
        const double rate = eps_ * omega_;
        return {-rate * std::sin(omega_ * t), -rate * std::sin(omega_ * t + phi_)};
    }
    const int segment = std::clamp(static_cast<int>(std::floor(t / tau_)), 0, 3);
    switch (segment) {
        case 0: return {0.0, -gamma2_};
        case 1: return {-gamma1_, 0.0};
        case 2: return {0.0, gamma2_};
        default: return {gamma1_, 0.0};
    }
}

ControlPair ControlStroke::at(double t) const {
    const double T = period();
    double local = std::fmod(t, T);
    if (local < 0.0) local += T;
    if (!reversed_) return forward_at(local);
    // right-continuity is preserved by sampling just inside the mirrored interval
    const double mirrored = T - local;
    const ControlPair u = forward_at(kind_ == Kind::square ? std::nextafter(mirrored, 0.0) : mirrored);
    return {-u.u1, -u.u2};
}

ControlPair control_at(const ControlStroke& stroke, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("control time must be non-negative");
    return stroke.at(t);
}

namespace {

StateVector rhs(const StateVector& q, ControlPair u, const ScallopPairParams& params) {
    return solve_rates(SystemState::from_vector(q), params, u).to_vector();
}

struct DetSample {
    double det;
    double margin;  // |det| / singularity floor
};

DetSample det_of(const SystemState& s, const ScallopPairParams& params) {
    const ResistanceAssembly a = assemble(s, params);
    return {a.det_R, std::abs(a.det_R) / a.singularity_floor()};
}

}  // namespace

Trajectory integrate_fixed_step(const SystemState& state0, const ScallopPairParams& params,
                                const ControlStroke& stroke, double dt, long n_steps) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (n_steps < 1) throw std::invalid_argument("need at least one step");
    validate_state(state0);

    Trajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.det_history.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(state0);
    double min_margin = det_of(state0, params).margin;
    traj.det_history.push_back(det_of(state0, params).det);

    StateVector q = state0.to_vector();
    for (long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        ControlPair u0, um, u1;
        if (stroke.piecewise_constant()) {
            u0 = um = u1 = stroke.at(t + 0.5 * dt);
        } else {
            u0 = stroke.at(t);
            um = stroke.at(t + 0.5 * dt);
            u1 = stroke.at(t + dt);
        }
        try {
            const StateVector k1 = rhs(q, u0, params);
            const StateVector k2 = rhs(q + 0.5 * dt * k1, um, params);
            const StateVector k3 = rhs(q + 0.5 * dt * k2, um, params);
            const StateVector k4 = rhs(q + dt * k3, u1, params);
            q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const SingularResistance& e) {
            throw e.at_time(t);
        }
        const SystemState s = SystemState::from_vector(q);
        traj.times.push_back(static_cast<double>(k + 1) * dt);
        traj.states.push_back(s);
        const DetSample sample = det_of(s, params);
        traj.det_history.push_back(sample.det);
        min_margin = std::min(min_margin, sample.margin);
    }

    const SystemState& first = traj.states.front();
    const SystemState& last = traj.states.back();
    TrajectorySummary& sum = traj.summary;
    sum.midpoint_displacement = last.midpoint() - first.midpoint();
    sum.delta_m = sum.midpoint_displacement.norm();
    sum.rotation1 = last.theta1 - first.theta1;
    sum.rotation2 = last.theta2 - first.theta2;
    sum.shape_closure_error = std::max(std::abs(last.sigma1 - first.sigma1), std::abs(last.sigma2 - first.sigma2));
    sum.min_abs_det = std::abs(traj.det_history.front());
    for (double d : traj.det_history) sum.min_abs_det = std::min(sum.min_abs_det, std::abs(d));
    sum.min_det_margin = min_margin;
    return traj;
}

Trajectory integrate(const SystemState& state0, const ScallopPairParams& params, const ControlStroke& stroke,
                     int n_periods, double dt) {
    if (n_periods < 1) throw std::invalid_argument("n_periods must be at least 1");
    const double period = stroke.period();
    if (dt <= 0.0) dt = period / kDefaultStepsPerPeriod;
    if (dt > period / 200.0 * (1.0 + 1e-12))
        throw std::invalid_argument("dt must not exceed period / 200");

    const double total = n_periods * period;
    long n_steps = 0;
    if (stroke.kind() == ControlStroke::Kind::square) {
        const double per_segment = stroke.tau() / dt;
        const double rounded = std::round(per_segment);
        if (std::abs(per_segment - rounded) > 1e-9 * per_segment)
            throw std::invalid_argument("dt must divide tau so switching times are mesh points");
        dt = stroke.tau() / rounded;
        n_steps = static_cast<long>(rounded) * 4L * n_periods;
    } else {
        n_steps = static_cast<long>(std::ceil(total / dt - 1e-9));
        dt = total / static_cast<double>(n_steps);
    }

    Trajectory traj = integrate_fixed_step(state0, params, stroke, dt, n_steps);
    const Trajectory refined = integrate_fixed_step(state0, params, stroke, 0.5 * dt, 2 * n_steps);

    const double change = (refined.summary.midpoint_displacement - traj.summary.midpoint_displacement).norm();
    const double floor = 1e-12 * params.link_length();
    traj.summary.richardson_abs_error = change;
    traj.summary.richardson_change = change / std::max(refined.summary.delta_m, floor);
    if (traj.summary.richardson_change > kRichardsonTolerance)
        throw StepTooCoarse("midpoint displacement changed by " + std::to_string(traj.summary.richardson_change) +
                            " (relative) when halving dt = " + std::to_string(dt));
    return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t,x1,y1,theta1,x2,y2,theta2,sigma1,sigma2,detR\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << sep;
    };
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        const SystemState& s = trajectory.states[k];
        put(trajectory.times[k], ',');
        put(s.x1, ',');
        put(s.y1, ',');
        put(s.theta1, ',');
        put(s.x2, ',');
        put(s.y2, ',');
        put(s.theta2, ',');
        put(s.sigma1, ',');
        put(s.sigma2, ',');
        put(trajectory.det_history[k], '\n');
    }
}

LoopAreaReport square_vs_smooth_area_report(double eps, double omega_freq) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!(omega_freq > 0.0)) throw std::invalid_argument("omega must be positive");
    // gamma1 gamma2 tau^2 with gamma = eps omega and tau = pi / (2 omega); omega cancels
    const double gamma = eps * omega_freq;
    const double tau = std::numbers::pi / (2.0 * omega_freq);
    LoopAreaReport r;
    r.square_area = gamma * gamma * tau * tau;
    r.circle_area = std::numbers::pi * eps * eps;
    r.relative_error = (r.circle_area - r.square_area) / r.circle_area;
    r.ratio = r.circle_area / r.square_area;
    return r;
}

}  // namespace scallops
