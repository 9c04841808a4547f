#pragma once

#include "scallops/dynamics.hpp"

#include <iosfwd>
#include <vector>

namespace scallops {

/// Periodic shape-rate protocol.
///
/// A square stroke runs clockwise around the rectangle with sides gamma1, gamma2 in the
/// third quadrant of the (u1, u2) plane: (0,-g2), (-g1,0), (0,g2), (g1,0), each for tau.
/// A sinusoidal stroke is the derivative of sigma_i = pi + eps cos(omega t + (i-1) phi).
class ControlStroke {
public:
    enum class Kind { square, sinusoidal };

    static ControlStroke square(double gamma1, double gamma2, double tau);
    static ControlStroke sinusoidal(double eps, double omega_freq, double phi);

    /// Stroke that retraces this one backwards in time: u_rev(t) = -u(T - t) on each period.
    ControlStroke reversed() const;

    Kind kind() const { return kind_; }
    bool is_reversed() const { return reversed_; }
    double period() const;
    /// Controls at time t >= 0, extended periodically. The square stroke is right-continuous.
    ControlPair at(double t) const;
    /// Controls are constant between the mesh points of any step dividing tau.
    bool piecewise_constant() const { return kind_ == Kind::square; }

    double gamma1() const { return gamma1_; }
    double gamma2() const { return gamma2_; }
    double tau() const { return tau_; }
    double eps() const { return eps_; }
    double omega_freq() const { return omega_; }
    double phi() const { return phi_; }

private:
    ControlPair forward_at(double t) const;

    Kind kind_ = Kind::square;
    bool reversed_ = false;
    double gamma1_ = 0.0, gamma2_ = 0.0, tau_ = 0.0;
    double eps_ = 0.0, omega_ = 0.0, phi_ = 0.0;
};

/// Throws std::invalid_argument for t < 0.
ControlPair control_at(const ControlStroke& stroke, double t);

struct TrajectorySummary {
    Vec2 midpoint_displacement = Vec2::Zero();  ///< Delta x_m over the whole run
    double delta_m = 0.0;                       ///< |Delta x_m|
    double rotation1 = 0.0;
    double rotation2 = 0.0;
    double shape_closure_error = 0.0;  ///< max_i |sigma_i(T) - sigma_i(0)|
    double min_abs_det = 0.0;
    /// Smallest |det R| / singularity floor along the run; above 1 means never singular.
    double min_det_margin = 0.0;
    /// Relative change of Delta x_m when the step is halved (0 when not checked).
    double richardson_change = 0.0;
    /// Absolute difference of Delta x_m between step dt and dt/2 (0 when not checked).
    double richardson_abs_error = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SystemState> states;
    std::vector<double> det_history;
    TrajectorySummary summary;
};

inline constexpr double kRichardsonTolerance = 1e-3;
inline constexpr int kDefaultStepsPerPeriod = 2000;

/// Raw classical RK4 over [0, n_steps * dt] with no step-size policy. Controls are
/// frozen at the step midpoint for piecewise-constant strokes.
/// Throws SingularResistance carrying the time of the failing step.
Trajectory integrate_fixed_step(const SystemState& state0, const ScallopPairParams& params,
                                const ControlStroke& stroke, double dt, long n_steps);

/// Integrate n_periods strokes with step dt (dt <= 0 selects period / 2000).
///
/// dt must not exceed period / 200 and, for square strokes, must divide tau so that
/// switching instants are mesh points. The run is repeated at dt / 2 and StepTooCoarse is
/// thrown when the midpoint displacement changes by more than 1e-3 relative.
Trajectory integrate(const SystemState& state0, const ScallopPairParams& params, const ControlStroke& stroke,
                     int n_periods, double dt = 0.0);

/// CSV with header t,x1,y1,theta1,x2,y2,theta2,sigma1,sigma2,detR and 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// Areas enclosed in control space by the square loop, (eps pi)^2 / 4, and the smooth
/// loop, pi eps^2, with their relative difference (circle - square) / circle.
struct LoopAreaReport {
    double square_area = 0.0;
    double circle_area = 0.0;
    double relative_error = 0.0;
    double ratio = 0.0;  ///< circle / square = 4 / pi
};

LoopAreaReport square_vs_smooth_area_report(double eps, double omega_freq);

}  // namespace scallops
