#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace scallops {

using Vec2 = Eigen::Vector2d;
using StateVector = Eigen::Matrix<double, 8, 1>;

/// How lengths enter the model.
///
/// `paper_nondimensional` divides L, h and a by L so that the link length is 1.
/// The interaction strength is a ratio of logarithms of length ratios and is the
/// same under both conventions; displacements scale linearly with the link length.
enum class LengthConvention { paper_nondimensional, dimensional };

struct DragCoefficients {
    double parallel = 1.0;       ///< C_par [N s / um^2]
    double perpendicular = 2.0;  ///< C_perp [N s / um^2]
};

/// Physical constants of the scallop pair.
///
/// lambda = ln(h/L) / ln(a/L) measures the hydrodynamic coupling; Lambda = 1 - lambda^2
/// is always recomputed from lambda.
class ScallopPairParams {
public:
    /// Build from the link length L, inter-scallop distance h and thickness a.
    /// Throws std::invalid_argument unless all inputs are positive and lambda lands in [0, 1).
    static ScallopPairParams from_geometry(double link_length, double distance, double thickness,
                                           DragCoefficients drag,
                                           LengthConvention convention = LengthConvention::dimensional);

    /// Build with a prescribed coupling; h is chosen as L (a/L)^lambda so the
    /// geometric definition of lambda stays consistent.
    static ScallopPairParams from_lambda(double link_length, double lambda, DragCoefficients drag,
                                         double thickness_ratio = 0.025);

    /// Same geometry and drag, different coupling strength.
    ScallopPairParams with_lambda(double lambda) const;

    double link_length() const { return link_length_; }
    double distance() const { return distance_; }
    double thickness() const { return thickness_; }
    double c_par() const { return drag_.parallel; }
    double c_perp() const { return drag_.perpendicular; }
    const DragCoefficients& drag() const { return drag_; }
    double lambda() const { return lambda_; }
    double big_lambda() const { return 1.0 - lambda_ * lambda_; }

private:
    ScallopPairParams(double link_length, double distance, double thickness, DragCoefficients drag,
                      double lambda);

    double link_length_;
    double distance_;
    double thickness_;
    DragCoefficients drag_;
    double lambda_;
};

/// Positions, orientations and opening angles of both scallops.
///
/// Angles are kept unwrapped so that rotation accumulated over many strokes is visible.
struct SystemState {
    double x1 = 0.0, y1 = 0.0, theta1 = 0.0;
    double x2 = 0.0, y2 = 0.0, theta2 = 0.0;
    double sigma1 = 3.141592653589793, sigma2 = 3.141592653589793;

    Vec2 hinge(int i) const;
    double theta(int i) const;
    double sigma(int i) const;
    /// Midpoint of the segment joining the two hinges.
    Vec2 midpoint() const { return 0.5 * (hinge(1) + hinge(2)); }

    /// Ordering (x1, y1, theta1, x2, y2, theta2, sigma1, sigma2).
    StateVector to_vector() const;
    static SystemState from_vector(const StateVector& v);
};

struct StateRates {
    double xdot1 = 0.0, ydot1 = 0.0, thetadot1 = 0.0;
    double xdot2 = 0.0, ydot2 = 0.0, thetadot2 = 0.0;
    double sigmadot1 = 0.0, sigmadot2 = 0.0;

    Vec2 hinge_velocity(int i) const;
    double thetadot(int i) const;
    double sigmadot(int i) const;

    StateVector to_vector() const;
    static StateRates from_vector(const StateVector& v);
};

/// Unit direction of link j (1 or 2) of a scallop with orientation theta and opening sigma.
Vec2 link_direction(double theta, double sigma, int j);

/// Counterclockwise quarter turn: (x, y) -> (-y, x).
inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }

/// 2D cross product a x b = perp(a) . b
inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Link direction e_i^(j) evaluated on a state.
Vec2 link_direction(const SystemState& state, int i, int j);

/// Material point at arclength s on link j of scallop i.
Vec2 point_on_link(const SystemState& state, const ScallopPairParams& params, int i, int j, double s);

/// Velocity of that material point: xdot_i + s perp(e_i^(j)) (thetadot_i + (j-1) sigmadot_i).
Vec2 point_velocity(const SystemState& state, const StateRates& rates, const ScallopPairParams& params,
                    int i, int j, double s);

/// Half-width of the admissible window |sigma - pi| outside which the model is flagged.
inline constexpr double kOpeningWindow = 0.5;

/// Throws std::invalid_argument for non-finite coordinates or sigma outside (0, 2 pi).
void validate_state(const SystemState& state);

/// Soft model-validity messages (empty when the state is inside the admissible window).
std::vector<std::string> validity_warnings(const SystemState& state, double window = kOpeningWindow);

/// Throws std::out_of_range unless index is 1 or 2.
void check_index(int index, const char* what);

}  // namespace scallops
