#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace scallops {

/// Raised when the 6x6 resistance matrix is numerically singular.
class SingularResistance : public std::runtime_error {
public:
    SingularResistance(double det, double floor, double time = -1.0)
        : std::runtime_error(describe(det, floor, time)), det_(det), floor_(floor), time_(time) {}

    double det() const { return det_; }
    double floor() const { return floor_; }
    /// Simulation time of the failure, or a negative value when not inside an integration.
    double time() const { return time_; }

    SingularResistance at_time(double t) const { return SingularResistance(det_, floor_, t); }

private:
    static std::string describe(double det, double floor, double time) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "singular resistance matrix: |det R| = %.3e below floor %.3e", det, floor);
        std::string msg = buf;
        if (time >= 0.0) {
            std::snprintf(buf, sizeof buf, " at t = %.6g", time);
            msg += buf;
        }
        return msg;
    }

    double det_;
    double floor_;
    double time_;
};

/// Finite-difference Jacobian failed its step-halving consistency check.
class FDUnstable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Step-halving check of a fixed-step integration exceeded its tolerance.
class StepTooCoarse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace scallops
