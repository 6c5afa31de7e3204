#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobius/geometry.hpp"
#include "mobius/ode.hpp"

namespace mobius {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double collision_radius = kDefaultCollisionRadius;
  /// Negative values integrate backward in time.
  double t_end = 10.0;
  double sample_dt = 0.1;

  /// Throws ValidationError on nonpositive tolerances or sample spacing.
  void validate() const;
};

struct FlipEvent {
  double t = 0.0;
  std::string label;
};

struct Diagnostics {
  double h0 = 0.0;
  double phi0 = 0.0;
  /// max |H - H0| / |H0| (absolute when H0 == 0).
  double max_rel_h_drift = 0.0;
  double max_abs_h_drift = 0.0;
  double max_abs_phi_drift = 0.0;
  std::size_t steps = 0;
  std::size_t evaluations = 0;
};

struct Sample {
  double t = 0.0;
  VortexSystem system;
  /// Continuous cover coordinates; `system` is their canonical image.
  std::vector<ChartPoint> unwrapped;
};

struct Trajectory {
  std::vector<std::string> labels;
  /// Strengths of the initial representatives, carried by `unwrapped`.
  std::vector<double> strengths;
  std::vector<Sample> samples;
  std::vector<FlipEvent> flip_events;
  Diagnostics diagnostics;
  /// Per-step interpolants; state layout is [x_0..x_{n-1}, y_0..y_{n-1}].
  std::vector<ode::DenseSegment> segments;

  double t_begin() const;
  double t_end() const;
  /// Unwrapped state at time t inside the integrated interval.
  std::vector<double> state_at(double t) const;
  /// Canonical system at time t.
  VortexSystem system_at(double t) const;
};

/// Right-hand side of the N-vortex equations on the state [x..., y...].
ode::Rhs vortex_rhs(std::vector<double> strengths);

Trajectory integrate(const VortexSystem& s0, const IntegratorConfig& cfg);

/// Detects the first return of a planar projection of a dense solution to
/// the section through its starting point, normal to the initial velocity.
///
/// Only crossings in the direction of the initial motion count. The first
/// coordinate may be treated as an angle, in which case differences are
/// taken mod 2pi and wrap jumps are ignored.
class ReturnDetector {
 public:
  using Projection = std::function<std::array<double, 2>(std::span<const double>)>;

  ReturnDetector(Projection project, std::array<double, 2> origin,
                 std::array<double, 2> direction, bool angular_first,
                 int subdivisions = 8);

  /// Feed the next accepted step; returns the return time if it occurs here.
  std::optional<double> feed(const ode::DenseSegment& seg);

  double max_excursion() const { return max_excursion_; }

 private:
  std::array<double, 2> offset(std::span<const double> state) const;
  double height(const std::array<double, 2>& d) const;

  Projection project_;
  std::array<double, 2> origin_;
  std::array<double, 2> normal_;
  bool angular_;
  int subdivisions_;
  double max_excursion_ = 0.0;
  bool have_prev_ = false;
  double prev_t_ = 0.0;
  std::array<double, 2> prev_d_{};
};

struct PeriodReport {
  /// Projection constant along the whole trajectory.
  bool steady = false;
  std::optional<double> period;
};

/// Period of the pair projection (x_a - x_b mod 2pi, y_a) of a trajectory.
PeriodReport detect_period(const Trajectory& traj, const std::string& label_a,
                           const std::string& label_b,
                           double steady_tol = 1e-9);

}  // namespace mobius
