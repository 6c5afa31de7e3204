#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace mobius::ode {

using Rhs = std::function<void(double t, std::span<const double> y,
                               std::span<double> dydt)>;

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  /// 0 selects the step automatically.
  double first_step = 0.0;
};

/// 7th-order interpolant over one accepted step.
class DenseSegment {
 public:
  DenseSegment() = default;
  DenseSegment(double t_old, double t_new, std::vector<double> y_old,
               std::vector<std::array<double, 7>> coeffs);

  double t_old() const { return t_old_; }
  double t_new() const { return t_new_; }
  std::size_t dim() const { return y_old_.size(); }

  void eval(double t, std::span<double> out) const;
  double eval(double t, std::size_t component) const;

 private:
  double t_old_ = 0.0;
  double t_new_ = 0.0;
  std::vector<double> y_old_;
  std::vector<std::array<double, 7>> coeffs_;
};

/// Adaptive Dormand-Prince 8(5,3) stepper with dense output.
///
/// Integrates toward `t_bound` in either direction. Errors are measured in
/// the max norm, scaled by abs_tol + rel_tol * |y| per component.
class Dop853 {
 public:
  Dop853(Rhs f, double t0, std::vector<double> y0, double t_bound,
         Options opts = {});

  bool done() const { return done_; }
  /// Advance one accepted step. Throws StepFailure on step-size underflow.
  void step();

  double t() const { return t_; }
  double t_old() const { return t_old_; }
  const std::vector<double>& y() const { return y_; }
  double last_step() const { return h_prev_; }
  std::size_t evaluations() const { return nfev_; }

  /// Interpolant over the most recent step.
  const DenseSegment& dense() const { return dense_; }

 private:
  void eval(double t, std::span<const double> y, std::span<double> out);
  double initial_step();
  void build_dense(double h);

  Rhs rhs_;
  Options opts_;
  double t_;
  double t_old_;
  double t_bound_;
  double direction_;
  double h_abs_ = 0.0;
  double h_prev_ = 0.0;
  bool done_ = false;
  std::size_t n_;
  std::size_t nfev_ = 0;
  std::vector<double> y_;
  std::vector<double> y_old_;
  std::vector<double> f_;
  std::vector<double> f_old_;
  std::vector<std::vector<double>> k_;
  DenseSegment dense_;
};

}  // namespace mobius::ode
