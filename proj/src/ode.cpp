#include "mobius/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dop853_tableau.hpp"
#include "mobius/errors.hpp"

namespace mobius::ode {

namespace tab = dop853;

namespace {

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kErrorExponent = -1.0 / 8.0;

double rms(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

DenseSegment::DenseSegment(double t_old, double t_new,
                           std::vector<double> y_old,
                           std::vector<std::array<double, 7>> coeffs)
    : t_old_(t_old),
      t_new_(t_new),
      y_old_(std::move(y_old)),
      coeffs_(std::move(coeffs)) {}

double DenseSegment::eval(double t, std::size_t i) const {
  double h = t_new_ - t_old_;
  double x = h == 0.0 ? 0.0 : (t - t_old_) / h;
  const auto& F = coeffs_[i];
  double acc = 0.0;
  for (int j = 6, k = 0; j >= 0; --j, ++k) {
    acc += F[j];
    acc *= (k % 2 == 0) ? x : 1.0 - x;
  }
  return y_old_[i] + acc;
}

void DenseSegment::eval(double t, std::span<double> out) const {
  for (std::size_t i = 0; i < y_old_.size(); ++i) out[i] = eval(t, i);
}

Dop853::Dop853(Rhs f, double t0, std::vector<double> y0, double t_bound,
               Options opts)
    : rhs_(std::move(f)),
      opts_(opts),
      t_(t0),
      t_old_(t0),
      t_bound_(t_bound),
      direction_(t_bound >= t0 ? 1.0 : -1.0),
      n_(y0.size()),
      y_(std::move(y0)),
      y_old_(y_),
      f_(n_),
      f_old_(n_),
      k_(tab::kExtendedStages, std::vector<double>(n_)) {
  if (!(opts_.rel_tol > 0.0) || !(opts_.abs_tol > 0.0))
    throw ValidationError("integration tolerances must be positive");
  if (!(opts_.max_step > 0.0))
    throw ValidationError("max_step must be positive");
  eval(t_, y_, f_);
  done_ = t_ == t_bound_;
  if (!done_) {
    h_abs_ = opts_.first_step > 0.0 ? opts_.first_step : initial_step();
    h_abs_ = std::min(h_abs_, opts_.max_step);
  }
}

void Dop853::eval(double t, std::span<const double> y, std::span<double> out) {
  ++nfev_;
  rhs_(t, y, out);
}

double Dop853::initial_step() {
  std::vector<double> s(n_), tmp(n_), y1(n_), f1(n_);
  for (std::size_t i = 0; i < n_; ++i)
    s[i] = opts_.abs_tol + std::abs(y_[i]) * opts_.rel_tol;
  for (std::size_t i = 0; i < n_; ++i) tmp[i] = y_[i] / s[i];
  double d0 = rms(tmp);
  for (std::size_t i = 0; i < n_; ++i) tmp[i] = f_[i] / s[i];
  double d1 = rms(tmp);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, std::abs(t_bound_ - t_));
  for (std::size_t i = 0; i < n_; ++i)
    y1[i] = y_[i] + h0 * direction_ * f_[i];
  eval(t_ + h0 * direction_, y1, f1);
  for (std::size_t i = 0; i < n_; ++i) tmp[i] = (f1[i] - f_[i]) / s[i];
  double d2 = rms(tmp) / h0;
  double h1 = (d1 <= 1e-15 && d2 <= 1e-15)
                  ? std::max(1e-6, h0 * 1e-3)
                  : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
  return std::min(100.0 * h0, h1);
}

void Dop853::step() {
  if (done_) return;
  double t = t_;
  double min_step =
      10.0 * std::abs(std::nextafter(t, direction_ * INFINITY) - t);
  double h_abs = std::clamp(h_abs_, min_step, opts_.max_step);
  bool rejected = false;
  std::vector<double> y_new(n_), f_new(n_), ytmp(n_);

  while (true) {
    if (h_abs < min_step)
      throw StepFailure("step size underflow at t=" + std::to_string(t), t);
    double h = h_abs * direction_;
    double t_new = t + h;
    if (direction_ * (t_new - t_bound_) > 0.0) t_new = t_bound_;
    h = t_new - t;
    h_abs = std::abs(h);

    k_[0] = f_;
    for (int s = 1; s < tab::kStages; ++s) {
      for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += tab::A[s][j] * k_[j][i];
        ytmp[i] = y_[i] + h * acc;
      }
      eval(t + tab::C[s] * h, ytmp, k_[s]);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < tab::kStages; ++j) acc += tab::B[j] * k_[j][i];
      y_new[i] = y_[i] + h * acc;
    }
    eval(t_new, y_new, f_new);
    k_[tab::kStages] = f_new;

    double e5 = 0.0;
    double e3 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double scale = opts_.abs_tol +
                     std::max(std::abs(y_[i]), std::abs(y_new[i])) *
                         opts_.rel_tol;
      double a5 = 0.0;
      double a3 = 0.0;
      for (int j = 0; j <= tab::kStages; ++j) {
        a5 += tab::E5[j] * k_[j][i];
        a3 += tab::E3[j] * k_[j][i];
      }
      e5 = std::max(e5, std::abs(a5) / scale);
      e3 = std::max(e3, std::abs(a3) / scale);
    }
    double err = 0.0;
    if (e5 > 0.0 || e3 > 0.0)
      err = h_abs * e5 * e5 / std::sqrt(e5 * e5 + 0.01 * e3 * e3);

    if (err < 1.0) {
      double factor =
          err == 0.0 ? kMaxFactor
                     : std::min(kMaxFactor, kSafety * std::pow(err, kErrorExponent));
      if (rejected) factor = std::min(1.0, factor);
      h_prev_ = h;
      y_old_ = y_;
      f_old_ = f_;
      t_old_ = t;
      t_ = t_new;
      y_ = y_new;
      f_ = f_new;
      h_abs_ = std::min(h_abs * factor, opts_.max_step);
      build_dense(h);
      if (direction_ * (t_ - t_bound_) >= 0.0) done_ = true;
      return;
    }
    h_abs *= std::max(kMinFactor, kSafety * std::pow(err, kErrorExponent));
    rejected = true;
  }
}

void Dop853::build_dense(double h) {
  std::vector<double> ytmp(n_);
  for (int s = tab::kStages + 1; s < tab::kExtendedStages; ++s) {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < s; ++j) acc += tab::A[s][j] * k_[j][i];
      ytmp[i] = y_old_[i] + h * acc;
    }
    eval(t_old_ + tab::C[s] * h, ytmp, k_[s]);
  }
  std::vector<std::array<double, 7>> coeffs(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double dy = y_[i] - y_old_[i];
    auto& F = coeffs[i];
    F[0] = dy;
    F[1] = h * f_old_[i] - dy;
    F[2] = 2.0 * dy - h * (f_[i] + f_old_[i]);
    for (int r = 0; r < tab::kInterpolatorPower - 3; ++r) {
      double acc = 0.0;
      for (int j = 0; j < tab::kExtendedStages; ++j) acc += tab::D[r][j] * k_[j][i];
      F[3 + r] = h * acc;
    }
  }
  dense_ = DenseSegment(t_old_, t_, y_old_, std::move(coeffs));
}

}  // namespace mobius::ode
