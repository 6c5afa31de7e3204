#include "mobius/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mobius/errors.hpp"

namespace mobius {

namespace {

constexpr double kOverflowArg = 350.0;
constexpr double kInv4Pi = 1.0 / (4.0 * kPi);
constexpr double kInv8Pi = 1.0 / (8.0 * kPi);

double sign(double u) { return u < 0.0 ? -1.0 : 1.0; }

double sin_half_sq(double dx) {
  double s = std::sin(0.5 * dx);
  return s * s;
}

double cos_half_sq(double dx) {
  double c = std::cos(0.5 * dx);
  return c * c;
}

double sinh_half_sq(double u) {
  double s = std::sinh(0.5 * u);
  return s * s;
}

}  // namespace

namespace detail {

double log_sin_kernel(double dx, double u) {
  if (std::abs(u) > kOverflowArg) return std::abs(u) - 2.0 * std::numbers::ln2;
  return std::log(sin_half_sq(dx) + sinh_half_sq(u));
}

double log_cos_kernel(double dx, double u) {
  if (std::abs(u) > kOverflowArg) return std::abs(u) - 2.0 * std::numbers::ln2;
  return std::log(cos_half_sq(dx) + sinh_half_sq(u));
}

double sinh_over_sin_kernel(double dx, double u) {
  if (std::abs(u) > kOverflowArg) return 2.0 * sign(u);
  return std::sinh(u) / (sin_half_sq(dx) + sinh_half_sq(u));
}

double sinh_over_cos_kernel(double dx, double u) {
  if (std::abs(u) > kOverflowArg) return 2.0 * sign(u);
  return std::sinh(u) / (cos_half_sq(dx) + sinh_half_sq(u));
}

double inv_sin_kernel(double dx, double u) {
  if (std::abs(u) > kOverflowArg) return 0.0;
  return 1.0 / (sin_half_sq(dx) + sinh_half_sq(u));
}

double inv_cos_kernel(double dx, double u) {
  if (std::abs(u) > kOverflowArg) return 0.0;
  return 1.0 / (cos_half_sq(dx) + sinh_half_sq(u));
}

}  // namespace detail

double log_cosh(double y) {
  double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double cylinder_green(CylinderPoint p, CylinderPoint q,
                      double collision_radius) {
  if (cylinder_distance(p, q) < collision_radius)
    throw CollisionError("cylinder Green's function evaluated at a collision");
  return -kInv4Pi * detail::log_sin_kernel(p.x - q.x, p.y - q.y);
}

double green_mobius(ChartPoint a, ChartPoint b, double collision_radius) {
  CylinderPoint pa{a.x, a.y};
  CylinderPoint pb{b.x, b.y};
  return cylinder_green(pa, pb, collision_radius) -
         cylinder_green(pa, tau(pb), collision_radius);
}

double robin_mobius(double y) { return log_cosh(y) / (2.0 * kPi); }

double hamiltonian(std::span<const double> x, std::span<const double> y,
                   std::span<const double> gamma) {
  const std::size_t n = x.size();
  double pair = 0.0;
  double self = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    self += gamma[k] * gamma[k] * log_cosh(y[k]);
    for (std::size_t l = k + 1; l < n; ++l) {
      double dx = x[k] - x[l];
      pair += gamma[k] * gamma[l] *
              (detail::log_cos_kernel(dx, y[k] + y[l]) -
               detail::log_sin_kernel(dx, y[k] - y[l]));
    }
  }
  return kInv4Pi * (pair + self);
}

void velocity(std::span<const double> x, std::span<const double> y,
              std::span<const double> gamma, std::span<double> vx,
              std::span<double> vy) {
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n; ++k) {
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      if (l == k) continue;
      double dx = x[k] - x[l];
      double dm = y[k] - y[l];
      double dp = y[k] + y[l];
      sx += gamma[l] * (detail::sinh_over_cos_kernel(dx, dp) -
                        detail::sinh_over_sin_kernel(dx, dm));
      sy += gamma[l] * std::sin(dx) *
            (detail::inv_sin_kernel(dx, dm) + detail::inv_cos_kernel(dx, dp));
    }
    vx[k] = kInv8Pi * sx + kInv4Pi * gamma[k] * std::tanh(y[k]);
    vy[k] = kInv8Pi * sy;
  }
}

double hamiltonian(const VortexSystem& s) {
  auto x = s.xs();
  auto y = s.ys();
  auto g = s.strengths();
  return hamiltonian(x, y, g);
}

std::vector<Velocity> velocity(const VortexSystem& s) {
  auto x = s.xs();
  auto y = s.ys();
  auto g = s.strengths();
  std::vector<double> vx(s.size());
  std::vector<double> vy(s.size());
  velocity(x, y, g, vx, vy);
  std::vector<Velocity> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = {vx[i], vy[i]};
  return out;
}

double momentum(const VortexSystem& s) {
  double phi = 0.0;
  for (const auto& v : s) phi += v.strength * v.position.y;
  return phi;
}

Observables observables(const VortexSystem& s) {
  return {hamiltonian(s), momentum(s)};
}

double stream_function(ChartPoint p, const VortexSystem& s,
                       double collision_radius) {
  double psi = 0.0;
  for (const auto& v : s)
    psi += v.strength * green_mobius(p, v.position, collision_radius);
  return psi;
}

std::vector<Velocity> two_vortex_velocity(double x1, double y1, double g1,
                                          double x2, double y2, double g2) {
  const double pi = kPi;
  auto s2 = [](double t) { return std::sin(t) * std::sin(t); };
  auto c2 = [](double t) { return std::cos(t) * std::cos(t); };
  auto sh2 = [](double t) { return std::sinh(t) * std::sinh(t); };
  double d12 = x1 - x2;
  double d21 = x2 - x1;
  double xd1 = -1.0 / (8.0 * pi) *
               (g2 * std::sinh(y1 - y2) / (s2(d12 / 2) + sh2((y1 - y2) / 2)) -
                g2 * std::sinh(y1 + y2) / (c2(d12 / 2) + sh2((y1 + y2) / 2)) -
                2.0 * g1 * std::tanh(y1));
  double xd2 = -1.0 / (8.0 * pi) *
               (g1 * std::sinh(y2 - y1) / (s2(d21 / 2) + sh2((y2 - y1) / 2)) -
                g1 * std::sinh(y2 + y1) / (c2(d21 / 2) + sh2((y2 + y1) / 2)) -
                2.0 * g2 * std::tanh(y2));
  double yd1 = g2 * std::sin(d12) / (8.0 * pi) *
               (1.0 / (s2(d12 / 2) + sh2((y1 - y2) / 2)) +
                1.0 / (c2(d12 / 2) + sh2((y1 + y2) / 2)));
  double yd2 = g1 * std::sin(d21) / (8.0 * pi) *
               (1.0 / (s2(d21 / 2) + sh2((y2 - y1) / 2)) +
                1.0 / (c2(d21 / 2) + sh2((y2 + y1) / 2)));
  return {{xd1, yd1}, {xd2, yd2}};
}

}  // namespace mobius
