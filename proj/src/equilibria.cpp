#include "mobius/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "mobius/errors.hpp"

namespace mobius {

const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::fixed:
      return "fixed";
    case EquilibriumKind::relative:
      return "relative";
    case EquilibriumKind::none:
      break;
  }
  return "none";
}

Velocity single_vortex_velocity(double gamma, double y) {
  return {gamma * std::tanh(y) / (4.0 * kPi), 0.0};
}

std::array<FixedPair, 2> fixed_equilibrium_two(double gamma1, double gamma2) {
  if (!std::isfinite(gamma1) || !std::isfinite(gamma2) ||
      !(gamma1 * gamma2 > 0.0))
    throw DomainError("fixed two-vortex equilibria need strengths of equal sign");
  if (gamma1 == gamma2)
    throw DomainError("fixed two-vortex equilibria need unequal strengths");
  const double a2 = gamma1 * gamma1;
  const double b2 = gamma2 * gamma2;
  const double a4 = a2 * a2;
  const double b4 = b2 * b2;
  const double inner =
      a4 + b4 + std::sqrt(a4 * a4 + a4 * a2 * b2 + a2 * b4 * b2 + b4 * b4);
  const double d = (a2 - b2) * (a2 - b2);
  const double y1 = std::asinh(std::sqrt(2.0 * b2 * inner / (a2 * d)));
  const double y2 = -std::asinh(std::sqrt(2.0 * a2 * inner / (b2 * d)));
  const double phi = gamma1 * y1 + gamma2 * y2;
  return {FixedPair{y1, y2, phi}, FixedPair{-y1, -y2, -phi}};
}

VortexSystem fixed_pair_system(double gamma1, double gamma2,
                               const FixedPair& pair, double x) {
  return VortexSystem({Vortex{{x, pair.y1}, gamma1, "v0"},
                       Vortex{{x, pair.y2}, gamma2, "v1"}});
}

VortexSystem EquatorialResult::system() const {
  std::vector<Vortex> vs;
  for (std::size_t i = 0; i < x.size(); ++i)
    vs.push_back(Vortex{{x[i], 0.0}, strengths[i], {}});
  return VortexSystem(std::move(vs));
}

namespace {

void check_alternating(const std::vector<double>& g) {
  if (g.empty() || g.size() % 2 == 0)
    throw ValidationError("equatorial equilibria need an odd number of vortices");
  for (double v : g)
    if (!std::isfinite(v) || v == 0.0)
      throw ValidationError("strengths must be finite and nonzero");
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    if (!(g[i] * g[i + 1] < 0.0))
      throw ValidationError("equatorial strengths must alternate in sign");
}

// dy/dt on y = 0: (1/2pi) sum_l gamma_l / sin(x_j - x_l).
Eigen::VectorXd equatorial_field(const std::vector<double>& x,
                                 const std::vector<double>& g) {
  const std::size_t n = x.size();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l)
      if (l != j) f[static_cast<Eigen::Index>(j)] += g[l] / std::sin(x[j] - x[l]);
  return f / (2.0 * kPi);
}

Eigen::MatrixXd equatorial_jacobian(const std::vector<double>& x,
                                    const std::vector<double>& g) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == j) continue;
      double s = std::sin(x[j] - x[l]);
      double term = g[l] * std::cos(x[j] - x[l]) / (s * s);
      jac(j, j) -= term;
      jac(j, l) += term;
    }
  return jac / (2.0 * kPi);
}

bool ordered(const std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) return false;
  return x.back() < kPi;
}

}  // namespace

EquatorialResult equatorial_equilibrium(const std::vector<double>& strengths,
                                        std::vector<double> initial,
                                        const EquatorialOptions& opts) {
  check_alternating(strengths);
  const std::size_t n = strengths.size();
  EquatorialResult out;
  out.strengths = strengths;
  if (n == 1) {
    out.x = {0.0};
    return out;
  }
  std::vector<double> x(n, 0.0);
  if (initial.empty()) {
    for (std::size_t i = 1; i < n; ++i) x[i] = kPi * static_cast<double>(i) / n;
  } else {
    if (initial.size() != n - 1)
      throw ValidationError("initial guess must give x_2..x_N");
    std::copy(initial.begin(), initial.end(), x.begin() + 1);
  }
  if (!ordered(x))
    throw OrderingViolation("initial guess violates 0 < x_2 < ... < x_N < pi");

  const auto m = static_cast<Eigen::Index>(n - 1);
  auto reduced = [&](const std::vector<double>& xv) {
    return Eigen::VectorXd(equatorial_field(xv, strengths).tail(m));
  };
  Eigen::VectorXd f = reduced(x);
  int it = 0;
  for (; it < opts.max_iterations && f.lpNorm<Eigen::Infinity>() > opts.tolerance;
       ++it) {
    Eigen::MatrixXd jac = equatorial_jacobian(x, strengths).bottomRightCorner(m, m);
    Eigen::VectorXd dx = jac.fullPivLu().solve(-f);
    if (!dx.allFinite()) throw ConvergenceError("singular equatorial Jacobian");
    double alpha = 1.0;
    std::vector<double> trial = x;
    Eigen::VectorXd ft;
    while (true) {
      for (Eigen::Index i = 0; i < m; ++i)
        trial[static_cast<std::size_t>(i) + 1] = x[static_cast<std::size_t>(i) + 1] + alpha * dx[i];
      ft = reduced(trial);
      if (ft.allFinite() && ft.norm() < (1.0 - 1e-4 * alpha) * f.norm()) break;
      alpha *= 0.5;
      if (alpha < 1e-10)
        throw ConvergenceError("equatorial Newton line search failed after " +
                               std::to_string(it) + " iterations");
    }
    if (!ordered(trial))
      throw OrderingViolation("Newton iterate left 0 < x_2 < ... < x_N < pi");
    x = trial;
    f = ft;
  }
  if (!(f.lpNorm<Eigen::Infinity>() <= opts.tolerance))
    throw ConvergenceError("equatorial Newton did not converge in " +
                           std::to_string(opts.max_iterations) + " iterations");
  out.x = x;
  out.iterations = it;
  out.residual = equatorial_field(x, strengths).lpNorm<Eigen::Infinity>();
  return out;
}

std::vector<EquatorialResult> equatorial_scan(
    const std::vector<double>& strengths, int starts, std::uint64_t seed,
    const EquatorialOptions& opts) {
  check_alternating(strengths);
  std::vector<EquatorialResult> roots;
  const std::size_t n = strengths.size();
  if (n == 1) return {equatorial_equilibrium(strengths, {}, opts)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, kPi);
  for (int s = 0; s < starts; ++s) {
    std::vector<double> guess(n - 1);
    for (double& v : guess) v = u(rng);
    std::sort(guess.begin(), guess.end());
    try {
      auto r = equatorial_equilibrium(strengths, guess, opts);
      bool fresh = std::none_of(roots.begin(), roots.end(), [&](const auto& q) {
        for (std::size_t i = 0; i < n; ++i)
          if (std::abs(q.x[i] - r.x[i]) > 1e-8) return false;
        return true;
      });
      if (fresh) roots.push_back(std::move(r));
    } catch (const ConvergenceError&) {
    }
  }
  return roots;
}

VortexSystem nring(const NRingSpec& ring) {
  if (ring.n < 1) throw ValidationError("an N-ring needs N >= 1");
  if (!std::isfinite(ring.gamma) || ring.gamma == 0.0)
    throw ValidationError("ring strength must be finite and nonzero");
  if (!std::isfinite(ring.y)) throw ValidationError("ring height must be finite");
  if (ring.n % 2 == 0 && ring.y == 0.0)
    throw DomainError("an even ring at y = 0 collides with its own image");
  std::vector<Vortex> vs;
  for (int i = 0; i < ring.n; ++i)
    vs.push_back(canonicalize(kTwoPi * i / ring.n, ring.y, ring.gamma,
                              "r" + std::to_string(i)));
  return VortexSystem(std::move(vs));
}

double nring_velocity_analytic(const NRingSpec& ring) {
  const double n = ring.n;
  const double pref = ring.gamma * n / (4.0 * kPi);
  if (ring.n % 2 == 0) return pref / std::tanh(n * ring.y);
  return pref * std::tanh(n * ring.y);
}

double trig_sum(int k, double y, TrigVariant variant) {
  if (k < 1) throw ValidationError("trig_sum needs K >= 1");
  if (y == 0.0) throw DomainError("trig_sum is singular at y = 0");
  const double twice = 2.0 * k;
  if (variant == TrigVariant::cos && k % 2 == 1) return twice * std::tanh(k * y);
  return twice / std::tanh(k * y);
}

double trig_sum_direct(int k, double y, TrigVariant variant) {
  if (k < 1) throw ValidationError("trig_sum needs K >= 1");
  const double num = std::sinh(2.0 * y);
  const double sh = std::sinh(y);
  double sum = 0.0;
  for (int j = 1; j <= k; ++j) {
    double a = kPi * j / k;
    double f = variant == TrigVariant::sin ? std::sin(a) : std::cos(a);
    sum += num / (f * f + sh * sh);
  }
  return sum;
}

EquilibriumResult verify_relative_equilibrium(const VortexSystem& s, double tol) {
  EquilibriumResult r;
  r.system = s;
  auto v = velocity(s);
  double max_speed = 0.0;
  double max_vy = 0.0;
  double lo = INFINITY;
  double hi = -INFINITY;
  double mean = 0.0;
  for (const auto& w : v) {
    max_speed = std::max({max_speed, std::abs(w.dx), std::abs(w.dy)});
    max_vy = std::max(max_vy, std::abs(w.dy));
    lo = std::min(lo, w.dx);
    hi = std::max(hi, w.dx);
    mean += w.dx;
  }
  if (!v.empty()) mean /= static_cast<double>(v.size());
  if (max_speed <= tol) {
    r.kind = EquilibriumKind::fixed;
    r.residual = max_speed;
    return r;
  }
  double dev = 0.0;
  for (const auto& w : v) dev = std::max(dev, std::abs(w.dx - mean));
  if (max_vy <= tol && hi - lo <= tol) {
    r.kind = EquilibriumKind::relative;
    r.drift_velocity = mean;
    r.residual = std::max(max_vy, dev);
    return r;
  }
  r.kind = EquilibriumKind::none;
  r.residual = std::max(max_vy, hi - lo);
  return r;
}

double vertical_line_condition(const VortexSystem& s) {
  double sum = 0.0;
  for (const auto& a : s)
    for (const auto& b : s)
      sum += a.strength * b.strength *
             std::tanh(0.5 * (a.position.y + b.position.y));
  return sum;
}

double squared_strength_moment(const VortexSystem& s) {
  double sum = 0.0;
  for (const auto& v : s) sum += v.strength * v.strength * v.position.y;
  return sum;
}

}  // namespace mobius
