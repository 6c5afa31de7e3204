#include "mobius/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "mobius/dynamics.hpp"
#include "mobius/errors.hpp"
#include "mobius/integrator.hpp"
#include "mobius/ode.hpp"
#include "parallel.hpp"

namespace mobius {

namespace {

constexpr double kSingularFloor = 1e-24;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_regular(const ReducedState& st, const ReducedParams& p) {
  const double y2 = reduced_y2(st, p);
  const double s = std::sin(0.5 * st.dx);
  const double c = std::cos(0.5 * st.dx);
  const double sm = std::sinh(0.5 * (st.y1 - y2));
  const double sp = std::sinh(0.5 * (st.y1 + y2));
  if (s * s + sm * sm < kSingularFloor)
    throw SingularityError("reduced state at the dx = 0 collision point");
  if (c * c + sp * sp < kSingularFloor)
    throw SingularityError("reduced state at a dx = pi singular point");
}

void velocity_unchecked(double dx, double y1, const ReducedParams& p,
                        ReducedVelocity& out) {
  const double x[2] = {dx, 0.0};
  const double y[2] = {y1, (p.c - p.gamma1 * y1) / p.gamma2};
  const double g[2] = {p.gamma1, p.gamma2};
  double vx[2];
  double vy[2];
  velocity(x, y, g, vx, vy);
  out.x1dot = vx[0];
  out.x2dot = vx[1];
  out.ddx = vx[0] - vx[1];
  out.dy1 = vy[0];
}

// dH/dy1 along a line of constant dx; may be infinite at a singular point.
double line_derivative(double dx, double y1, const ReducedParams& p) {
  ReducedVelocity v;
  velocity_unchecked(dx, y1, p, v);
  return p.gamma1 * v.ddx;
}

CriticalKind classify_hessian(double hxx, double hyy, double hxy) {
  const double det = hxx * hyy - hxy * hxy;
  const double scale = std::max({std::abs(hxx), std::abs(hyy), std::abs(hxy), 1e-300});
  if (std::abs(det) <= 1e-10 * scale * scale) return CriticalKind::degenerate;
  if (det < 0.0) return CriticalKind::saddle;
  return hxx + hyy > 0.0 ? CriticalKind::minimum : CriticalKind::maximum;
}

template <class F>
double solve_bracket(F f, double a, double b, double fa, double fb) {
  std::uintmax_t it = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, it);
  return 0.5 * (r.first + r.second);
}

double scan_bound(const ReducedParams& p) {
  if (p.gamma1 == p.gamma2) return std::abs(p.c) / (2.0 * p.gamma1) + 15.0;
  const double slope = asymptotic_slope(p);
  double y = 5.0;
  auto settled = [&](double bound) {
    for (double dx : {0.0, kPi}) {
      if (std::abs(line_derivative(dx, bound, p) - slope) > 0.01 * slope) return false;
      if (std::abs(line_derivative(dx, -bound, p) + slope) > 0.01 * slope) return false;
    }
    return true;
  };
  while (!settled(y) && y < 1e5) y *= 2.0;
  return y;
}

std::vector<CriticalPoint> roots_on_line(double dx, std::optional<double> singular_y,
                                         double bound, const ReducedParams& p,
                                         const CriticalOptions& opts) {
  std::vector<double> ys;
  ys.reserve(opts.samples + 200);
  for (std::size_t i = 0; i <= opts.samples; ++i)
    ys.push_back(-bound + 2.0 * bound * static_cast<double>(i) /
                              static_cast<double>(opts.samples));
  if (singular_y) {
    for (int k = 0; k <= 48; ++k) {
      double d = bound * std::pow(10.0, -k / 4.0);
      ys.push_back(*singular_y - d);
      ys.push_back(*singular_y + d);
    }
  }
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  ys.erase(std::remove_if(ys.begin(), ys.end(),
                          [&](double y) { return y < -bound || y > bound; }),
           ys.end());

  auto f = [&](double y) { return line_derivative(dx, y, p); };
  std::vector<double> fs(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) fs[i] = f(ys[i]);

  // Below this, dH/dy1 is rounding noise (equal-strength tails decay to 0).
  const double noise = 1e-13 * p.gamma1 * (p.gamma1 + p.gamma2);
  std::vector<CriticalPoint> out;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    double a = ys[i];
    double b = ys[i + 1];
    if (singular_y && a <= *singular_y && *singular_y <= b) continue;
    if (!std::isfinite(fs[i]) || !std::isfinite(fs[i + 1])) continue;
    if (fs[i] == 0.0 && i > 0) continue;  // already reported as the right end
    if (!(fs[i] * fs[i + 1] <= 0.0)) continue;
    if (std::max(std::abs(fs[i]), std::abs(fs[i + 1])) < noise) continue;
    double y = solve_bracket(f, a, b, fs[i], fs[i + 1]);
    ReducedState st{dx, y};
    const double h = opts.hessian_step;
    auto gxp = reduced_gradient({dx + h, y}, p);
    auto gxm = reduced_gradient({dx - h, y}, p);
    auto gyp = reduced_gradient({dx, y + h}, p);
    auto gym = reduced_gradient({dx, y - h}, p);
    double hxx = (gxp[0] - gxm[0]) / (2 * h);
    double hyy = (gyp[1] - gym[1]) / (2 * h);
    double hxy = (gyp[0] - gym[0]) / (2 * h);
    out.push_back({st, classify_hessian(hxx, hyy, hxy), reduced_hamiltonian(st, p)});
  }
  return out;
}

}  // namespace

void ReducedParams::validate() const {
  if (!std::isfinite(gamma1) || !std::isfinite(gamma2) || !std::isfinite(c))
    throw ValidationError("reduced parameters must be finite");
  if (!(gamma2 > 0.0) || !(gamma1 >= gamma2))
    throw ValidationError("reduced parameters need gamma1 >= gamma2 > 0");
}

double reduced_y2(const ReducedState& st, const ReducedParams& p) {
  return (p.c - p.gamma1 * st.y1) / p.gamma2;
}

std::array<double, 4> reduced_lift(const ReducedState& st, const ReducedParams& p) {
  return {st.dx, 0.0, st.y1, reduced_y2(st, p)};
}

VortexSystem reduced_system(const ReducedState& st, const ReducedParams& p) {
  p.validate();
  auto l = reduced_lift(st, p);
  return VortexSystem({Vortex{{l[0], l[2]}, p.gamma1, "v1"},
                       Vortex{{l[1], l[3]}, p.gamma2, "v2"}});
}

double reduced_hamiltonian(const ReducedState& st, const ReducedParams& p) {
  p.validate();
  check_regular(st, p);
  const double x[2] = {st.dx, 0.0};
  const double y[2] = {st.y1, reduced_y2(st, p)};
  const double g[2] = {p.gamma1, p.gamma2};
  return hamiltonian(x, y, g);
}

ReducedVelocity reduced_velocity(const ReducedState& st, const ReducedParams& p) {
  p.validate();
  check_regular(st, p);
  ReducedVelocity v;
  velocity_unchecked(st.dx, st.y1, p, v);
  return v;
}

std::array<double, 2> reduced_gradient(const ReducedState& st,
                                       const ReducedParams& p) {
  auto v = reduced_velocity(st, p);
  return {-p.gamma1 * v.dy1, p.gamma1 * v.ddx};
}

double equal_strength_limit(double dx, double gamma, double c) {
  const double co = std::cos(0.5 * dx);
  const double sh = std::sinh(c / (2.0 * gamma));
  return gamma * gamma / (4.0 * kPi) * std::log(co * co + sh * sh);
}

double asymptotic_slope(const ReducedParams& p) {
  return p.gamma1 * (p.gamma1 - p.gamma2) / (4.0 * kPi);
}

const char* to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::saddle:
      return "saddle";
    case CriticalKind::minimum:
      return "minimum";
    case CriticalKind::maximum:
      return "maximum";
    case CriticalKind::degenerate:
      break;
  }
  return "degenerate";
}

const char* to_string(OrbitType t) {
  switch (t) {
    case OrbitType::I:
      return "I";
    case OrbitType::II:
      return "II";
    case OrbitType::III:
      break;
  }
  return "III";
}

std::size_t CriticalReport::count(CriticalKind k) const {
  auto pred = [k](const CriticalPoint& c) { return c.kind == k; };
  return static_cast<std::size_t>(std::count_if(on_zero.begin(), on_zero.end(), pred) +
                                  std::count_if(on_pi.begin(), on_pi.end(), pred));
}

CriticalReport critical_points(const ReducedParams& p, const CriticalOptions& opts) {
  p.validate();
  CriticalReport rep;
  rep.params = p;
  rep.scan_bound = scan_bound(p);
  const double y_zero = p.c / (p.gamma1 + p.gamma2);
  rep.singular.push_back({{0.0, y_zero}, +1});
  rep.on_zero = roots_on_line(0.0, y_zero, rep.scan_bound, p, opts);
  if (p.gamma1 != p.gamma2) {
    const double y_pi = p.c / (p.gamma1 - p.gamma2);
    rep.singular.push_back({{kPi, y_pi}, -1});
    rep.on_pi = roots_on_line(kPi, y_pi, rep.scan_bound, p, opts);
  } else if (p.c == 0.0) {
    rep.pi_line_singular = true;
  } else {
    rep.on_pi = roots_on_line(kPi, std::nullopt, rep.scan_bound, p, opts);
  }
  return rep;
}

OrbitReport classify_orbit(const ReducedState& st0, const ReducedParams& p,
                           const OrbitOptions& opts) {
  p.validate();
  if (!(opts.t_max > 0.0)) throw ValidationError("t_max must be positive");
  const ReducedVelocity v0 = reduced_velocity(st0, p);
  const double scale = std::abs(p.gamma1) * (std::abs(p.gamma1) + std::abs(p.gamma2)) / (4.0 * kPi);
  if (std::hypot(v0.ddx, v0.dy1) <= 1e-9 * scale)
    throw DomainError("reduced start is a critical point");

  ode::Rhs rhs = [p](double, std::span<const double> s, std::span<double> out) {
    ReducedVelocity v;
    velocity_unchecked(s[0], s[1], p, v);
    out[0] = v.ddx;
    out[1] = v.dy1;
    out[2] = v.x1dot;
    out[3] = v.x2dot;
  };
  ode::Options o{opts.rel_tol, opts.abs_tol,
                 std::numeric_limits<double>::infinity(), 0.0};
  ode::Dop853 stepper(rhs, 0.0, {st0.dx, st0.y1, 0.0, 0.0}, opts.t_max, o);
  ReturnDetector det(
      [](std::span<const double> s) { return std::array<double, 2>{s[0], s[1]}; },
      {st0.dx, st0.y1}, {v0.ddx, v0.dy1}, true);

  OrbitReport rep;
  rep.dx_min = rep.dx_max = st0.dx;
  while (!stepper.done()) {
    stepper.step();
    const auto& seg = stepper.dense();
    auto tr = det.feed(seg);
    const double t_stop = tr ? *tr : seg.t_new();
    for (int k = 1; k <= 8; ++k) {
      double dxv = seg.eval(seg.t_old() + (t_stop - seg.t_old()) * k / 8.0, 0);
      rep.dx_min = std::min(rep.dx_min, dxv);
      rep.dx_max = std::max(rep.dx_max, dxv);
    }
    if (!tr) continue;
    std::array<double, 4> s;
    seg.eval(*tr, s);
    rep.period = *tr;
    rep.winding1 = s[2];
    rep.winding2 = s[3];
    rep.dx_advance = s[0] - st0.dx;
    rep.closure = std::hypot(wrap_signed(s[0] - st0.dx), s[1] - st0.y1);
    if (std::abs(rep.dx_advance) > kPi) {
      rep.type = OrbitType::III;
    } else {
      double mid = wrap_signed(0.5 * (rep.dx_min + rep.dx_max));
      rep.type = std::abs(mid) < 0.5 * kPi ? OrbitType::I : OrbitType::II;
    }
    rep.co_rotating = (rep.winding1 > 0.0) == (rep.winding2 > 0.0);
    const double h0 = reduced_hamiltonian(st0, p);
    double h1 = h0;
    try {
      h1 = reduced_hamiltonian({s[0], s[1]}, p);
    } catch (const SingularityError&) {
      h1 = std::numeric_limits<double>::infinity();
    }
    rep.energy_drift = std::abs(h1 - h0) / std::max(std::abs(h0), 1.0);
    return rep;
  }
  throw SeparatrixTimeout("no return of the reduced orbit before t_max = " +
                          std::to_string(opts.t_max));
}

std::vector<std::array<double, 3>> reduced_orbit_samples(
    const ReducedState& st0, const ReducedParams& p, double t_end, double dt,
    const OrbitOptions& opts) {
  p.validate();
  check_regular(st0, p);
  if (!(dt > 0.0) || !(t_end >= 0.0))
    throw ValidationError("sampling needs dt > 0 and t_end >= 0");
  ode::Rhs rhs = [p](double, std::span<const double> s, std::span<double> out) {
    ReducedVelocity v;
    velocity_unchecked(s[0], s[1], p, v);
    out[0] = v.ddx;
    out[1] = v.dy1;
  };
  std::vector<std::array<double, 3>> rows{{0.0, st0.dx, st0.y1}};
  if (t_end == 0.0) return rows;
  ode::Options o{opts.rel_tol, opts.abs_tol,
                 std::numeric_limits<double>::infinity(), 0.0};
  ode::Dop853 stepper(rhs, 0.0, {st0.dx, st0.y1}, t_end, o);
  std::size_t k = 1;
  double buf[2];
  while (!stepper.done()) {
    stepper.step();
    const auto& seg = stepper.dense();
    while (true) {
      double t = std::min(static_cast<double>(k) * dt, t_end);
      if (t > seg.t_new() || rows.back()[0] == t_end) break;
      seg.eval(t, buf);
      rows.push_back({t, buf[0], buf[1]});
      ++k;
    }
  }
  return rows;
}

double Portrait::dx_at(std::size_t i) const {
  if (grid.nx <= 1) return grid.dx_min;
  return grid.dx_min + (grid.dx_max - grid.dx_min) * static_cast<double>(i) /
                           static_cast<double>(grid.nx - 1);
}

double Portrait::y_at(std::size_t j) const {
  if (grid.ny <= 1) return grid.y_min;
  return grid.y_min + (grid.y_max - grid.y_min) * static_cast<double>(j) /
                          static_cast<double>(grid.ny - 1);
}

Portrait phase_portrait(const ReducedParams& p, const PortraitGrid& grid,
                        unsigned threads) {
  p.validate();
  if (grid.nx == 0 || grid.ny == 0) throw ValidationError("empty portrait grid");
  if (!(grid.dx_max >= grid.dx_min) || !(grid.y_max >= grid.y_min))
    throw ValidationError("portrait ranges must be increasing");
  Portrait out;
  out.grid = grid;
  out.critical = critical_points(p);
  out.h.assign(grid.nx * grid.ny, kNaN);
  const auto& sing = out.critical.singular;
  const bool pi_line = out.critical.pi_line_singular;
  detail::parallel_for(grid.ny, threads, [&](std::size_t j) {
    const double y = out.y_at(j);
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double dx = out.dx_at(i);
      bool masked = false;
      for (const auto& s : sing)
        if (std::hypot(wrap_signed(dx - s.state.dx), y - s.state.y1) < grid.mask_radius)
          masked = true;
      if (pi_line && std::abs(wrap_signed(dx - kPi)) < grid.mask_radius) masked = true;
      if (masked) continue;
      try {
        out.h[j * grid.nx + i] = reduced_hamiltonian({dx, y}, p);
      } catch (const SingularityError&) {
      }
    }
  });
  return out;
}

std::vector<CriticalReport> sweep_critical(const std::vector<ReducedParams>& ps,
                                           unsigned threads,
                                           const CriticalOptions& opts) {
  std::vector<CriticalReport> out(ps.size());
  detail::parallel_for(ps.size(), threads,
                       [&](std::size_t i) { out[i] = critical_points(ps[i], opts); });
  return out;
}

std::vector<WindingSample> sweep_windings(const std::vector<ReducedParams>& ps,
                                          const ReducedState& start, unsigned threads,
                                          const OrbitOptions& opts) {
  std::vector<WindingSample> out(ps.size());
  detail::parallel_for(ps.size(), threads, [&](std::size_t i) {
    out[i].params = ps[i];
    out[i].start = start;
    try {
      out[i].report = classify_orbit(start, ps[i], opts);
    } catch (const Error& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

std::vector<std::size_t> winding_sign_changes(const std::vector<WindingSample>& s) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (!s[i].report || !s[i + 1].report) continue;
    if ((s[i].report->winding1 > 0.0) != (s[i + 1].report->winding1 > 0.0))
      idx.push_back(i);
  }
  return idx;
}

}  // namespace mobius
