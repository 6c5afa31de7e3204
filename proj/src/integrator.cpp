#include "mobius/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "mobius/dynamics.hpp"
#include "mobius/errors.hpp"

namespace mobius {

namespace {

/// Root of f on [a, b] given a sign change; a may exceed b.
template <class F>
double bracketed_root(F f, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  std::uintmax_t max_iter = 100;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, max_iter);
  return 0.5 * (r.first + r.second);
}

double sheet(double x) { return std::floor(x / kPi); }

VortexSystem canonical_system(std::span<const double> state,
                              const std::vector<double>& strengths,
                              const std::vector<std::string>& labels) {
  const std::size_t n = strengths.size();
  std::vector<Vortex> vs;
  vs.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    vs.push_back(canonicalize(state[i], state[n + i], strengths[i], labels[i]));
  return VortexSystem(std::move(vs), 0.0);
}

Sample make_sample(double t, std::span<const double> state,
                   const std::vector<double>& strengths,
                   const std::vector<std::string>& labels) {
  const std::size_t n = strengths.size();
  Sample s;
  s.t = t;
  s.system = canonical_system(state, strengths, labels);
  s.unwrapped.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.unwrapped[i] = {state[i], state[n + i]};
  return s;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw ValidationError("tolerances must be positive");
  if (!(sample_dt > 0.0)) throw ValidationError("sample_dt must be positive");
  if (!(max_step > 0.0)) throw ValidationError("max_step must be positive");
  if (!(collision_radius >= 0.0))
    throw ValidationError("collision_radius must be nonnegative");
  if (!std::isfinite(t_end)) throw ValidationError("t_end must be finite");
}

ode::Rhs vortex_rhs(std::vector<double> strengths) {
  return [g = std::move(strengths)](double, std::span<const double> s,
                                    std::span<double> out) {
    const std::size_t n = g.size();
    velocity(s.subspan(0, n), s.subspan(n, n), g, out.subspan(0, n),
             out.subspan(n, n));
  };
}

double Trajectory::t_begin() const {
  return samples.empty() ? 0.0 : samples.front().t;
}

double Trajectory::t_end() const {
  return samples.empty() ? 0.0 : samples.back().t;
}

std::vector<double> Trajectory::state_at(double t) const {
  const std::size_t n = strengths.size();
  std::vector<double> out(2 * n);
  if (segments.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = samples.front().unwrapped[i].x;
      out[n + i] = samples.front().unwrapped[i].y;
    }
    return out;
  }
  const double dir = segments.front().t_new() >= segments.front().t_old() ? 1.0 : -1.0;
  auto it = std::lower_bound(
      segments.begin(), segments.end(), t,
      [dir](const ode::DenseSegment& s, double v) { return dir * s.t_new() < dir * v; });
  if (it == segments.end()) it = std::prev(segments.end());
  it->eval(t, out);
  return out;
}

VortexSystem Trajectory::system_at(double t) const {
  return canonical_system(state_at(t), strengths, labels);
}

Trajectory integrate(const VortexSystem& s0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (s0.empty()) throw ValidationError("cannot integrate an empty system");
  const std::size_t n = s0.size();

  Trajectory traj;
  traj.strengths = s0.strengths();
  for (const auto& v : s0) traj.labels.push_back(v.label);

  std::vector<double> state(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    state[i] = s0[i].position.x;
    state[n + i] = s0[i].position.y;
  }
  const auto& g = traj.strengths;
  auto energy = [&](std::span<const double> s) {
    return hamiltonian(s.subspan(0, n), s.subspan(n, n), g);
  };
  auto impulse = [&](std::span<const double> s) {
    double phi = 0.0;
    for (std::size_t i = 0; i < n; ++i) phi += g[i] * s[n + i];
    return phi;
  };

  Diagnostics& diag = traj.diagnostics;
  diag.h0 = energy(state);
  diag.phi0 = impulse(state);
  auto observe = [&](std::span<const double> s) {
    double dh = std::abs(energy(s) - diag.h0);
    diag.max_abs_h_drift = std::max(diag.max_abs_h_drift, dh);
    diag.max_rel_h_drift = std::max(
        diag.max_rel_h_drift, diag.h0 != 0.0 ? dh / std::abs(diag.h0) : dh);
    diag.max_abs_phi_drift =
        std::max(diag.max_abs_phi_drift, std::abs(impulse(s) - diag.phi0));
  };

  traj.samples.push_back(make_sample(0.0, state, g, traj.labels));
  if (cfg.t_end == 0.0) return traj;

  const double dir = cfg.t_end > 0.0 ? 1.0 : -1.0;
  const double span = std::abs(cfg.t_end);
  const auto n_regular = static_cast<std::size_t>(std::floor(span / cfg.sample_dt));
  std::size_t next_sample = 1;
  auto sample_time = [&](std::size_t k) {
    double t = dir * static_cast<double>(k) * cfg.sample_dt;
    // Final sample lands on t_end; avoid a near-duplicate just before it.
    if (k > n_regular || span - static_cast<double>(k) * cfg.sample_dt <= 1e-12 * span)
      return cfg.t_end;
    return t;
  };

  ode::Options opts{cfg.rel_tol, cfg.abs_tol, cfg.max_step, 0.0};
  ode::Dop853 stepper(vortex_rhs(g), 0.0, state, cfg.t_end, opts);

  std::vector<double> buf(2 * n);
  std::vector<double> xs(n), ys(n);
  bool finished = false;
  while (!stepper.done()) {
    stepper.step();
    const ode::DenseSegment& seg = stepper.dense();
    const double ta = seg.t_old();
    const double tb = seg.t_new();

    const auto& y = stepper.y();
    for (double v : y)
      if (!std::isfinite(v))
        throw StepFailure("non-finite state at t=" + std::to_string(tb), tb);
    std::copy(y.begin(), y.begin() + n, xs.begin());
    std::copy(y.begin() + n, y.end(), ys.begin());
    if (min_lifted_distance(xs, ys) < cfg.collision_radius)
      throw CollisionError("collision at t=" + std::to_string(tb), tb);

    // Chart boundary crossings inside the step.
    constexpr int kSub = 8;
    std::vector<FlipEvent> found;
    for (std::size_t i = 0; i < n; ++i) {
      double t_prev = ta;
      double x_prev = seg.eval(ta, i);
      for (int k = 1; k <= kSub; ++k) {
        double t_cur = ta + (tb - ta) * k / kSub;
        double x_cur = seg.eval(t_cur, i);
        double s_prev = sheet(x_prev);
        double s_cur = sheet(x_cur);
        if (s_prev != s_cur) {
          double step = s_cur > s_prev ? 1.0 : -1.0;
          for (double m = s_prev; m != s_cur; m += step) {
            double level = (step > 0 ? m + 1.0 : m) * kPi;
            auto f = [&](double t) { return seg.eval(t, i) - level; };
            double tr = bracketed_root(f, t_prev, t_cur, x_prev - level,
                                       x_cur - level);
            found.push_back({tr, traj.labels[i]});
          }
        }
        t_prev = t_cur;
        x_prev = x_cur;
      }
    }
    std::sort(found.begin(), found.end(), [dir](const FlipEvent& a, const FlipEvent& b) {
      return dir * a.t < dir * b.t;
    });
    traj.flip_events.insert(traj.flip_events.end(), found.begin(), found.end());

    while (!finished) {
      double ts = sample_time(next_sample);
      if (dir * (ts - tb) > 0.0) break;
      seg.eval(ts, buf);
      observe(buf);
      traj.samples.push_back(make_sample(ts, buf, g, traj.labels));
      if (ts == cfg.t_end) finished = true;
      ++next_sample;
    }
    observe(y);
    traj.segments.push_back(seg);
  }
  diag.steps = traj.segments.size();
  diag.evaluations = stepper.evaluations();
  return traj;
}

ReturnDetector::ReturnDetector(Projection project, std::array<double, 2> origin,
                               std::array<double, 2> direction,
                               bool angular_first, int subdivisions)
    : project_(std::move(project)),
      origin_(origin),
      angular_(angular_first),
      subdivisions_(subdivisions) {
  double norm = std::hypot(direction[0], direction[1]);
  normal_ = {direction[0] / norm, direction[1] / norm};
}

std::array<double, 2> ReturnDetector::offset(std::span<const double> state) const {
  auto p = project_(state);
  double d0 = p[0] - origin_[0];
  if (angular_) d0 = wrap_signed(d0);
  return {d0, p[1] - origin_[1]};
}

double ReturnDetector::height(const std::array<double, 2>& d) const {
  return d[0] * normal_[0] + d[1] * normal_[1];
}

std::optional<double> ReturnDetector::feed(const ode::DenseSegment& seg) {
  std::vector<double> buf(seg.dim());
  if (!have_prev_) {
    seg.eval(seg.t_old(), buf);
    prev_t_ = seg.t_old();
    prev_d_ = offset(buf);
    have_prev_ = true;
  }
  const double ta = seg.t_old();
  const double tb = seg.t_new();
  for (int k = 1; k <= subdivisions_; ++k) {
    double t = ta + (tb - ta) * k / subdivisions_;
    seg.eval(t, buf);
    auto d = offset(buf);
    double h_prev = height(prev_d_);
    double h = height(d);
    bool wrapped = angular_ && std::abs(d[0] - prev_d_[0]) > kPi;
    if (!wrapped && h_prev < 0.0 && h >= 0.0) {
      auto f = [&](double s) {
        std::vector<double> tmp(seg.dim());
        seg.eval(s, tmp);
        return height(offset(tmp));
      };
      double tr = bracketed_root(f, prev_t_, t, h_prev, h);
      seg.eval(tr, buf);
      auto dr = offset(buf);
      double dist = std::hypot(dr[0], dr[1]);
      if (max_excursion_ > 0.0 && dist < 0.5 * max_excursion_) return tr;
    }
    max_excursion_ = std::max(max_excursion_, std::hypot(d[0], d[1]));
    prev_t_ = t;
    prev_d_ = d;
  }
  return std::nullopt;
}

PeriodReport detect_period(const Trajectory& traj, const std::string& label_a,
                           const std::string& label_b, double steady_tol) {
  auto find = [&](const std::string& l) {
    auto it = std::find(traj.labels.begin(), traj.labels.end(), l);
    if (it == traj.labels.end()) throw ValidationError("unknown label '" + l + "'");
    return static_cast<std::size_t>(it - traj.labels.begin());
  };
  const std::size_t a = find(label_a);
  const std::size_t b = find(label_b);
  const std::size_t n = traj.strengths.size();
  auto project = [a, b, n](std::span<const double> s) -> std::array<double, 2> {
    return {s[a] - s[b], s[n + a]};
  };

  PeriodReport report;
  const auto s0 = traj.state_at(traj.t_begin());
  std::vector<double> v0(2 * n);
  vortex_rhs(traj.strengths)(traj.t_begin(), s0, v0);
  std::array<double, 2> dir{v0[a] - v0[b], v0[n + a]};
  auto p0 = project(s0);

  if (std::hypot(dir[0], dir[1]) < 1e-14) {
    double dev = 0.0;
    std::vector<double> st(2 * n);
    for (const auto& smp : traj.samples) {
      for (std::size_t i = 0; i < n; ++i) {
        st[i] = smp.unwrapped[i].x;
        st[n + i] = smp.unwrapped[i].y;
      }
      auto p = project(st);
      dev = std::max(dev, std::hypot(wrap_signed(p[0] - p0[0]), p[1] - p0[1]));
    }
    report.steady = dev <= steady_tol;
    return report;
  }

  ReturnDetector det(project, p0, dir, true);
  for (const auto& seg : traj.segments) {
    if (auto tr = det.feed(seg)) {
      report.period = std::abs(*tr - traj.t_begin());
      return report;
    }
  }
  return report;
}

}  // namespace mobius
