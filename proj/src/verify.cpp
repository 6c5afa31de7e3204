#include "mobius/verify.hpp"

#include <algorithm>
#include <cmath>

#include "mobius/dynamics.hpp"
#include "mobius/equilibria.hpp"
#include "mobius/errors.hpp"
#include "mobius/integrator.hpp"
#include "mobius/reduced.hpp"

namespace mobius {

VortexSystem random_system(std::mt19937_64& rng, std::size_t n, double y_max,
                           double g_min, double g_max, double min_separation) {
  std::uniform_real_distribution<double> ux(0.0, kPi);
  std::uniform_real_distribution<double> uy(-y_max, y_max);
  std::uniform_real_distribution<double> ug(g_min, g_max);
  std::bernoulli_distribution sign(0.5);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<Vortex> vs;
    for (std::size_t i = 0; i < n; ++i)
      vs.push_back(Vortex{{ux(rng), uy(rng)}, (sign(rng) ? 1.0 : -1.0) * ug(rng), {}});
    VortexSystem s(std::move(vs), 0.0);
    if (min_lifted_distance(s) >= min_separation) return s;
  }
  throw ValidationError("could not draw a system with the requested separation");
}

std::vector<double> numeric_gradient(const VortexSystem& s, double h) {
  const std::size_t n = s.size();
  auto x = s.xs();
  auto y = s.ys();
  auto g = s.strengths();
  std::vector<double> grad(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (int comp = 0; comp < 2; ++comp) {
      auto& v = comp == 0 ? x : y;
      const double keep = v[k];
      v[k] = keep + h;
      double hp = hamiltonian(x, y, g);
      v[k] = keep - h;
      double hm = hamiltonian(x, y, g);
      v[k] = keep;
      grad[comp * n + k] = (hp - hm) / (2.0 * h);
    }
  }
  return grad;
}

namespace {

class Suite {
 public:
  explicit Suite(double scale) : scale_(scale) {}
  void add(std::string name, double measured, double threshold) {
    threshold *= scale_;
    results_.push_back({std::move(name), measured <= threshold, measured, threshold});
  }
  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  double scale_;
  std::vector<CheckResult> results_;
};

}  // namespace

std::vector<CheckResult> run_property_suite(const VerifyOptions& opts) {
  Suite suite(opts.tol_scale);
  std::mt19937_64 rng(opts.seed);

  {
    double dh = 0.0, dphi = 0.0, dv = 0.0, dtr = 0.0, dlift = 0.0;
    std::uniform_int_distribution<int> un(1, 5);
    std::uniform_real_distribution<double> ud(-10.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
      auto s = random_system(rng, static_cast<std::size_t>(un(rng)));
      auto f = mobius_flip(s);
      double h = hamiltonian(s);
      dh = std::max(dh, std::abs(hamiltonian(f) - h) / std::max(1.0, std::abs(h)));
      double phi = momentum(s);
      dphi = std::max(dphi, std::abs(momentum(f) - phi) / std::max(1.0, std::abs(phi)));
      auto v = velocity(s);
      auto vf = velocity(f);
      for (std::size_t i = 0; i < s.size(); ++i)
        dv = std::max({dv, std::abs(vf[i].dx - v[i].dx), std::abs(vf[i].dy + v[i].dy)});
      auto t = translate(s, ud(rng));
      auto vt = velocity(t);
      dtr = std::max(dtr, std::abs(hamiltonian(t) - h) / std::max(1.0, std::abs(h)));
      // A vortex pushed across the chart seam comes back flipped, so its dy flips too.
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double sheet = t[i].strength == s[i].strength ? 1.0 : -1.0;
        dtr = std::max({dtr, std::abs(vt[i].dx - v[i].dx),
                        std::abs(vt[i].dy - sheet * v[i].dy)});
      }
      auto lifted = lift(s);
      for (auto& lv : lifted) lv.point.x = wrap_two_pi(lv.point.x + kPi);
      dlift = std::max(dlift, same_lifted_set(lift(f), lifted, 1e-12) ? 0.0 : 1.0);
    }
    suite.add("flip_hamiltonian", dh, 1e-12);
    suite.add("flip_momentum", dphi, 1e-14);
    suite.add("flip_velocity", dv, 1e-12);
    suite.add("translation_invariance", dtr, 1e-12);
    suite.add("flip_lift_rotation", dlift, 0.0);
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      auto s = random_system(rng, 3, 2.0, 0.5, 2.0, 0.3);
      auto grad = numeric_gradient(s);
      auto v = velocity(s);
      const std::size_t n = s.size();
      for (std::size_t k = 0; k < n; ++k) {
        const double g = s[k].strength;
        worst = std::max({worst, std::abs(v[k].dx - grad[n + k] / g),
                          std::abs(v[k].dy + grad[k] / g)});
      }
    }
    suite.add("hamiltonian_gradient", worst, 1e-6);
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      auto s = random_system(rng, 2);
      auto v = velocity(s);
      auto w = two_vortex_velocity(s[0].position.x, s[0].position.y, s[0].strength,
                                   s[1].position.x, s[1].position.y, s[1].strength);
      for (int i = 0; i < 2; ++i)
        worst = std::max({worst,
                          std::abs(v[i].dx - w[i].dx) / std::max(1.0, std::abs(w[i].dx)),
                          std::abs(v[i].dy - w[i].dy) / std::max(1.0, std::abs(w[i].dy))});
    }
    suite.add("two_vortex_equations", worst, 1e-14);
  }

  {
    double worst = 0.0;
    const double mutation = opts.mutate_ring_constant ? 1.0 + 1e-6 : 1.0;
    for (int n = 1; n <= 8; ++n)
      for (double y : {0.3, 1.0, 2.0})
        for (double g : {1.0, 2.0}) {
          NRingSpec ring{n, g, y};
          auto v = velocity(nring(ring));
          double xi = mutation * nring_velocity_analytic(ring);
          for (const auto& w : v)
            worst = std::max({worst, std::abs(w.dx - xi), std::abs(w.dy)});
        }
    suite.add("nring_velocity", worst, 1e-10);
  }

  {
    double worst = 0.0;
    for (int k = 1; k <= 20; ++k)
      for (int i = 0; i <= 29; ++i) {
        double y = 0.1 + 2.9 * i / 29.0;
        for (auto var : {TrigVariant::sin, TrigVariant::cos}) {
          double c = trig_sum(k, y, var);
          worst = std::max(worst, std::abs(c - trig_sum_direct(k, y, var)) / std::abs(c));
        }
      }
    suite.add("trig_sum_identity", worst, 1e-12);
  }

  {
    double worst = 0.0;
    for (double ratio : {1.5, 2.0, 3.0, 10.0})
      for (const auto& pair : fixed_equilibrium_two(ratio, 1.0)) {
        auto w = two_vortex_velocity(0.0, pair.y1, ratio, 0.0, pair.y2, 1.0);
        for (const auto& v : w) worst = std::max({worst, std::abs(v.dx), std::abs(v.dy)});
      }
    suite.add("fixed_equilibrium_residual", worst, 1e-10);
  }

  {
    auto r = equatorial_equilibrium({1.0, -1.0, 1.0}, {0.9, 2.2});
    auto s = r.system();
    auto grad = numeric_gradient(s);
    double g = 0.0;
    for (double v : grad) g = std::max(g, std::abs(v));
    suite.add("equatorial_residual", r.residual, 1e-10);
    suite.add("equatorial_gradient", g, 1e-6);
  }

  {
    double drift = 0.0;
    double back = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
      auto s = random_system(rng, 3, 1.0, 0.5, 1.5, 0.5);
      IntegratorConfig cfg;
      cfg.t_end = 20.0;
      auto tr = integrate(s, cfg);
      const auto& d = tr.diagnostics;
      drift = std::max({drift, d.max_abs_h_drift / std::max(1.0, std::abs(d.h0)),
                        d.max_abs_phi_drift / std::max(1.0, std::abs(d.phi0))});
      auto end = tr.samples.back().system;
      IntegratorConfig rev = cfg;
      rev.t_end = -cfg.t_end;
      auto tb = integrate(end, rev);
      auto fin = tb.samples.back().system;
      for (std::size_t i = 0; i < s.size(); ++i)
        back = std::max(back, std::hypot(wrap_signed(fin[i].position.x - s[i].position.x),
                                         fin[i].position.y - s[i].position.y));
    }
    suite.add("energy_momentum_drift", drift, 1e-8);
    suite.add("time_reversibility", back, 1e-6);
  }

  {
    ReducedParams p{2.0, 1.0, 1.0};
    double worst = 0.0;
    for (int j = 0; j < 200; ++j)
      for (int i = 0; i < 200; ++i) {
        ReducedState st{-kPi + kTwoPi * (i + 0.5) / 200.0, -5.0 + 10.0 * (j + 0.5) / 200.0};
        try {
          auto g = reduced_gradient(st, p);
          worst = std::max(worst, g[0] * std::sin(st.dx));
        } catch (const SingularityError&) {
        }
      }
    suite.add("reduced_sign_law", worst, 0.0);
  }

  {
    ReducedParams p{3.0, 1.0, 1.0};
    auto v = reduced_velocity({0.7, 15.0}, p);
    double e = std::max(std::abs(v.x1dot + (2.0 * p.gamma2 - p.gamma1) / (4.0 * kPi)),
                        std::abs(v.x2dot + p.gamma2 / (4.0 * kPi)));
    suite.add("asymptotic_velocities", e, 1e-5);
  }

  return suite.take();
}

}  // namespace mobius
