#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mobius/geometry.hpp"

namespace mobius {

/// Random collision-free system: x uniform on [0, pi), y uniform on
/// [-y_max, y_max], |gamma| uniform on [g_min, g_max] with random sign, every
/// lifted pair at least `min_separation` apart.
VortexSystem random_system(std::mt19937_64& rng, std::size_t n, double y_max = 2.0,
                           double g_min = 0.5, double g_max = 2.0,
                           double min_separation = 0.1);

/// Central-difference gradient of H: {dH/dx_k..., dH/dy_k...}.
std::vector<double> numeric_gradient(const VortexSystem& s, double h = 1e-5);

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Multiplies every threshold; values below 1 tighten the suite.
  double tol_scale = 1.0;
  /// Perturbs the analytic ring velocity to confirm the suite can fail.
  bool mutate_ring_constant = false;
};

std::vector<CheckResult> run_property_suite(const VerifyOptions& opts = {});

}  // namespace mobius
