#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mobius/dynamics.hpp"
#include "mobius/geometry.hpp"

namespace mobius {

enum class EquilibriumKind { fixed, relative, none };

const char* to_string(EquilibriumKind k);

struct EquilibriumResult {
  VortexSystem system;
  EquilibriumKind kind = EquilibriumKind::none;
  /// Common horizontal velocity; 0 for fixed equilibria.
  double drift_velocity = 0.0;
  /// Largest deviation from the claimed kind (or from either, for none).
  double residual = 0.0;
};

/// Self-induced velocity of a lone vortex: ((gamma / 4pi) tanh y, 0).
Velocity single_vortex_velocity(double gamma, double y);

struct FixedPair {
  double y1 = 0.0;
  double y2 = 0.0;
  /// gamma1 y1 + gamma2 y2.
  double momentum = 0.0;
};

/// Both branches of the stationary two-vortex state with x1 = x2.
/// Throws DomainError unless gamma1 * gamma2 > 0 and gamma1 != gamma2.
std::array<FixedPair, 2> fixed_equilibrium_two(double gamma1, double gamma2);

/// The pair placed at x1 = x2 = x.
VortexSystem fixed_pair_system(double gamma1, double gamma2,
                               const FixedPair& pair, double x = 0.0);

struct EquatorialOptions {
  int max_iterations = 100;
  double tolerance = 1e-13;
};

struct EquatorialResult {
  std::vector<double> x;
  std::vector<double> strengths;
  /// max |velocity| over all vortices at the solution.
  double residual = 0.0;
  int iterations = 0;

  VortexSystem system() const;
};

/// Solves for an equilibrium on y = 0 with x_1 = 0 by damped Newton.
///
/// Strengths must alternate in sign and have odd length. `initial` gives
/// x_2..x_N (empty selects equal spacing). Throws ConvergenceError when the
/// iteration stalls and OrderingViolation when an iterate leaves
/// 0 < x_2 < ... < x_N < pi.
EquatorialResult equatorial_equilibrium(const std::vector<double>& strengths,
                                        std::vector<double> initial = {},
                                        const EquatorialOptions& opts = {});

/// Newton from `starts` random ordered initial guesses; distinct roots only.
std::vector<EquatorialResult> equatorial_scan(
    const std::vector<double>& strengths, int starts, std::uint64_t seed,
    const EquatorialOptions& opts = {});

struct NRingSpec {
  int n = 1;
  double gamma = 1.0;
  double y = 1.0;
};

/// Ring of n equally spaced vortices on the cover circle at height y,
/// brought to the canonical chart. Even n puts n/2 vortices at +y and n/2
/// at -y with negated strength; odd n staggers the two rows.
VortexSystem nring(const NRingSpec& ring);

/// Horizontal velocity of the ring: gamma n / (4pi) times coth(n y) for even
/// n and tanh(n y) for odd n.
double nring_velocity_analytic(const NRingSpec& ring);

enum class TrigVariant { sin, cos };

/// Closed forms of sum_{j=1..K} sinh(2y) / (f^2(pi j / K) + sinh^2 y),
/// f = sin or cos.
double trig_sum(int k, double y, TrigVariant variant);
double trig_sum_direct(int k, double y, TrigVariant variant);

/// Classifies s as fixed (all |v| <= tol), relative (all |dy/dt| <= tol and
/// dx/dt spread <= tol) or neither.
EquilibriumResult verify_relative_equilibrium(const VortexSystem& s, double tol);

/// sum_{k,l} gamma_k gamma_l tanh((y_k + y_l) / 2). Vanishes for every
/// stationary configuration whose vortices share one x.
double vertical_line_condition(const VortexSystem& s);

/// sum_k gamma_k^2 y_k.
double squared_strength_moment(const VortexSystem& s);

}  // namespace mobius
