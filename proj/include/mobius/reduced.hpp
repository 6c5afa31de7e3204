#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mobius/geometry.hpp"

namespace mobius {

/// Two-vortex reduction: gamma1 >= gamma2 > 0 and gamma1 y1 + gamma2 y2 = C.
struct ReducedParams {
  double gamma1 = 2.0;
  double gamma2 = 1.0;
  double c = 0.0;

  /// Throws ValidationError unless gamma1 >= gamma2 > 0 and all are finite.
  void validate() const;
};

/// (x1 - x2, y1) on the cover.
struct ReducedState {
  double dx = 0.0;
  double y1 = 0.0;
};

struct ReducedVelocity {
  double ddx = 0.0;
  double dy1 = 0.0;
  double x1dot = 0.0;
  double x2dot = 0.0;
};

double reduced_y2(const ReducedState& st, const ReducedParams& p);

/// Cover coordinates of the pair with x2 = 0: {x1, x2, y1, y2}.
std::array<double, 4> reduced_lift(const ReducedState& st, const ReducedParams& p);

/// Two-vortex system on the band realizing the reduced state.
VortexSystem reduced_system(const ReducedState& st, const ReducedParams& p);

/// Throws SingularityError at (0, C/(g1+g2)) and, for g1 != g2, at
/// (pi, C/(g1-g2)); for g1 == g2 and C == 0 the whole line dx = pi.
double reduced_hamiltonian(const ReducedState& st, const ReducedParams& p);
ReducedVelocity reduced_velocity(const ReducedState& st, const ReducedParams& p);

/// (dH/d dx, dH/d y1).
std::array<double, 2> reduced_gradient(const ReducedState& st,
                                       const ReducedParams& p);

/// Limit of the reduced Hamiltonian as y1 -> +-inf when g1 == g2 == gamma:
/// (gamma^2 / 4pi) log(cos^2(dx/2) + sinh^2(C / (2 gamma))).
double equal_strength_limit(double dx, double gamma, double c);

/// Slope of H / |y1| at large |y1|: g1 (g1 - g2) / 4pi.
double asymptotic_slope(const ReducedParams& p);

enum class CriticalKind { saddle, minimum, maximum, degenerate };
const char* to_string(CriticalKind k);

struct CriticalPoint {
  ReducedState state;
  CriticalKind kind = CriticalKind::degenerate;
  double hamiltonian = 0.0;
};

struct SingularPoint {
  ReducedState state;
  /// Sign of the divergence of H at the point.
  int sign = 0;
};

struct CriticalReport {
  ReducedParams params;
  std::vector<CriticalPoint> on_zero;
  std::vector<CriticalPoint> on_pi;
  std::vector<SingularPoint> singular;
  /// The line dx = pi is singular throughout (g1 == g2, C == 0).
  bool pi_line_singular = false;
  /// Half-width of the scanned y1 interval.
  double scan_bound = 0.0;

  std::size_t count(CriticalKind k) const;
};

struct CriticalOptions {
  std::size_t samples = 4000;
  double hessian_step = 1e-5;
};

/// All sign-change roots of dH/dy1 on dx = 0 and dx = pi, classified.
CriticalReport critical_points(const ReducedParams& p,
                               const CriticalOptions& opts = {});

enum class OrbitType { I, II, III };
const char* to_string(OrbitType t);

struct OrbitOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double t_max = 1e5;
};

struct OrbitReport {
  OrbitType type = OrbitType::I;
  double period = 0.0;
  double winding1 = 0.0;
  double winding2 = 0.0;
  bool co_rotating = false;
  /// Net change of x1 - x2 over one period (0 or +-2pi).
  double dx_advance = 0.0;
  /// |H(T) - H(0)| / max(|H(0)|, 1).
  double energy_drift = 0.0;
  /// Distance between the start and the located return point.
  double closure = 0.0;
  double dx_min = 0.0;
  double dx_max = 0.0;
};

/// Integrates the reduced system to its first return and classifies the
/// orbit. Throws SeparatrixTimeout when no return occurs before t_max.
OrbitReport classify_orbit(const ReducedState& st0, const ReducedParams& p,
                           const OrbitOptions& opts = {});

/// Dense sample of a reduced orbit over [0, t_end]: rows {t, dx, y1}.
std::vector<std::array<double, 3>> reduced_orbit_samples(
    const ReducedState& st0, const ReducedParams& p, double t_end, double dt,
    const OrbitOptions& opts = {});

struct PortraitGrid {
  double dx_min = -kPi;
  double dx_max = kPi;
  std::size_t nx = 200;
  double y_min = -5.0;
  double y_max = 5.0;
  std::size_t ny = 200;
  /// Cells closer than this to a singular point are masked.
  double mask_radius = 1e-3;
};

struct Portrait {
  PortraitGrid grid;
  /// Row-major over y then dx; NaN marks masked cells.
  std::vector<double> h;
  CriticalReport critical;

  double dx_at(std::size_t i) const;
  double y_at(std::size_t j) const;
  double at(std::size_t i, std::size_t j) const { return h[j * grid.nx + i]; }
};

Portrait phase_portrait(const ReducedParams& p, const PortraitGrid& grid,
                        unsigned threads = 0);

/// Critical-point reports for many parameter sets, evaluated in parallel.
std::vector<CriticalReport> sweep_critical(const std::vector<ReducedParams>& ps,
                                           unsigned threads = 0,
                                           const CriticalOptions& opts = {});

struct WindingSample {
  ReducedParams params;
  ReducedState start;
  std::optional<OrbitReport> report;
  std::string error;
};

/// Orbit reports across parameter sets from one start, in parallel.
std::vector<WindingSample> sweep_windings(const std::vector<ReducedParams>& ps,
                                          const ReducedState& start,
                                          unsigned threads = 0,
                                          const OrbitOptions& opts = {});

/// Indices i where winding1 changes sign between samples i and i + 1.
std::vector<std::size_t> winding_sign_changes(const std::vector<WindingSample>& s);

}  // namespace mobius
