#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace mobius {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDefaultCollisionRadius = 1e-6;

/// Point on the band's fundamental chart, x in [0, pi) once canonical.
struct ChartPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Point on the cylinder cover C / 2piZ, x in [0, 2pi) once canonical.
struct CylinderPoint {
  double x = 0.0;
  double y = 0.0;
};

struct Vortex {
  ChartPoint position;
  double strength = 0.0;
  std::string label;
};

struct LiftedVortex {
  CylinderPoint point;
  double strength = 0.0;
  std::string label;
};

/// x reduced to [0, 2pi).
double wrap_two_pi(double x);
/// x reduced to [-pi, pi).
double wrap_signed(double x);

CylinderPoint tau(CylinderPoint p);

/// Reduce x mod 2pi; a representative in [pi, 2pi) is replaced by its
/// flipped partner (x - pi, -y, -gamma).
Vortex canonicalize(double x, double y, double gamma, std::string label = {});
Vortex canonicalize(const Vortex& v);

/// Geodesic distance on the flat cylinder of circumference 2pi.
double cylinder_distance(CylinderPoint p, CylinderPoint q);

/// Smallest distance between a chart point and any lift of another.
double lifted_distance(ChartPoint a, ChartPoint b);

/// Ordered collection of canonical vortices with unique labels.
///
/// The constructor canonicalizes every vortex, fills empty labels with
/// "v<index>" and rejects zero or non-finite strengths, duplicate labels
/// and collisions closer than `collision_radius` in the cylinder metric.
class VortexSystem {
 public:
  VortexSystem() = default;
  explicit VortexSystem(std::vector<Vortex> vortices,
                        double collision_radius = kDefaultCollisionRadius);

  std::size_t size() const { return vortices_.size(); }
  bool empty() const { return vortices_.empty(); }
  const Vortex& operator[](std::size_t i) const { return vortices_[i]; }
  const std::vector<Vortex>& vortices() const { return vortices_; }
  auto begin() const { return vortices_.begin(); }
  auto end() const { return vortices_.end(); }

  std::optional<std::size_t> find(const std::string& label) const;

  std::vector<double> xs() const;
  std::vector<double> ys() const;
  std::vector<double> strengths() const;

 private:
  std::vector<Vortex> vortices_;
};

/// Minimum pairwise lifted distance; +inf for fewer than two vortices.
double min_lifted_distance(const VortexSystem& s);

/// Same measure on raw (possibly unwrapped) coordinates.
double min_lifted_distance(const std::vector<double>& x,
                           const std::vector<double>& y);

/// (x, y, gamma) -> (x, -y, -gamma) for every vortex, labels kept.
///
/// This is the reflection z -> conj(z) - pi composed with the half-turn of
/// the band, written so that it acts nontrivially on the canonical chart.
VortexSystem mobius_flip(const VortexSystem& s);

/// 2N cylinder vortices: (p, gamma) and (tau(p), -gamma) per band vortex.
std::vector<LiftedVortex> lift(const VortexSystem& s);

/// Shift every x by delta and re-canonicalize.
VortexSystem translate(const VortexSystem& s, double delta);

/// Equal as unordered multisets of (point, strength) up to `tol`.
bool same_lifted_set(const std::vector<LiftedVortex>& a,
                     const std::vector<LiftedVortex>& b, double tol);

}  // namespace mobius
