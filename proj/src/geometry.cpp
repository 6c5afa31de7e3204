#include "mobius/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mobius/errors.hpp"

namespace mobius {

double wrap_two_pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_signed(double x) {
  double r = wrap_two_pi(x + kPi) - kPi;
  return r;
}

CylinderPoint tau(CylinderPoint p) { return {wrap_two_pi(p.x + kPi), -p.y}; }

Vortex canonicalize(double x, double y, double gamma, std::string label) {
  double r = wrap_two_pi(x);
  if (r >= kPi) {
    r -= kPi;
    y = -y;
    gamma = -gamma;
  }
  return Vortex{{r, y}, gamma, std::move(label)};
}

Vortex canonicalize(const Vortex& v) {
  return canonicalize(v.position.x, v.position.y, v.strength, v.label);
}

double cylinder_distance(CylinderPoint p, CylinderPoint q) {
  return std::hypot(wrap_signed(p.x - q.x), p.y - q.y);
}

double lifted_distance(ChartPoint a, ChartPoint b) {
  double dx = wrap_signed(a.x - b.x);
  double direct = std::hypot(dx, a.y - b.y);
  double mirrored = std::hypot(wrap_signed(dx - kPi), a.y + b.y);
  return std::min(direct, mirrored);
}

VortexSystem::VortexSystem(std::vector<Vortex> vortices,
                           double collision_radius) {
  std::set<std::string> seen;
  vortices_.reserve(vortices.size());
  for (std::size_t i = 0; i < vortices.size(); ++i) {
    const Vortex& v = vortices[i];
    if (!std::isfinite(v.position.x) || !std::isfinite(v.position.y))
      throw ValidationError("vortex " + std::to_string(i) +
                            " has a non-finite position");
    if (!std::isfinite(v.strength) || v.strength == 0.0)
      throw ValidationError("vortex " + std::to_string(i) +
                            " must have a finite nonzero strength");
    std::string label = v.label.empty() ? "v" + std::to_string(i) : v.label;
    if (!seen.insert(label).second)
      throw ValidationError("duplicate vortex label '" + label + "'");
    vortices_.push_back(
        canonicalize(v.position.x, v.position.y, v.strength, label));
  }
  for (std::size_t i = 0; i < vortices_.size(); ++i)
    for (std::size_t j = i + 1; j < vortices_.size(); ++j)
      if (lifted_distance(vortices_[i].position, vortices_[j].position) <
          collision_radius)
        throw CollisionError("vortices '" + vortices_[i].label + "' and '" +
                             vortices_[j].label + "' collide");
}

std::optional<std::size_t> VortexSystem::find(const std::string& label) const {
  for (std::size_t i = 0; i < vortices_.size(); ++i)
    if (vortices_[i].label == label) return i;
  return std::nullopt;
}

std::vector<double> VortexSystem::xs() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& v : vortices_) out.push_back(v.position.x);
  return out;
}

std::vector<double> VortexSystem::ys() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& v : vortices_) out.push_back(v.position.y);
  return out;
}

std::vector<double> VortexSystem::strengths() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& v : vortices_) out.push_back(v.strength);
  return out;
}

double min_lifted_distance(const VortexSystem& s) {
  return min_lifted_distance(s.xs(), s.ys());
}

double min_lifted_distance(const std::vector<double>& x,
                           const std::vector<double>& y) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      best = std::min(best, lifted_distance({x[i], y[i]}, {x[j], y[j]}));
  return best;
}

VortexSystem mobius_flip(const VortexSystem& s) {
  std::vector<Vortex> out;
  out.reserve(s.size());
  for (const auto& v : s)
    out.push_back(Vortex{{v.position.x, -v.position.y}, -v.strength, v.label});
  return VortexSystem(std::move(out), 0.0);
}

std::vector<LiftedVortex> lift(const VortexSystem& s) {
  std::vector<LiftedVortex> out;
  out.reserve(2 * s.size());
  for (const auto& v : s) {
    CylinderPoint p{wrap_two_pi(v.position.x), v.position.y};
    out.push_back({p, v.strength, v.label});
    out.push_back({tau(p), -v.strength, v.label});
  }
  return out;
}

VortexSystem translate(const VortexSystem& s, double delta) {
  std::vector<Vortex> out;
  out.reserve(s.size());
  for (const auto& v : s)
    out.push_back(Vortex{{v.position.x + delta, v.position.y}, v.strength,
                         v.label});
  return VortexSystem(std::move(out), 0.0);
}

bool same_lifted_set(const std::vector<LiftedVortex>& a,
                     const std::vector<LiftedVortex>& b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& p : a) {
    bool matched = false;
    for (std::size_t j = 0; j < b.size() && !matched; ++j) {
      if (used[j]) continue;
      if (cylinder_distance(p.point, b[j].point) <= tol &&
          std::abs(p.strength - b[j].strength) <= tol) {
        used[j] = true;
        matched = true;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace mobius
