#pragma once

#include <span>
#include <vector>

#include "mobius/geometry.hpp"

namespace mobius {

struct Velocity {
  double dx = 0.0;
  double dy = 0.0;
};

struct Observables {
  double hamiltonian = 0.0;
  double momentum = 0.0;
};

/// Green's function of the cylinder, -(1/4pi) log(sin^2(dx/2) + sinh^2(dy/2)).
double cylinder_green(CylinderPoint p, CylinderPoint q,
                      double collision_radius = kDefaultCollisionRadius);

/// Twisted Green's function of the band: G(a, b) - G(a, tau b).
double green_mobius(ChartPoint a, ChartPoint b,
                    double collision_radius = kDefaultCollisionRadius);

/// Robin function of the band, (1/2pi) log cosh y.
double robin_mobius(double y);

/// log cosh y without overflow.
double log_cosh(double y);

double hamiltonian(const VortexSystem& s);
std::vector<Velocity> velocity(const VortexSystem& s);
double momentum(const VortexSystem& s);
Observables observables(const VortexSystem& s);

/// Stream function at p, twisted in p.
double stream_function(ChartPoint p, const VortexSystem& s,
                       double collision_radius = kDefaultCollisionRadius);

// Raw evaluators on (possibly unwrapped) coordinates. No collision check.
double hamiltonian(std::span<const double> x, std::span<const double> y,
                   std::span<const double> gamma);
void velocity(std::span<const double> x, std::span<const double> y,
              std::span<const double> gamma, std::span<double> vx,
              std::span<double> vy);

/// The two-vortex equations written out term by term.
std::vector<Velocity> two_vortex_velocity(double x1, double y1, double g1,
                                          double x2, double y2, double g2);

namespace detail {

/// log(sin^2(dx/2) + sinh^2(u/2)).
double log_sin_kernel(double dx, double u);
/// log(cos^2(dx/2) + sinh^2(u/2)).
double log_cos_kernel(double dx, double u);
/// sinh(u) / (sin^2(dx/2) + sinh^2(u/2)).
double sinh_over_sin_kernel(double dx, double u);
/// sinh(u) / (cos^2(dx/2) + sinh^2(u/2)).
double sinh_over_cos_kernel(double dx, double u);
/// 1 / (sin^2(dx/2) + sinh^2(u/2)).
double inv_sin_kernel(double dx, double u);
/// 1 / (cos^2(dx/2) + sinh^2(u/2)).
double inv_cos_kernel(double dx, double u);

}  // namespace detail

}  // namespace mobius
