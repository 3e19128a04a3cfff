#pragma once

// Geodesics of ds^2 = w(y,z)^2 dx^2 + dy^2 + dz^2 on (R/Z)_x x R^2 with
// w = cosh(y) (2 z^4 - z^2 + 1), and the Floquet data of its closed geodesics
// y = 0, z = z0 for z0 in {0, 1/2, -1/2}.

#include "semihyp/linalg.hpp"

#include <array>
#include <string>
#include <vector>

namespace semihyp {

/// p(z) = 2 z^4 - z^2 + 1 and derivatives.
double warp_p(double z);
double warp_dp(double z);
double warp_ddp(double z);

struct WarpedMetric {
  double w(double y, double z) const;
  double w_y(double y, double z) const;
  double w_z(double y, double z) const;
  /// diag(w^2, 1, 1).
  Eigen::Matrix3d metric(double y, double z) const;
};

/// (x, y, z, vx, vy, vz).
using GeodesicState = Eigen::Matrix<double, 6, 1>;

double energy(const GeodesicState& s);

/// Gamma[l][i][j] = Gamma^l_{ij}, indices 0 = x, 1 = y, 2 = z.
using ChristoffelTable = std::array<std::array<std::array<double, 3>, 3>, 3>;
ChristoffelTable christoffel(double y, double z);

GeodesicState geodesic_rhs(const GeodesicState& s);
/// d(rhs)/d(state).
Eigen::Matrix<double, 6, 6> geodesic_jacobian(const GeodesicState& s);
/// dE/dt along the vector field, evaluated from the closed-form gradient of E.
double energy_rate(const GeodesicState& s);

struct Trajectory {
  std::vector<double> t;
  std::vector<GeodesicState> states;  // sampled every `stride` steps, plus the endpoint
  bool truncated = false;             // stopped by the |y|, |z| <= bound guard
  double max_energy_drift = 0.0;      // max |E(t) - E(0)| over all steps
};

/// Fixed-step RK4 over [0, T] (negative T integrates backward).
Trajectory integrate(const GeodesicState& s0, double T, double step, int stride = 1, double bound = 10.0);

struct PoincareReport {
  double z0 = 0.0;
  double vx0 = 0.0;
  double period = 0.0;
  Eigen::Matrix4d monodromy;  // transverse linearization in (y, vy, z, vz)
  std::array<cplx, 4> multipliers;
  std::string verdict;  // semi-hyperbolic, hyperbolic, elliptic
  double closure_residual = 0.0;
  double symplectic_defect = 0.0;
  double determinant = 0.0;
  double energy_drift = 0.0;
};

/// vx0 <= 0 selects the unit-speed value 1 / w(0, z0), giving x-period 1 / vx0.
PoincareReport poincare_linearization(double z0, double vx0 = 0.0, double step = 1e-4);

/// V(y, z) = cosh^{-2} y p(z)^{-2} - 1.
double effective_potential(double y, double z);
Eigen::Vector2d effective_potential_gradient(double y, double z);
Eigen::Matrix2d effective_potential_hessian(double y, double z);

/// Damped Newton on grad V from the seed.
Eigen::Vector2d find_critical_point(const Eigen::Vector2d& seed, double tol = 1e-13, int max_iter = 100);

/// Hessian eigenvalue signs sorted ascending, e.g. "(-,+)".
std::string hessian_signature(const Eigen::Vector2d& point);

}  // namespace semihyp
