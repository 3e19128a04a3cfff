#pragma once

// Smooth cutoff schedules, the reparametrized flow of a time-dependent
// linear ODE, and the scheduled deformation from the identity to dS.

#include "semihyp/symplectic.hpp"

#include <functional>

namespace semihyp {

/// f(t) = exp(-1/t) for t > 0, else 0.
double bump_base(double t);
/// g(t) = f(t) / (f(t) + f(1 - t)): 0 for t <= 0, 1 for t >= 1, smooth and nondecreasing.
double smooth_step(double t);
double smooth_step_derivative(double t);

/// g rescaled to rise from 0 at `start` to 1 at `end`.
struct Ramp {
  double start = 0.0;
  double end = 1.0;

  double operator()(double t) const;
  double derivative(double t) const;
};

/// The four ramps of the deformation. Their derivatives are supported in
/// consecutive quarters of [0, 1] in the order psi1, chi, psi2, psi.
struct DeformationSchedule {
  Ramp psi1{0.0, 0.25};
  Ramp chi{0.25, 0.5};
  Ramp psi2{0.5, 0.75};
  Ramp psi{0.75, 1.0};
};

using MatrixFunction = std::function<Mat(double)>;

struct FlowOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double min_step = 1e-10;
  int max_steps = 200000;
};

struct ReparametrizedFlow {
  Mat psi_end;  // solution of psi' = B(t) psi, psi(0) = I, at t = 1
  int accepted_steps = 0;
  int rejected_steps = 0;
  double max_error_estimate = 0.0;  // largest accepted local error (scaled units)
};

/// B(t) = chi'(t) A(chi(t)).
Mat reparametrized_generator(const MatrixFunction& A, const Ramp& chi, double t);

/// Integrates psi' = chi'(t) A(chi(t)) psi over [0, 1] with an adaptive
/// Dormand-Prince 5(4) pair. psi(1) is the time-one flow of A itself.
ReparametrizedFlow reparametrize_flow(const MatrixFunction& A, Eigen::Index dim,
                                      const Ramp& chi = Ramp{1.0 / 3.0, 2.0 / 3.0}, const FlowOptions& opts = {});

/// kappa_t = T exp(-psi1 JF) exp(psi2 B_ah) exp(psi (B - B_ah)) T^{-1}, with
/// B_ah = diag(2, -2) on each elliptic pair (x_j, xi_j) of the normal-form basis T.
SymplecticMatrix composite_deformation(const SpectralClassification& cls, const DeformationSchedule& sched, double t);

/// The artificial hyperbolic generator in normal-form coordinates.
Mat artificial_hyperbolic_generator(const SpectralClassification& cls);

}  // namespace semihyp
