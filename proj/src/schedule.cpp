#include "semihyp/schedule.hpp"

#include "semihyp/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace semihyp {

double bump_base(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump_base(t);
  const double b = bump_base(1.0 - t);
  return a / (a + b);
}

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = bump_base(t);
  const double b = bump_base(1.0 - t);
  const double da = a / (t * t);
  const double db = -b / ((1.0 - t) * (1.0 - t));
  const double s = a + b;
  return (da * b - a * db) / (s * s);
}

double Ramp::operator()(double t) const { return smooth_step((t - start) / (end - start)); }

double Ramp::derivative(double t) const { return smooth_step_derivative((t - start) / (end - start)) / (end - start); }

Mat reparametrized_generator(const MatrixFunction& A, const Ramp& chi, double t) {
  const double d = chi.derivative(t);
  const Mat a = A(chi(t));
  if (d == 0.0) return Mat::Zero(a.rows(), a.cols());
  return d * a;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

}  // namespace

ReparametrizedFlow reparametrize_flow(const MatrixFunction& A, Eigen::Index dim, const Ramp& chi,
                                      const FlowOptions& opts) {
  if (dim <= 0) fail(ErrorKind::InvalidInput, "reparametrize_flow: dimension must be positive");
  auto rhs = [&](double t, const Mat& y) -> Mat {
    const Mat b = reparametrized_generator(A, chi, t);
    if (b.rows() != dim || b.cols() != dim) fail(ErrorKind::InvalidInput, "reparametrize_flow: generator has wrong shape");
    return b * y;
  };

  ReparametrizedFlow out;
  Mat y = Mat::Identity(dim, dim);
  double t = 0.0;
  double h = 1e-3;
  Mat k1 = rhs(t, y);
  while (t < 1.0) {
    if (out.accepted_steps + out.rejected_steps >= opts.max_steps)
      fail(ErrorKind::NumericFailure, "reparametrize_flow: step budget exhausted");
    h = std::min(h, 1.0 - t);
    const Mat k2 = rhs(t + c2 * h, y + h * a21 * k1);
    const Mat k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Mat k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Mat k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Mat k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Mat y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Mat k7 = rhs(t + h, y5);
    const Mat err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const Mat scale = (opts.atol + opts.rtol * y.cwiseAbs().cwiseMax(y5.cwiseAbs()).array()).matrix();
    const double en = (err.array() / scale.array()).abs().maxCoeff();
    if (en <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;
      ++out.accepted_steps;
      out.max_error_estimate = std::max(out.max_error_estimate, en);
    } else {
      ++out.rejected_steps;
    }
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    const double next = h * factor;
    if (next < opts.min_step && t < 1.0) {
      std::ostringstream msg;
      msg << "reparametrize_flow: step size underflow at t = " << t << " (local error estimate " << en << ")";
      fail(ErrorKind::NumericFailure, msg.str());
    }
    h = next;
  }
  out.psi_end = y;
  return out;
}

Mat artificial_hyperbolic_generator(const SpectralClassification& cls) {
  const Eigen::Index n = cls.dim();
  const Eigen::Index m = n / 2;
  Mat Bah = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < cls.elliptic_modes.size; ++i) {
    const Eigen::Index j = cls.elliptic_modes.begin + i;
    Bah(j, j) = 2.0;
    Bah(m + j, m + j) = -2.0;
  }
  return Bah;
}

SymplecticMatrix composite_deformation(const SpectralClassification& cls, const DeformationSchedule& sched, double t) {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::InvalidInput, "composite_deformation: t must lie in [0, 1]");
  const Eigen::Index n = cls.dim();
  const Mat J = standard_form(n);
  const Mat Bah = artificial_hyperbolic_generator(cls);
  const double p1 = sched.psi1(t);
  const double p2 = sched.psi2(t);
  const double p = sched.psi(t);
  const Mat kappa = expm(Mat(-p1 * J * cls.F)) * expm(Mat(p2 * Bah)) * expm(Mat(p * (cls.B - Bah)));
  const Mat& T = cls.basis;
  const Mat out = T * kappa * T.partialPivLu().inverse();
  return SymplecticMatrix(out, 1e-8 * std::max(1.0, out.squaredNorm()));
}

}  // namespace semihyp
