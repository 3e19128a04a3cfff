#include "semihyp/geodesic.hpp"

#include "semihyp/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace semihyp {

double warp_p(double z) { return 2.0 * z * z * z * z - z * z + 1.0; }
double warp_dp(double z) { return 8.0 * z * z * z - 2.0 * z; }
double warp_ddp(double z) { return 24.0 * z * z - 2.0; }

double WarpedMetric::w(double y, double z) const { return std::cosh(y) * warp_p(z); }
double WarpedMetric::w_y(double y, double z) const { return std::sinh(y) * warp_p(z); }
double WarpedMetric::w_z(double y, double z) const { return std::cosh(y) * warp_dp(z); }

Eigen::Matrix3d WarpedMetric::metric(double y, double z) const {
  const double ww = w(y, z);
  return Eigen::Vector3d(ww * ww, 1.0, 1.0).asDiagonal();
}

double energy(const GeodesicState& s) {
  const double w = WarpedMetric{}.w(s(1), s(2));
  return w * w * s(3) * s(3) + s(4) * s(4) + s(5) * s(5);
}

ChristoffelTable christoffel(double y, double z) {
  ChristoffelTable G{};
  const double p = warp_p(z);
  const double dp = warp_dp(z);
  const double ch = std::cosh(y);
  G[0][0][1] = G[0][1][0] = std::tanh(y);
  G[0][0][2] = G[0][2][0] = dp / p;
  G[1][0][0] = -std::sinh(y) * ch * p * p;
  G[2][0][0] = -dp * p * ch * ch;
  return G;
}

GeodesicState geodesic_rhs(const GeodesicState& s) {
  const double y = s(1), z = s(2), vx = s(3), vy = s(4), vz = s(5);
  const double p = warp_p(z);
  const double dp = warp_dp(z);
  const double ch = std::cosh(y);
  GeodesicState d;
  d << vx, vy, vz, -2.0 * std::tanh(y) * vy * vx - 2.0 * (dp / p) * vz * vx, std::sinh(y) * ch * p * p * vx * vx,
      dp * p * ch * ch * vx * vx;
  return d;
}

Eigen::Matrix<double, 6, 6> geodesic_jacobian(const GeodesicState& s) {
  const double y = s(1), z = s(2), vx = s(3), vy = s(4), vz = s(5);
  const double p = warp_p(z), dp = warp_dp(z), ddp = warp_ddp(z);
  const double ch = std::cosh(y), sh = std::sinh(y), th = std::tanh(y);
  const double sech2 = 1.0 / (ch * ch);
  const double r = dp / p;
  const double dr = (ddp * p - dp * dp) / (p * p);
  Eigen::Matrix<double, 6, 6> Jm = Eigen::Matrix<double, 6, 6>::Zero();
  Jm(0, 3) = 1.0;
  Jm(1, 4) = 1.0;
  Jm(2, 5) = 1.0;
  Jm(3, 1) = -2.0 * sech2 * vy * vx;
  Jm(3, 2) = -2.0 * dr * vz * vx;
  Jm(3, 3) = -2.0 * th * vy - 2.0 * r * vz;
  Jm(3, 4) = -2.0 * th * vx;
  Jm(3, 5) = -2.0 * r * vx;
  Jm(4, 1) = std::cosh(2.0 * y) * p * p * vx * vx;
  Jm(4, 2) = sh * ch * 2.0 * p * dp * vx * vx;
  Jm(4, 3) = 2.0 * sh * ch * p * p * vx;
  Jm(5, 1) = dp * p * 2.0 * ch * sh * vx * vx;
  Jm(5, 2) = (ddp * p + dp * dp) * ch * ch * vx * vx;
  Jm(5, 3) = 2.0 * dp * p * ch * ch * vx;
  return Jm;
}

double energy_rate(const GeodesicState& s) {
  const WarpedMetric g;
  const double y = s(1), z = s(2), vx = s(3), vy = s(4), vz = s(5);
  const double w = g.w(y, z);
  const GeodesicState d = geodesic_rhs(s);
  return 2.0 * w * g.w_y(y, z) * vx * vx * vy + 2.0 * w * g.w_z(y, z) * vx * vx * vz + 2.0 * w * w * vx * d(3) +
         2.0 * vy * d(4) + 2.0 * vz * d(5);
}

namespace {

template <typename State, typename F>
State rk4_step(const State& s, double h, F&& f) {
  const State k1 = f(s);
  const State k2 = f(State(s + 0.5 * h * k1));
  const State k3 = f(State(s + 0.5 * h * k2));
  const State k4 = f(State(s + h * k3));
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

long step_count(double T, double step) {
  if (!(step > 0.0)) fail(ErrorKind::InvalidInput, "integrate: step must be positive");
  return std::max<long>(1, std::lround(std::abs(T) / step));
}

}  // namespace

Trajectory integrate(const GeodesicState& s0, double T, double step, int stride, double bound) {
  if (stride < 1) fail(ErrorKind::InvalidInput, "integrate: stride must be >= 1");
  const long n = step_count(T, step);
  const double h = T / n;
  Trajectory tr;
  const double e0 = energy(s0);
  GeodesicState s = s0;
  tr.t.push_back(0.0);
  tr.states.push_back(s);
  for (long i = 1; i <= n; ++i) {
    s = rk4_step(s, h, [](const GeodesicState& q) { return geodesic_rhs(q); });
    tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(energy(s) - e0));
    const bool escaped = std::abs(s(1)) > bound || std::abs(s(2)) > bound || !s.allFinite();
    if (i % stride == 0 || i == n || escaped) {
      tr.t.push_back(i * h);
      tr.states.push_back(s);
    }
    if (escaped) {
      tr.truncated = true;
      break;
    }
  }
  return tr;
}

PoincareReport poincare_linearization(double z0, double vx0, double step) {
  const WarpedMetric g;
  PoincareReport rep;
  rep.z0 = z0;
  rep.vx0 = vx0 > 0.0 ? vx0 : 1.0 / g.w(0.0, z0);
  rep.period = 1.0 / rep.vx0;

  GeodesicState s0;
  s0 << 0.0, 0.0, z0, rep.vx0, 0.0, 0.0;
  if (geodesic_rhs(s0).tail<3>().norm() > 1e-12)
    fail(ErrorKind::InvalidInput, "poincare_linearization: y = 0, z = z0 is not a closed geodesic");

  // Base orbit and tangent flow advanced together so both use the same nodes.
  using Aug = Eigen::Matrix<double, 42, 1>;
  auto f = [](const Aug& a) {
    const GeodesicState s = a.head<6>();
    const Eigen::Map<const Eigen::Matrix<double, 6, 6>> Phi(a.data() + 6);
    Aug out;
    out.head<6>() = geodesic_rhs(s);
    Eigen::Map<Eigen::Matrix<double, 6, 6>>(out.data() + 6) = geodesic_jacobian(s) * Phi;
    return out;
  };
  Aug a;
  a.head<6>() = s0;
  Eigen::Map<Eigen::Matrix<double, 6, 6>>(a.data() + 6).setIdentity();
  const long n = step_count(rep.period, step);
  const double h = rep.period / n;
  const double e0 = energy(s0);
  for (long i = 0; i < n; ++i) {
    a = rk4_step(a, h, f);
    rep.energy_drift = std::max(rep.energy_drift, std::abs(energy(GeodesicState(a.head<6>())) - e0));
  }
  const GeodesicState sT = a.head<6>();
  GeodesicState gap = sT - s0;
  gap(0) -= 1.0;  // x returns modulo 1
  rep.closure_residual = gap.norm();
  if (rep.closure_residual > 1e-6) {
    std::ostringstream msg;
    msg << "poincare_linearization: orbit does not close (residual " << rep.closure_residual << ")";
    fail(ErrorKind::NumericFailure, msg.str());
  }
  const Eigen::Map<const Eigen::Matrix<double, 6, 6>> Phi(a.data() + 6);
  const int idx[4] = {1, 4, 2, 5};  // (y, vy, z, vz)
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rep.monodromy(i, j) = Phi(idx[i], idx[j]);
  rep.determinant = rep.monodromy.determinant();

  // Canonical pairs (y, vy), (z, vz): reorder to (y, z, vy, vz) for the standard form.
  Mat P = Mat::Zero(4, 4);
  P(0, 0) = P(1, 2) = P(2, 1) = P(3, 3) = 1.0;
  const Mat Mc = P * Mat(rep.monodromy) * P.transpose();
  rep.symplectic_defect = symplectic_defect(Mc);

  const Eigen::EigenSolver<Eigen::Matrix4d> es(rep.monodromy, false);
  std::vector<cplx> mu(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  std::sort(mu.begin(), mu.end(), [](cplx a, cplx b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : std::arg(a) < std::arg(b);
  });
  std::copy(mu.begin(), mu.end(), rep.multipliers.begin());
  int off = 0;
  for (const cplx m : mu)
    if (std::abs(std::log(std::abs(m))) > 1e-6) ++off;
  rep.verdict = off == 4 ? "hyperbolic" : off == 2 ? "semi-hyperbolic" : off == 0 ? "elliptic" : "degenerate";
  return rep;
}

double effective_potential(double y, double z) {
  const double w = WarpedMetric{}.w(y, z);
  return 1.0 / (w * w) - 1.0;
}

namespace {

struct PotentialParts {
  double a, da, dda, b, db, ddb;
};

PotentialParts potential_parts(double y, double z) {
  const double ch = std::cosh(y), th = std::tanh(y);
  const double sech2 = 1.0 / (ch * ch);
  const double p = warp_p(z), dp = warp_dp(z), ddp = warp_ddp(z);
  PotentialParts q;
  q.a = sech2;
  q.da = -2.0 * sech2 * th;
  q.dda = 4.0 * sech2 * th * th - 2.0 * sech2 * sech2;
  q.b = 1.0 / (p * p);
  q.db = -2.0 * dp / (p * p * p);
  q.ddb = 6.0 * dp * dp / (p * p * p * p) - 2.0 * ddp / (p * p * p);
  return q;
}

}  // namespace

Eigen::Vector2d effective_potential_gradient(double y, double z) {
  const PotentialParts q = potential_parts(y, z);
  return {q.da * q.b, q.a * q.db};
}

Eigen::Matrix2d effective_potential_hessian(double y, double z) {
  const PotentialParts q = potential_parts(y, z);
  Eigen::Matrix2d H;
  H << q.dda * q.b, q.da * q.db, q.da * q.db, q.a * q.ddb;
  return H;
}

Eigen::Vector2d find_critical_point(const Eigen::Vector2d& seed, double tol, int max_iter) {
  Eigen::Vector2d p = seed;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::Vector2d g = effective_potential_gradient(p(0), p(1));
    if (g.norm() <= tol) return p;
    const Eigen::Vector2d dir = effective_potential_hessian(p(0), p(1)).fullPivLu().solve(-g);
    double t = 1.0;
    while (t > 1e-8) {
      const Eigen::Vector2d trial = p + t * dir;
      if (effective_potential_gradient(trial(0), trial(1)).norm() < g.norm()) break;
      t *= 0.5;
    }
    if (t <= 1e-8) break;
    p += t * dir;
  }
  const Eigen::Vector2d g = effective_potential_gradient(p(0), p(1));
  if (g.norm() > tol * 100.0) {
    std::ostringstream msg;
    msg << "find_critical_point: Newton did not converge from seed (" << seed(0) << ", " << seed(1)
        << "), |grad| = " << g.norm();
    fail(ErrorKind::NumericFailure, msg.str());
  }
  return p;
}

std::string hessian_signature(const Eigen::Vector2d& point) {
  const Eigen::Matrix2d H = effective_potential_hessian(point(0), point(1));
  Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(H).eigenvalues();
  std::string out = "(";
  for (int i = 0; i < 2; ++i) {
    if (ev(i) == 0.0) fail(ErrorKind::NumericFailure, "hessian_signature: degenerate critical point");
    out += ev(i) < 0.0 ? "-" : "+";
    if (i == 0) out += ",";
  }
  return out + ")";
}

}  // namespace semihyp
