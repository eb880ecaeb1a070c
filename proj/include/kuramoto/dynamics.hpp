#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "kuramoto/errors.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto/spectral.hpp"

namespace kuramoto {

using PhaseVector = Eigen::VectorXd;

// Canonical phase representative in [-pi, pi); wrap_phase(pi) == -pi.
inline double wrap_phase(double x) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = x - two_pi * std::floor((x + std::numbers::pi) / two_pi);
  if (w >= std::numbers::pi) w = -std::numbers::pi;  // guards rounding at the seam
  return w;
}

inline PhaseVector wrap_phases(const Eigen::VectorXd& theta) {
  PhaseVector w(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) w[i] = wrap_phase(theta[i]);
  return w;
}

// Synchrony measure R = |sum_m exp(i*theta_m)| / n, in [0, 1].
inline double order_parameter(const PhaseVector& theta) {
  const Eigen::Index n = theta.size();
  if (n < 1) {
    throw std::invalid_argument("order_parameter: empty phase vector");
  }
  std::complex<double> z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) z += std::polar(1.0, theta[i]);
  return std::abs(z) / static_cast<double>(n);
}

enum class ModelTag { original, analytical };
enum class IntegrationMethod { euler, rk4 };

// Sampled trajectory. Phases are stored wrapped to [-pi, pi); magnitudes is
// non-empty only for the analytical model, where |x_i(t)| is generally not 1.
struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseVector> phases;
  std::vector<Eigen::VectorXd> magnitudes;
  ModelTag model = ModelTag::original;
  double epsilon = 1.0;
  Eigen::VectorXd phi;
};

namespace detail {

// Right-hand side of d(theta_i)/dt = eps * sum_j a_ij sin(theta_j - theta_i - phi_i),
// vectorized through sin(theta_j - theta_i - phi_i)
//   = sin(theta_j) cos(theta_i + phi_i) - cos(theta_j) sin(theta_i + phi_i).
inline void km_rhs(const Eigen::MatrixXd& A, const Eigen::VectorXd& theta, double eps,
                   const Eigen::VectorXd& phi, Eigen::VectorXd& out) {
  const Eigen::ArrayXd s = theta.array().sin();
  const Eigen::ArrayXd c = theta.array().cos();
  const Eigen::ArrayXd As = (A * s.matrix()).array();
  const Eigen::ArrayXd Ac = (A * c.matrix()).array();
  const Eigen::ArrayXd shifted = theta.array() + phi.array();
  out = (eps * (shifted.cos() * As - shifted.sin() * Ac)).matrix();
}

inline Eigen::VectorXd uniform_lag(int n, double phi) {
  if (!std::isfinite(phi)) {
    throw std::invalid_argument("phase lag must be finite");
  }
  return Eigen::VectorXd::Constant(n, phi);
}

}  // namespace detail

// Fixed-step integration of the coupled oscillator model in the co-rotating
// frame (natural frequency dropped). Samples are recorded every
// round(sample_stride / dt) steps, always including t = 0 and t = T.
inline Trajectory integrate_km(const AdjacencyMatrix& A, const PhaseVector& theta0, double epsilon,
                               const Eigen::VectorXd& phi, double dt, double T,
                               IntegrationMethod method = IntegrationMethod::euler,
                               double sample_stride = 1e-2) {
  const int n = A.n();
  if (theta0.size() != n) {
    throw std::invalid_argument("integrate_km: theta0 size does not match matrix");
  }
  if (phi.size() != n) {
    throw std::invalid_argument("integrate_km: phi size does not match matrix");
  }
  if (!(dt > 0.0) || !(T >= 0.0) || !std::isfinite(dt) || !std::isfinite(T)) {
    throw std::invalid_argument("integrate_km: need dt > 0 and T >= 0");
  }
  if (!(sample_stride > 0.0)) {
    throw std::invalid_argument("integrate_km: need sample_stride > 0");
  }
  if (!theta0.allFinite() || !phi.allFinite()) {
    throw std::invalid_argument("integrate_km: non-finite input");
  }

  const long long steps = static_cast<long long>(std::llround(T / dt));
  const long long record_every =
      std::max<long long>(1, static_cast<long long>(std::llround(sample_stride / dt)));

  Trajectory traj;
  traj.model = ModelTag::original;
  traj.epsilon = epsilon;
  traj.phi = phi;

  Eigen::VectorXd theta = theta0;
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto record = [&](long long step) {
    traj.times.push_back(static_cast<double>(step) * dt);
    traj.phases.push_back(wrap_phases(theta));
  };
  record(0);
  for (long long step = 0; step < steps; ++step) {
    if (method == IntegrationMethod::euler) {
      detail::km_rhs(A.entries, theta, epsilon, phi, k1);
      theta += dt * k1;
    } else {
      detail::km_rhs(A.entries, theta, epsilon, phi, k1);
      tmp = theta + 0.5 * dt * k1;
      detail::km_rhs(A.entries, tmp, epsilon, phi, k2);
      tmp = theta + 0.5 * dt * k2;
      detail::km_rhs(A.entries, tmp, epsilon, phi, k3);
      tmp = theta + dt * k3;
      detail::km_rhs(A.entries, tmp, epsilon, phi, k4);
      theta += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!theta.allFinite()) {
      throw DivergenceError("integrate_km: state became non-finite",
                            static_cast<double>(step + 1) * dt);
    }
    if ((step + 1) % record_every == 0 || step + 1 == steps) {
      record(step + 1);
    }
  }
  return traj;
}

inline Trajectory integrate_km(const AdjacencyMatrix& A, const PhaseVector& theta0, double epsilon,
                               double phi, double dt, double T,
                               IntegrationMethod method = IntegrationMethod::euler,
                               double sample_stride = 1e-2) {
  return integrate_km(A, theta0, epsilon, detail::uniform_lag(A.n(), phi), dt, T, method,
                      sample_stride);
}

// Exact propagation of the linear model dx/dt = K x with K = eps*exp(-i*phi)*A
// and x(0) = exp(i*theta0). Long horizons are covered by re-basing every
// `window` time units (x evolves multiplicatively, so windows compose exactly)
// rather than evaluating exp(t*K) for one large t. Amplitudes outside
// [1e-12, 1e12] abort with DivergenceError.
inline Trajectory propagate_analytical(const AdjacencyMatrix& A, const PhaseVector& theta0,
                                       double epsilon, double phi,
                                       const std::vector<double>& times, double window = 0.1) {
  const int n = A.n();
  if (theta0.size() != n) {
    throw std::invalid_argument("propagate_analytical: theta0 size does not match matrix");
  }
  if (!(window > 0.0) || !std::isfinite(window)) {
    throw std::invalid_argument("propagate_analytical: need window > 0");
  }
  if (!std::isfinite(phi) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("propagate_analytical: non-finite parameter");
  }
  if (times.empty()) {
    throw std::invalid_argument("propagate_analytical: empty time list");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) {
      throw std::invalid_argument("propagate_analytical: times must be finite and >= 0");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("propagate_analytical: times must be strictly increasing");
    }
  }

  const Eigen::MatrixXcd K =
      (epsilon * std::polar(1.0, -phi)) * A.entries.cast<std::complex<double>>();
  ExpmOperator op(K);

  Trajectory traj;
  traj.model = ModelTag::analytical;
  traj.epsilon = epsilon;
  traj.phi = Eigen::VectorXd::Constant(n, phi);

  ComplexState base(n);
  for (int i = 0; i < n; ++i) base[i] = std::polar(1.0, theta0[i]);
  double base_t = 0.0;

  auto check_amplitudes = [](const ComplexState& x, double t) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double m = std::abs(x[i]);
      if (!(m >= 1e-12 && m <= 1e12)) {
        throw DivergenceError("propagate_analytical: amplitude left [1e-12, 1e12]", t);
      }
    }
  };

  for (double t : times) {
    while (base_t + window <= t) {
      base = op.apply(base, window);
      base_t += window;
      check_amplitudes(base, base_t);
    }
    const double rest = t - base_t;
    ComplexState x = (rest > 0.0) ? op.apply(base, rest) : base;
    check_amplitudes(x, t);
    traj.times.push_back(t);
    PhaseVector th(n);
    Eigen::VectorXd mag(n);
    for (int i = 0; i < n; ++i) {
      th[i] = wrap_phase(std::arg(x[i]));
      mag[i] = std::abs(x[i]);
    }
    traj.phases.push_back(std::move(th));
    traj.magnitudes.push_back(std::move(mag));
  }
  return traj;
}

}  // namespace kuramoto
