#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kuramoto/dynamics.hpp"
#include "kuramoto/errors.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto/spectral.hpp"

namespace kuramoto {

// Component-modulus deviation above which an eigenvector does not define a
// phase configuration.
inline constexpr double kTolModulus = 1e-8;

enum class EquilibriumSource {
  user,
  twisted,
  eigenvector,
  character,
  multilayer,
  complete_pi_multiples,
  complete_zero_sum,
  designed,
};

inline const char* to_string(EquilibriumSource s) {
  switch (s) {
    case EquilibriumSource::user: return "user";
    case EquilibriumSource::twisted: return "twisted";
    case EquilibriumSource::eigenvector: return "eigenvector";
    case EquilibriumSource::character: return "character";
    case EquilibriumSource::multilayer: return "multilayer";
    case EquilibriumSource::complete_pi_multiples: return "complete_pi_multiples";
    case EquilibriumSource::complete_zero_sum: return "complete_zero_sum";
    case EquilibriumSource::designed: return "designed";
  }
  return "unknown";
}

// Proof-carrying equilibrium candidate: the phases together with the worst
// per-node stationarity defect, the tolerance it was judged against, and the
// spectral data (when the configuration came from an eigenvector).
struct EquilibriumCertificate {
  PhaseVector theta;
  double residual = 0.0;
  double tolerance = 0.0;
  bool accepted = false;
  double epsilon = 1.0;
  Eigen::VectorXd phi;                      // per-node lag used in the residual
  std::optional<double> phi_alternate;      // pi-shifted lag that works equally
  std::optional<std::complex<double>> lambda;
  bool zero_eigenvalue = false;
  EquilibriumSource source = EquilibriumSource::user;
};

// Worst per-node stationarity defect max_i |sum_j a_ij sin(theta_j - theta_i - phi_i)|,
// evaluated by direct summation (no reformulation shares rounding with the
// integrator right-hand side).
inline double equilibrium_residual(const AdjacencyMatrix& A, const PhaseVector& theta,
                                   const Eigen::VectorXd& phi) {
  const int n = A.n();
  if (theta.size() != n || phi.size() != n) {
    throw std::invalid_argument("equilibrium_residual: size mismatch");
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      s += A.entries(i, j) * std::sin(theta[j] - theta[i] - phi[i]);
    }
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

// Acceptance threshold 1e-9 * eps * max_i sum_j |a_ij|; scales with the
// coupling so acceptance is invariant under A -> c*A.
inline double acceptance_tolerance(const AdjacencyMatrix& A, double epsilon) {
  const double row = A.entries.cwiseAbs().rowwise().sum().maxCoeff();
  return 1e-9 * std::abs(epsilon) * row;
}

// Build a certificate for the given phases: evaluates the residual, judges it
// against acceptance_tolerance, and attaches the Rayleigh eigenvalue of
// x = exp(i*theta) when x is numerically an eigenvector of A.
inline EquilibriumCertificate certify(const AdjacencyMatrix& A, const PhaseVector& theta,
                                      double epsilon, const Eigen::VectorXd& phi,
                                      EquilibriumSource source) {
  const int n = A.n();
  if (theta.size() != n) {
    throw std::invalid_argument("certify: theta size does not match matrix");
  }
  if (!theta.allFinite()) {
    throw std::invalid_argument("certify: theta must be finite");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("certify: need epsilon > 0");
  }
  EquilibriumCertificate cert;
  cert.theta = wrap_phases(theta);
  cert.epsilon = epsilon;
  cert.phi = phi;
  cert.residual = equilibrium_residual(A, cert.theta, phi);
  cert.tolerance = acceptance_tolerance(A, epsilon);
  cert.accepted = cert.residual <= cert.tolerance;
  cert.source = source;

  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x[i] = std::polar(1.0, cert.theta[i]);
  const Eigen::VectorXcd Ax = A.entries * x;
  const std::complex<double> rho = x.dot(Ax) / x.squaredNorm();
  const double fro = A.entries.norm();
  if ((Ax - rho * x).norm() <= kTolEig * std::max(fro, 1e-300) * x.norm()) {
    cert.lambda = rho;
    cert.zero_eigenvalue = std::abs(rho) <= kTolEig * std::max(fro, 1e-300);
  }
  return cert;
}

inline EquilibriumCertificate verify_equilibrium(const AdjacencyMatrix& A, const PhaseVector& theta,
                                                 double epsilon, const Eigen::VectorXd& phi) {
  return certify(A, theta, epsilon, phi, EquilibriumSource::user);
}

inline EquilibriumCertificate verify_equilibrium(const AdjacencyMatrix& A, const PhaseVector& theta,
                                                 double epsilon, double phi = 0.0) {
  return verify_equilibrium(A, theta, epsilon, detail::uniform_lag(A.n(), phi));
}

namespace detail {

inline void assert_sound(const EquilibriumCertificate& cert, const char* where) {
  if (!cert.accepted) {
    throw Error(std::string(where) + ": constructed certificate failed verification (residual " +
                std::to_string(cert.residual) + " > tolerance " + std::to_string(cert.tolerance) +
                ")");
  }
}

}  // namespace detail

// j-twisted configuration theta_m = 2*pi*j*m/n, computed on the exact 2*pi/n
// grid (j*m reduced mod n in integers) and wrapped to [-pi, pi).
inline PhaseVector twisted_state(int n, int j) {
  if (n < 1) {
    throw std::invalid_argument("twisted_state: need n >= 1");
  }
  if (j < 0 || j >= n) {
    throw std::invalid_argument("twisted_state: need 0 <= j < n, got j = " + std::to_string(j));
  }
  PhaseVector theta(n);
  for (int m = 0; m < n; ++m) {
    const long long r = (static_cast<long long>(j) * m) % n;
    theta[m] = wrap_phase(2.0 * std::numbers::pi * static_cast<double>(r) / n);
  }
  return theta;
}

// Twisted state certified against the given circulant (or otherwise
// row-sum-balanced) coupling matrix.
inline EquilibriumCertificate certify_twisted(const AdjacencyMatrix& A, int j, double epsilon,
                                              double phi = 0.0) {
  EquilibriumCertificate cert = certify(A, twisted_state(A.n(), j), epsilon,
                                        detail::uniform_lag(A.n(), phi),
                                        EquilibriumSource::twisted);
  detail::assert_sound(cert, "certify_twisted");
  return cert;
}

// Classification of equilibria of the complete graph (zero lag): a phase
// configuration is an equilibrium iff all pairwise differences are multiples
// of pi, or the phasor sum vanishes. Both can hold at once; `both` records it.
struct CompleteClassification {
  enum class Kind { pi_multiples, zero_sum, not_equilibrium };
  Kind kind = Kind::not_equilibrium;
  bool both = false;
  double pi_defect = 0.0;       // worst pairwise distance to a multiple of pi
  double phasor_magnitude = 0.0;  // |sum exp(i*theta)|
};

inline CompleteClassification classify_complete(const PhaseVector& theta, double tol = 1e-9) {
  const int n = static_cast<int>(theta.size());
  if (n < 2) {
    throw std::invalid_argument("classify_complete: need at least 2 phases");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("classify_complete: need tol > 0");
  }
  CompleteClassification out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = theta[i] - theta[j];
      const double defect = std::abs(d - std::numbers::pi * std::round(d / std::numbers::pi));
      out.pi_defect = std::max(out.pi_defect, defect);
    }
  }
  std::complex<double> z = 0.0;
  for (int i = 0; i < n; ++i) z += std::polar(1.0, theta[i]);
  out.phasor_magnitude = std::abs(z);

  const bool pi_ok = out.pi_defect <= tol;
  const bool sum_ok = out.phasor_magnitude <= static_cast<double>(n) * tol;
  if (pi_ok) {
    out.kind = CompleteClassification::Kind::pi_multiples;
    out.both = sum_ok;
  } else if (sum_ok) {
    out.kind = CompleteClassification::Kind::zero_sum;
  }
  return out;
}

// Harvest equilibria from unit-modulus eigenvectors: an eigenvector whose
// components all share one modulus defines theta_i = arg(v_i), an equilibrium
// of the lag-phi model for every lag with lambda*exp(-i*phi) real, i.e.
// phi = arg(lambda) mod pi. The representative in (-pi/2, pi/2] is stored in
// `phi`, the pi-shifted alternate in `phi_alternate`; real lambda gives phi = 0.
//
// Circulant matrices are diagonalized exactly in the Fourier basis (every such
// eigenvector has constant modulus, so all n candidates survive). General
// matrices fall back to the dense solver, whose choice of basis inside a
// degenerate eigenspace need not have constant modulus, so harvesting there is
// best-effort rather than exhaustive.
inline std::vector<EquilibriumCertificate> equilibria_from_eigenvectors(
    const AdjacencyMatrix& A, double epsilon = 1.0, double tol_modulus = kTolModulus) {
  if (!(tol_modulus > 0.0)) {
    throw std::invalid_argument("equilibria_from_eigenvectors: need tol_modulus > 0");
  }
  const int n = A.n();
  const std::vector<EigenPair> pairs =
      A.circulant ? circulant_spectrum(A.first_column()) : eig(A);

  std::vector<EquilibriumCertificate> out;
  for (const EigenPair& p : pairs) {
    const Eigen::ArrayXd moduli = p.vector.array().abs();
    const double mean = moduli.mean();
    if (!(mean > 0.0)) continue;
    if ((moduli - mean).abs().maxCoeff() > tol_modulus * mean) continue;

    PhaseVector theta(n);
    for (int i = 0; i < n; ++i) theta[i] = wrap_phase(std::arg(p.vector[i]));

    double phi = 0.0;
    std::optional<double> alternate;
    if (!p.is_real_value) {
      phi = std::arg(p.value);
      while (phi > std::numbers::pi / 2.0) phi -= std::numbers::pi;
      while (phi <= -std::numbers::pi / 2.0) phi += std::numbers::pi;
      alternate = wrap_phase(phi + std::numbers::pi);
    }

    EquilibriumCertificate cert =
        certify(A, theta, epsilon, detail::uniform_lag(n, phi), EquilibriumSource::eigenvector);
    cert.lambda = p.value;
    cert.zero_eigenvalue = std::abs(p.value) <= kTolEig * std::max(A.entries.norm(), 1e-300);
    cert.phi_alternate = alternate;
    if (A.circulant) {
      // exact Fourier vectors cannot fail; a miss here is an internal bug
      detail::assert_sound(cert, "equilibria_from_eigenvectors");
    } else if (!cert.accepted) {
      // near-threshold modulus deviation: candidate, not an equilibrium
      continue;
    }
    out.push_back(std::move(cert));
  }
  return out;
}

// All |G| character equilibria of a group-circulant matrix. The character
// chi_t gives phases theta_sigma = arg(chi_t(sigma)) (exact on the 2*pi/|G|
// grid) and eigenvalue Y_t = sum_g c_g chi_t(g); the configuration is an
// equilibrium with lag arg(Y_t) mod pi, or with any lag when Y_t = 0.
inline std::vector<EquilibriumCertificate> g_circulant_equilibria(const GroupSpec& group,
                                                                  const std::vector<double>& coeffs,
                                                                  double epsilon = 1.0) {
  const AdjacencyMatrix A = build_g_circulant(group, coeffs);
  const int N = group.order();
  double coeff_scale = 0.0;
  for (double c : coeffs) coeff_scale += std::abs(c);

  std::vector<EquilibriumCertificate> out;
  out.reserve(N);
  for (int t = 0; t < N; ++t) {
    PhaseVector theta(N);
    std::complex<double> Y = 0.0;
    for (int sigma = 0; sigma < N; ++sigma) {
      const double arg =
          2.0 * std::numbers::pi * static_cast<double>(group.character_exponent(t, sigma)) / N;
      theta[sigma] = wrap_phase(arg);
      Y += coeffs[sigma] * std::polar(1.0, arg);
    }
    const bool zero = std::abs(Y) <= 1e-12 * std::max(coeff_scale, 1e-300);

    double phi = 0.0;
    std::optional<double> alternate;
    if (!zero && !detail::nearly_real(Y)) {
      phi = std::arg(Y);
      while (phi > std::numbers::pi / 2.0) phi -= std::numbers::pi;
      while (phi <= -std::numbers::pi / 2.0) phi += std::numbers::pi;
      alternate = wrap_phase(phi + std::numbers::pi);
    }

    EquilibriumCertificate cert =
        certify(A, theta, epsilon, detail::uniform_lag(N, phi), EquilibriumSource::character);
    cert.lambda = Y;
    cert.zero_eigenvalue = zero;
    cert.phi_alternate = alternate;
    detail::assert_sound(cert, "g_circulant_equilibria");
    out.push_back(std::move(cert));
  }
  return out;
}

// Two-layer equilibrium for join matrices [[C, alpha*J], [beta*J, C]] with a
// k-node circulant layer: the j-twisted state repeated on both layers with a
// constant offset on the second. The cross-layer phasor sums vanish for
// 1 <= j <= k-1, so the configuration is an equilibrium for every alpha, beta.
inline PhaseVector multilayer_state(int k, int j, double phi_offset) {
  if (k < 2) {
    throw std::invalid_argument("multilayer_state: need k >= 2 nodes per layer");
  }
  if (j < 1 || j > k - 1) {
    throw std::invalid_argument("multilayer_state: need 1 <= j <= k-1");
  }
  if (!std::isfinite(phi_offset)) {
    throw std::invalid_argument("multilayer_state: offset must be finite");
  }
  const PhaseVector base = twisted_state(k, j);
  PhaseVector theta(2 * k);
  for (int m = 0; m < k; ++m) {
    theta[m] = base[m];
    theta[k + m] = wrap_phase(base[m] + phi_offset);
  }
  return theta;
}

inline EquilibriumCertificate certify_multilayer(const AdjacencyMatrix& A, int j,
                                                 double phi_offset, double epsilon) {
  if (A.n() % 2 != 0) {
    throw std::invalid_argument("certify_multilayer: matrix size must be even (two layers)");
  }
  EquilibriumCertificate cert =
      certify(A, multilayer_state(A.n() / 2, j, phi_offset), epsilon,
              detail::uniform_lag(A.n(), 0.0), EquilibriumSource::multilayer);
  detail::assert_sound(cert, "certify_multilayer");
  return cert;
}

// Scale policy for the replacement eigenvalue in design_random_equilibrium:
// keep the incumbent value or multiply it by a factor.
struct ScalePolicy {
  double factor = 1.0;
  static ScalePolicy keep() { return {1.0}; }
  static ScalePolicy multiply(double s) {
    if (!std::isfinite(s) || s == 0.0) {
      throw std::invalid_argument("ScalePolicy::multiply: factor must be finite and nonzero");
    }
    return {s};
  }
};

struct DesignResult {
  AdjacencyMatrix modified;             // A' with the planted equilibrium
  PhaseVector theta0;                   // the planted j-twisted configuration
  EquilibriumCertificate certificate;   // certified against A'
  double lambda_star = 0.0;             // common eigenvalue of cos/sin directions
  std::array<int, 2> replaced;          // spectral slots (ascending order) that were rebuilt
};

// Plant a twisted equilibrium into an arbitrary symmetric coupling matrix by
// spectral surgery: diagonalize A = V D V^T, replace the two eigenvectors just
// below the top (slots n-2 and n-3 in ascending order) by the normalized
// cos(theta0) and sin(theta0) directions sharing one eigenvalue lambda*, and
// re-orthonormalize the retained columns against them (QR) before
// reassembling. Then x = exp(i*theta0) satisfies A'x = lambda*'x exactly up to
// roundoff, so theta0 is an equilibrium of the zero-lag model on A'.
inline DesignResult design_random_equilibrium(const AdjacencyMatrix& A, int j,
                                              ScalePolicy policy = ScalePolicy::keep(),
                                              double epsilon = 1.0) {
  const int n = A.n();
  if (!A.symmetric) {
    throw std::invalid_argument("design_random_equilibrium: matrix must be symmetric");
  }
  if (n < 4) {
    throw std::invalid_argument("design_random_equilibrium: need n >= 4");
  }
  if (j < 1 || j > n - 1) {
    throw std::invalid_argument("design_random_equilibrium: need 1 <= j <= n-1");
  }

  const PhaseVector theta0 = twisted_state(n, j);
  Eigen::VectorXd c(n), s(n);
  for (int m = 0; m < n; ++m) {
    c[m] = std::cos(theta0[m]);
    s[m] = std::sin(theta0[m]);
  }
  const double sn = s.norm();
  if (sn <= 1e-8 * std::sqrt(static_cast<double>(n))) {
    throw DesignError("design_random_equilibrium: sin(theta0) degenerate (j = " +
                      std::to_string(j) + " gives a collinear pair); choose j with 2j != 0 mod n");
  }
  const Eigen::VectorXd chat = c / c.norm();
  const Eigen::VectorXd shat = s / sn;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.entries);
  if (es.info() != Eigen::Success) {
    throw Error("design_random_equilibrium: eigensolver failed to converge");
  }
  const Eigen::VectorXd& d = es.eigenvalues();
  const Eigen::MatrixXd& V = es.eigenvectors();

  const double lambda_star = d[n - 2] * policy.factor;

  // Column order: the planted pair first, then the retained eigenvectors
  // (ascending slots 0..n-4 and the top slot n-1). QR keeps the leading two
  // columns fixed and orthonormalizes the rest against them.
  Eigen::MatrixXd B(n, n);
  B.col(0) = chat;
  B.col(1) = shat;
  for (int i = 0; i < n - 3; ++i) B.col(2 + i) = V.col(i);
  B.col(n - 1) = V.col(n - 1);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd rdiag = qr.matrixQR().diagonal();
  for (int i = 0; i < n; ++i) {
    const double r = std::abs(rdiag[i]);
    if (r <= 1e-8) {
      const double overlap = std::sqrt(std::max(0.0, 1.0 - r * r));
      throw DesignError(
          "design_random_equilibrium: retained eigenvector nearly collinear with the planted "
          "pair (overlap " +
          std::to_string(overlap) + "); the replacement basis is rank-deficient");
    }
  }

  Eigen::VectorXd values(n);
  values[0] = lambda_star;
  values[1] = lambda_star;
  for (int i = 0; i < n - 3; ++i) values[2 + i] = d[i];
  values[n - 1] = d[n - 1];

  const Eigen::MatrixXd raw = Q * values.asDiagonal() * Q.transpose();

  DesignResult result;
  result.modified.entries = 0.5 * (raw + raw.transpose());
  result.modified.symmetric = true;
  result.modified.circulant = false;
  result.modified.zero_diagonal = false;
  result.theta0 = theta0;
  result.lambda_star = lambda_star;
  result.replaced = {n - 3, n - 2};

  Eigen::VectorXcd x(n);
  for (int m = 0; m < n; ++m) x[m] = std::complex<double>(c[m], s[m]);
  const double gate =
      (result.modified.entries * x - lambda_star * x).norm() / x.norm();
  if (gate > 1e-6) {
    throw DesignError("design_random_equilibrium: planted eigenvector residual " +
                      std::to_string(gate) + " exceeds 1e-6");
  }

  result.certificate = certify(result.modified, theta0, epsilon,
                               detail::uniform_lag(n, 0.0), EquilibriumSource::designed);
  result.certificate.lambda = lambda_star;
  detail::assert_sound(result.certificate, "design_random_equilibrium");
  return result;
}

}  // namespace kuramoto
