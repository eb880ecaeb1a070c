#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "kuramoto/errors.hpp"
#include "kuramoto/graph.hpp"

namespace kuramoto {

using ComplexState = Eigen::VectorXcd;

// Relative residual below which an eigenpair is treated as exact and an
// eigenvalue imaginary part is treated as zero.
inline constexpr double kTolEig = 1e-9;

struct EigenPair {
  std::complex<double> value;
  Eigen::VectorXcd vector;  // unit norm, first non-negligible component rotated positive real
  bool is_real_value = false;
};

namespace detail {

inline void canonicalize(Eigen::VectorXcd& v) {
  const double nrm = v.norm();
  if (nrm > 0.0) v /= nrm;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    if (m > 1e-12) {
      v *= std::conj(v[i]) / m;
      break;
    }
  }
}

inline bool nearly_real(std::complex<double> z) {
  return std::abs(z.imag()) <= kTolEig * (1.0 + std::abs(z));
}

}  // namespace detail

// Exact spectrum of the circulant matrix generated by its first column c:
// for each j, the unit vector v_j with components exp(2*pi*i*j*m/n)/sqrt(n)
// satisfies A v_j = lambda_j v_j with lambda_j = sum_k c_k exp(-2*pi*i*k*j/n).
// Angles are reduced to the 2*pi/n grid in integer arithmetic, so the vectors
// have constant component modulus to machine precision by construction.
inline std::vector<EigenPair> circulant_spectrum(const Eigen::VectorXd& first_column) {
  const int n = static_cast<int>(first_column.size());
  if (n < 1) {
    throw std::invalid_argument("circulant_spectrum: empty coefficient vector");
  }
  if (!first_column.allFinite()) {
    throw std::invalid_argument("circulant_spectrum: coefficients must be finite");
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<EigenPair> pairs(n);
  for (int j = 0; j < n; ++j) {
    EigenPair& p = pairs[j];
    p.vector.resize(n);
    std::complex<double> lambda = 0.0;
    for (int m = 0; m < n; ++m) {
      const long long fwd = (static_cast<long long>(j) * m) % n;
      p.vector[m] = std::polar(inv_sqrt_n, 2.0 * std::numbers::pi * static_cast<double>(fwd) / n);
      const long long bwd = (n - fwd) % n;
      lambda += first_column[m] *
                std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(bwd) / n);
    }
    p.value = lambda;
    p.is_real_value = detail::nearly_real(lambda);
    detail::canonicalize(p.vector);
  }
  return pairs;
}

// Dense eigendecomposition. Symmetric matrices use the self-adjoint solver
// (real spectrum, ascending order); general matrices use the real solver with
// pairs sorted by (Re, Im). Degenerate eigenspaces come back in an arbitrary
// orthogonal basis, so for circulant matrices prefer circulant_spectrum, which
// returns the Fourier basis.
inline std::vector<EigenPair> eig(const AdjacencyMatrix& A) {
  const int n = A.n();
  if (n < 1 || A.entries.cols() != n) {
    throw std::invalid_argument("eig: matrix must be square and non-empty");
  }
  std::vector<EigenPair> pairs;
  pairs.reserve(n);
  if (A.symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.entries);
    if (es.info() != Eigen::Success) {
      throw Error("eig: self-adjoint eigensolver failed to converge");
    }
    for (int i = 0; i < n; ++i) {
      EigenPair p;
      p.value = es.eigenvalues()[i];
      p.vector = es.eigenvectors().col(i).cast<std::complex<double>>();
      p.is_real_value = true;
      detail::canonicalize(p.vector);
      pairs.push_back(std::move(p));
    }
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A.entries);
    if (es.info() != Eigen::Success) {
      throw Error("eig: eigensolver failed to converge");
    }
    for (int i = 0; i < n; ++i) {
      EigenPair p;
      p.value = es.eigenvalues()[i];
      p.vector = es.eigenvectors().col(i);
      p.is_real_value = detail::nearly_real(p.value);
      if (p.is_real_value) p.value = p.value.real();
      detail::canonicalize(p.vector);
      pairs.push_back(std::move(p));
    }
    std::sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
      if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
      return a.value.imag() < b.value.imag();
    });
  }
  return pairs;
}

namespace detail {

// Pade approximant of order 13 with scaling and squaring. Standard choice of
// coefficients and scaling threshold for double precision.
inline Eigen::MatrixXcd pade13_expm(const Eigen::MatrixXcd& M) {
  static const double b[14] = {64764752532480000.0,
                               32382376266240000.0,
                               7771770303897600.0,
                               1187353796428800.0,
                               129060195264000.0,
                               10559470521600.0,
                               670442572800.0,
                               33522128640.0,
                               1323241920.0,
                               40840800.0,
                               960960.0,
                               16380.0,
                               182.0,
                               1.0};
  const double theta13 = 5.371920351148152;
  const int n = static_cast<int>(M.rows());
  const double norm1 = M.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) {
    s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  }
  const Eigen::MatrixXcd A = M / std::pow(2.0, s);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd A2 = A * A;
  const Eigen::MatrixXcd A4 = A2 * A2;
  const Eigen::MatrixXcd A6 = A4 * A2;
  const Eigen::MatrixXcd U =
      A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 +
           b[1] * I);
  const Eigen::MatrixXcd V =
      A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  Eigen::MatrixXcd F = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < s; ++k) F = F * F;
  return F;
}

}  // namespace detail

// Action of exp(t*K) factorized once for repeated application.
//
// Three routes, in order of preference:
//  1. If x0 is (numerically) an eigenvector of K with eigenvalue rho, return
//     exp(t*rho) * x0 exactly in that direction. Besides matching the
//     analytical solution, this avoids amplification of the off-eigenvector
//     floating-point contamination by exp((lambda_max - rho) * t), which for
//     spread-out spectra and large t would otherwise swamp the result.
//  2. If K is normal (detected from the Schur form), exponentiate the
//     diagonalized form U exp(t*D) U*.
//  3. Otherwise evaluate the scaled-and-squared Pade approximant of exp(t*K).
class ExpmOperator {
 public:
  explicit ExpmOperator(Eigen::MatrixXcd K) : K_(std::move(K)) {
    if (K_.rows() < 1 || K_.rows() != K_.cols()) {
      throw std::invalid_argument("ExpmOperator: matrix must be square and non-empty");
    }
    if (!K_.allFinite()) {
      throw std::invalid_argument("ExpmOperator: matrix must be finite");
    }
    fro_ = K_.norm();
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(K_);
    if (schur.info() == Eigen::Success) {
      const Eigen::MatrixXcd& T = schur.matrixT();
      double off = 0.0;
      for (Eigen::Index i = 0; i < T.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < T.cols(); ++j) {
          off += std::norm(T(i, j));
        }
      }
      if (std::sqrt(off) <= 1e-13 * std::max(fro_, 1e-300)) {
        normal_ = true;
        basis_ = schur.matrixU();
        eigenvalues_ = T.diagonal();
      }
    }
  }

  int n() const { return static_cast<int>(K_.rows()); }

  ComplexState apply(const ComplexState& x0, double t) const {
    if (x0.size() != K_.rows()) {
      throw std::invalid_argument("ExpmOperator::apply: state size mismatch");
    }
    if (!std::isfinite(t)) {
      throw std::invalid_argument("ExpmOperator::apply: t must be finite");
    }
    if (t == 0.0) return x0;
    const double xn = x0.norm();
    if (xn > 0.0) {
      const Eigen::VectorXcd Kx = K_ * x0;
      const std::complex<double> rho = x0.dot(Kx) / (xn * xn);
      if ((Kx - rho * x0).norm() <= 1e-12 * std::max(fro_, 1e-300) * xn) {
        return finished(std::exp(t * rho) * x0, t);
      }
    }
    if (normal_) {
      Eigen::VectorXcd y = basis_.adjoint() * x0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        y[i] *= std::exp(t * eigenvalues_[i]);
      }
      return finished(basis_ * y, t);
    }
    return finished(detail::pade13_expm(t * K_) * x0, t);
  }

 private:
  static ComplexState finished(ComplexState x, double t) {
    if (!x.allFinite()) {
      throw OverflowError("expm_action: exp(t*K) overflowed at t = " + std::to_string(t));
    }
    return x;
  }

  Eigen::MatrixXcd K_;
  double fro_ = 0.0;
  bool normal_ = false;
  Eigen::MatrixXcd basis_;
  Eigen::VectorXcd eigenvalues_;
};

// One-shot convenience wrapper: exp(t*K) * x0.
inline ComplexState expm_action(const Eigen::MatrixXcd& K, const ComplexState& x0, double t) {
  return ExpmOperator(K).apply(x0, t);
}

}  // namespace kuramoto
