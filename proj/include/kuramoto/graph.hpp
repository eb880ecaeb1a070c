#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kuramoto/errors.hpp"

namespace kuramoto {

// Weighted coupling matrix together with structural flags. The flags are set
// by the builders and propagated by operations; they gate which spectral
// routines are applicable (e.g. exact Fourier diagonalization when circulant).
struct AdjacencyMatrix {
  Eigen::MatrixXd entries;
  bool symmetric = false;
  bool circulant = false;
  bool zero_diagonal = true;

  int n() const { return static_cast<int>(entries.rows()); }

  // First column, the coefficient vector that generates a circulant matrix.
  Eigen::VectorXd first_column() const { return entries.col(0); }
};

namespace detail {

inline void check_node_count(int n, int minimum, const char* where) {
  if (n < minimum) {
    throw std::invalid_argument(std::string(where) + ": need at least " +
                                std::to_string(minimum) + " nodes, got " + std::to_string(n));
  }
}

inline bool palindrome_tail(const Eigen::VectorXd& row) {
  const int n = static_cast<int>(row.size());
  for (int k = 1; k < n; ++k) {
    if (row[k] != row[n - k]) return false;
  }
  return true;
}

}  // namespace detail

// Circulant matrix from its first row: entries(i, j) = first_row[(j - i) mod n].
// Each subsequent row is the previous one shifted right by one position.
inline AdjacencyMatrix build_circulant(int n, const Eigen::VectorXd& first_row,
                                       bool allow_self_loops = false) {
  detail::check_node_count(n, 1, "build_circulant");
  if (static_cast<int>(first_row.size()) != n) {
    throw std::invalid_argument("build_circulant: first_row has " +
                                std::to_string(first_row.size()) + " entries, expected " +
                                std::to_string(n));
  }
  if (!first_row.allFinite()) {
    throw std::invalid_argument("build_circulant: first_row contains a non-finite entry");
  }
  if (first_row[0] != 0.0 && !allow_self_loops) {
    throw std::invalid_argument(
        "build_circulant: first_row[0] != 0 creates self-loops; pass allow_self_loops to permit");
  }
  AdjacencyMatrix A;
  A.entries.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      A.entries(i, j) = first_row[((j - i) % n + n) % n];
    }
  }
  A.circulant = true;
  A.symmetric = detail::palindrome_tail(first_row);
  A.zero_diagonal = (first_row[0] == 0.0);
  return A;
}

// Ring lattice: node m is coupled to its k nearest neighbours on each side.
// Requires 1 <= k <= (n - 1) / 2 so neighbourhoods do not wrap onto each other.
inline AdjacencyMatrix build_ring(int n, int k) {
  detail::check_node_count(n, 3, "build_ring");
  if (k < 1 || 2 * k > n - 1) {
    throw std::invalid_argument("build_ring: k must satisfy 1 <= k <= (n-1)/2, got k = " +
                                std::to_string(k) + " with n = " + std::to_string(n));
  }
  Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
  for (int d = 1; d <= k; ++d) {
    row[d] = 1.0;
    row[n - d] = 1.0;
  }
  return build_circulant(n, row);
}

// Complete graph K_n: all-ones off the diagonal.
inline AdjacencyMatrix build_complete(int n) {
  detail::check_node_count(n, 2, "build_complete");
  Eigen::VectorXd row = Eigen::VectorXd::Ones(n);
  row[0] = 0.0;
  return build_circulant(n, row);
}

// Two-layer join [[C, alpha*J], [beta*J, D]] where J is the all-ones block.
// Both layers must be circulant of equal size; the cross-layer coupling is
// uniform with independent forward/backward weights.
inline AdjacencyMatrix build_join(const AdjacencyMatrix& C, const AdjacencyMatrix& D,
                                  double alpha, double beta) {
  if (!C.circulant || !D.circulant) {
    throw std::invalid_argument("build_join: both layers must be circulant");
  }
  if (C.n() != D.n()) {
    throw std::invalid_argument("build_join: layer sizes differ (" + std::to_string(C.n()) +
                                " vs " + std::to_string(D.n()) + ")");
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw std::invalid_argument("build_join: cross-layer weights must be finite");
  }
  const int k = C.n();
  AdjacencyMatrix A;
  A.entries.resize(2 * k, 2 * k);
  A.entries.topLeftCorner(k, k) = C.entries;
  A.entries.bottomRightCorner(k, k) = D.entries;
  A.entries.topRightCorner(k, k).setConstant(alpha);
  A.entries.bottomLeftCorner(k, k).setConstant(beta);
  A.circulant = false;
  A.symmetric = (alpha == beta) && C.symmetric && D.symmetric;
  A.zero_diagonal = C.zero_diagonal && D.zero_diagonal;
  return A;
}

// Finite abelian group Z/n_1 x ... x Z/n_k with mixed-radix element indexing
// (first factor most significant). Elements and characters are both indexed
// by 0..order()-1; character t evaluated at element s has argument
// 2*pi*character_exponent(t, s)/order(), kept exact in integer arithmetic.
struct GroupSpec {
  std::vector<int> factors;

  explicit GroupSpec(std::vector<int> f) : factors(std::move(f)) {
    if (factors.empty()) {
      throw std::invalid_argument("GroupSpec: factor list is empty");
    }
    for (int m : factors) {
      if (m < 1) {
        throw std::invalid_argument("GroupSpec: factors must be positive, got " +
                                    std::to_string(m));
      }
    }
  }
  GroupSpec(std::initializer_list<int> f) : GroupSpec(std::vector<int>(f)) {}

  int order() const {
    long long N = 1;
    for (int m : factors) N *= m;
    return static_cast<int>(N);
  }

  std::vector<int> element(int index) const {
    check_index(index);
    std::vector<int> tuple(factors.size());
    for (int i = static_cast<int>(factors.size()) - 1; i >= 0; --i) {
      tuple[i] = index % factors[i];
      index /= factors[i];
    }
    return tuple;
  }

  int index_of(const std::vector<int>& tuple) const {
    if (tuple.size() != factors.size()) {
      throw std::invalid_argument("GroupSpec: tuple rank mismatch");
    }
    int index = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (tuple[i] < 0 || tuple[i] >= factors[i]) {
        throw std::invalid_argument("GroupSpec: tuple component out of range");
      }
      index = index * factors[i] + tuple[i];
    }
    return index;
  }

  int inverse(int index) const {
    std::vector<int> t = element(index);
    for (std::size_t i = 0; i < factors.size(); ++i) {
      t[i] = (factors[i] - t[i]) % factors[i];
    }
    return index_of(t);
  }

  // Index of tau^{-1} * sigma, i.e. the component-wise difference sigma - tau.
  int difference(int tau, int sigma) const {
    std::vector<int> a = element(tau);
    std::vector<int> b = element(sigma);
    for (std::size_t i = 0; i < factors.size(); ++i) {
      a[i] = ((b[i] - a[i]) % factors[i] + factors[i]) % factors[i];
    }
    return index_of(a);
  }

  // Integer r in [0, order()) with chi_t(sigma) = exp(2*pi*i*r/order()).
  int character_exponent(int char_index, int elem_index) const {
    std::vector<int> t = element(char_index);
    std::vector<int> s = element(elem_index);
    const long long N = order();
    long long r = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      r = (r + static_cast<long long>(t[i]) * s[i] * (N / factors[i])) % N;
    }
    return static_cast<int>(r);
  }

 private:
  void check_index(int index) const {
    if (index < 0 || index >= order()) {
      throw std::invalid_argument("GroupSpec: element index " + std::to_string(index) +
                                  " out of range [0, " + std::to_string(order()) + ")");
    }
  }
};

// Group-circulant matrix over an abelian group: rows and columns are indexed
// by group elements and entries(tau, sigma) = coeffs[tau^{-1} * sigma].
// For G = Z/n this reduces to build_circulant with coeffs as the first row.
inline AdjacencyMatrix build_g_circulant(const GroupSpec& group, const std::vector<double>& coeffs,
                                         bool allow_self_loops = false) {
  const int N = group.order();
  if (static_cast<int>(coeffs.size()) != N) {
    throw std::invalid_argument("build_g_circulant: need " + std::to_string(N) +
                                " coefficients (one per group element), got " +
                                std::to_string(coeffs.size()));
  }
  for (double c : coeffs) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("build_g_circulant: coefficients must be finite");
    }
  }
  if (coeffs[0] != 0.0 && !allow_self_loops) {
    throw std::invalid_argument(
        "build_g_circulant: identity coefficient != 0 creates self-loops; pass allow_self_loops "
        "to permit");
  }
  AdjacencyMatrix A;
  A.entries.resize(N, N);
  for (int tau = 0; tau < N; ++tau) {
    for (int sigma = 0; sigma < N; ++sigma) {
      A.entries(tau, sigma) = coeffs[group.difference(tau, sigma)];
    }
  }
  bool sym = true;
  for (int g = 0; g < N && sym; ++g) {
    sym = (coeffs[g] == coeffs[group.inverse(g)]);
  }
  A.symmetric = sym;
  A.circulant = (group.factors.size() == 1);
  A.zero_diagonal = (coeffs[0] == 0.0);
  return A;
}

// Erdos-Renyi G(n, p). Deterministic for a given seed: draws are taken from
// std::mt19937_64(seed) mapped to [0, 1) via (x >> 11) * 2^-53, consumed in
// row-major order over the unordered pairs (i, j) with i < j; the pair is an
// edge iff the draw is < p.
inline AdjacencyMatrix build_erdos_renyi(int n, double p, std::uint64_t seed) {
  detail::check_node_count(n, 1, "build_erdos_renyi");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("build_erdos_renyi: p must lie in [0, 1], got " +
                                std::to_string(p));
  }
  std::mt19937_64 gen(seed);
  auto unit = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  AdjacencyMatrix A;
  A.entries = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (unit() < p) {
        A.entries(i, j) = 1.0;
        A.entries(j, i) = 1.0;
      }
    }
  }
  A.symmetric = true;
  A.circulant = false;
  A.zero_diagonal = true;
  return A;
}

}  // namespace kuramoto
