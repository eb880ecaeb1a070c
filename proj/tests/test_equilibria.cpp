#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "kuramoto/equilibria.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto/spectral.hpp"

using kuramoto::AdjacencyMatrix;
using kuramoto::CompleteClassification;
using kuramoto::EquilibriumCertificate;
using kuramoto::EquilibriumSource;
using kuramoto::GroupSpec;
using kuramoto::PhaseVector;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double pi = std::numbers::pi;

double circular_distance(double a, double b) {
  return std::abs(kuramoto::wrap_phase(a - b));
}

void require_circular_equal(const PhaseVector& got, std::initializer_list<double> want,
                            double tol = 1e-14) {
  REQUIRE(got.size() == static_cast<Eigen::Index>(want.size()));
  Eigen::Index i = 0;
  for (double w : want) {
    REQUIRE(circular_distance(got[i], w) < tol);
    ++i;
  }
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("twisted states lie on the exact winding grid") {
  require_circular_equal(kuramoto::twisted_state(4, 1), {0.0, pi / 2.0, pi, 3.0 * pi / 2.0});
  require_circular_equal(kuramoto::twisted_state(4, 0), {0.0, 0.0, 0.0, 0.0});
  require_circular_equal(kuramoto::twisted_state(5, 2),
                         {0.0, 4.0 * pi / 5.0, 8.0 * pi / 5.0, 2.0 * pi / 5.0, 6.0 * pi / 5.0});
  const PhaseVector t8 = kuramoto::twisted_state(8, 1);
  for (int m = 0; m < 8; ++m) {
    REQUIRE(t8[m] == kuramoto::wrap_phase(m * pi / 4.0));
    REQUIRE(t8[m] >= -pi);
    REQUIRE(t8[m] < pi);
  }
  REQUIRE_THROWS_AS(kuramoto::twisted_state(4, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(kuramoto::twisted_state(4, -1), std::invalid_argument);
}

TEST_CASE("residual matches a hand-written two-node computation") {
  AdjacencyMatrix A;
  A.entries.resize(2, 2);
  A.entries << 0, 1, 1, 0;
  A.symmetric = true;
  PhaseVector theta(2);
  theta << 0.0, pi / 3.0;
  const Eigen::VectorXd phi = Eigen::VectorXd::Zero(2);
  REQUIRE_THAT(kuramoto::equilibrium_residual(A, theta, phi),
               WithinAbs(std::sin(pi / 3.0), 1e-15));
}

TEST_CASE("acceptance tolerance scales with coupling and worst row weight") {
  AdjacencyMatrix A;
  A.entries.resize(3, 3);
  A.entries << 0, 1, -2, 3, 0, 0, 1, 1, 0;
  REQUIRE_THAT(kuramoto::acceptance_tolerance(A, 2.0), WithinAbs(6e-9, 1e-22));
  REQUIRE_THAT(kuramoto::acceptance_tolerance(A, 1.0) * 10.0,
               WithinAbs(kuramoto::acceptance_tolerance(A, 10.0), 1e-22));
}

TEST_CASE("verification accepts twisted states and rejects perturbations") {
  const AdjacencyMatrix A = kuramoto::build_ring(10, 2);
  const PhaseVector theta = kuramoto::twisted_state(10, 1);
  const EquilibriumCertificate good = kuramoto::verify_equilibrium(A, theta, 1.0);
  REQUIRE(good.accepted);
  REQUIRE(good.residual <= good.tolerance);
  REQUIRE(good.source == EquilibriumSource::user);

  PhaseVector bumped = theta;
  bumped[3] += 1e-3;
  const EquilibriumCertificate bad = kuramoto::verify_equilibrium(A, bumped, 1.0);
  REQUIRE_FALSE(bad.accepted);
  REQUIRE(bad.residual > 1e-5);
}

TEST_CASE("verification attaches the eigenvalue of the phasor direction") {
  const AdjacencyMatrix A = kuramoto::build_ring(6, 2);
  // 1-twisted phasor: eigenvalue 2(cos(pi/3) + cos(2pi/3)) = 0
  const EquilibriumCertificate zero =
      kuramoto::verify_equilibrium(A, kuramoto::twisted_state(6, 1), 1.0);
  REQUIRE(zero.lambda.has_value());
  REQUIRE_THAT(std::abs(*zero.lambda), WithinAbs(0.0, 1e-12));
  REQUIRE(zero.zero_eigenvalue);
  // 2-twisted phasor: eigenvalue -2
  const EquilibriumCertificate neg =
      kuramoto::verify_equilibrium(A, kuramoto::twisted_state(6, 2), 1.0);
  REQUIRE(neg.lambda.has_value());
  REQUIRE_THAT(std::abs(*neg.lambda - std::complex<double>(-2.0, 0.0)), WithinAbs(0.0, 1e-12));
  REQUIRE_FALSE(neg.zero_eigenvalue);
  // a generic configuration is no eigen-direction: no eigenvalue attached
  PhaseVector theta(6);
  theta << 0.1, 0.0, 0.9, -2.0, 1.3, 2.2;
  REQUIRE_FALSE(kuramoto::verify_equilibrium(A, theta, 1.0).lambda.has_value());
}

TEST_CASE("verification is invariant under global shifts and wrapping") {
  const AdjacencyMatrix A = kuramoto::build_ring(8, 3);
  const PhaseVector theta = kuramoto::twisted_state(8, 2);
  const EquilibriumCertificate base = kuramoto::verify_equilibrium(A, theta, 1.0);
  for (double c : {0.37, 2.0 * pi, -4.0 * pi + 1.1}) {
    const EquilibriumCertificate shifted =
        kuramoto::verify_equilibrium(A, (theta.array() + c).matrix(), 1.0);
    REQUIRE(shifted.accepted == base.accepted);
    REQUIRE_THAT(shifted.residual, WithinAbs(base.residual, 1e-12));
  }
}

TEST_CASE("complete graph classification separates the two equilibrium families") {
  const double tol = 1e-9;
  const auto pi_only = kuramoto::classify_complete(vec({0.0, pi, pi, pi}), tol);
  REQUIRE(pi_only.kind == CompleteClassification::Kind::pi_multiples);
  REQUIRE_FALSE(pi_only.both);

  const auto balanced_pi = kuramoto::classify_complete(vec({0.0, 0.0, pi, pi}), tol);
  REQUIRE(balanced_pi.kind == CompleteClassification::Kind::pi_multiples);
  REQUIRE(balanced_pi.both);  // phasor sum vanishes too

  const auto zero_sum = kuramoto::classify_complete(
      vec({0.0, 2.0 * pi / 3.0, -2.0 * pi / 3.0}), tol);
  REQUIRE(zero_sum.kind == CompleteClassification::Kind::zero_sum);

  const auto twisted = kuramoto::classify_complete(kuramoto::twisted_state(4, 1), tol);
  REQUIRE(twisted.kind == CompleteClassification::Kind::zero_sum);

  const auto neither = kuramoto::classify_complete(vec({0.0, pi / 6.0, 0.0, 0.0}), tol);
  REQUIRE(neither.kind == CompleteClassification::Kind::not_equilibrium);
  REQUIRE(neither.phasor_magnitude > 0.1);

  // classification agrees with the residual test on the complete graph
  const AdjacencyMatrix K = kuramoto::build_complete(4);
  REQUIRE(kuramoto::verify_equilibrium(K, vec({0.0, 0.0, pi, pi}), 1.0).accepted);
  REQUIRE(kuramoto::verify_equilibrium(K, kuramoto::twisted_state(4, 1), 1.0).accepted);
  REQUIRE_FALSE(kuramoto::verify_equilibrium(K, vec({0.0, pi / 6.0, 0.0, 0.0}), 1.0).accepted);
}

TEST_CASE("eigenvector harvest on the 4-node directed circulant") {
  const AdjacencyMatrix A = kuramoto::build_circulant(4, vec({0, 0, 1, 1}));
  const auto certs = kuramoto::equilibria_from_eigenvectors(A);
  REQUIRE(certs.size() == 4);
  for (const auto& c : certs) {
    REQUIRE(c.accepted);
    REQUIRE(c.source == EquilibriumSource::eigenvector);
    REQUIRE(c.lambda.has_value());
  }
  // winding 1: eigenvalue -1-i, lag representative pi/4, alternate -3pi/4
  const EquilibriumCertificate& j1 = certs[1];
  require_circular_equal(j1.theta, {0.0, pi / 2.0, pi, 3.0 * pi / 2.0});
  REQUIRE_THAT(std::abs(*j1.lambda - std::complex<double>(-1.0, -1.0)), WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(j1.phi[0], WithinAbs(pi / 4.0, 1e-12));
  REQUIRE(j1.phi_alternate.has_value());
  REQUIRE_THAT(*j1.phi_alternate, WithinAbs(-3.0 * pi / 4.0, 1e-12));
  // winding 0: real eigenvalue 2, zero lag
  REQUIRE_THAT(certs[0].phi[0], WithinAbs(0.0, 1e-15));
  REQUIRE_FALSE(certs[0].phi_alternate.has_value());
  // winding 2: kernel direction
  REQUIRE(certs[2].zero_eigenvalue);
  REQUIRE_THAT(certs[2].phi[0], WithinAbs(0.0, 1e-15));
}

TEST_CASE("the pi-shifted alternate lag is an equilibrium too") {
  const AdjacencyMatrix A = kuramoto::build_circulant(4, vec({0, 0, 1, 1}));
  const auto certs = kuramoto::equilibria_from_eigenvectors(A);
  const EquilibriumCertificate& j1 = certs[1];
  const EquilibriumCertificate alt = kuramoto::verify_equilibrium(
      A, j1.theta, 1.0, *j1.phi_alternate);
  REQUIRE(alt.accepted);
}

TEST_CASE("eigenvector harvest on the complete graph finds all twisted states") {
  const AdjacencyMatrix K = kuramoto::build_complete(4);
  const auto certs = kuramoto::equilibria_from_eigenvectors(K);
  REQUIRE(certs.size() == 4);
  REQUIRE_THAT(std::abs(*certs[0].lambda - std::complex<double>(3.0, 0.0)),
               WithinAbs(0.0, 1e-12));
  for (int j = 1; j < 4; ++j) {
    REQUIRE_THAT(std::abs(*certs[j].lambda - std::complex<double>(-1.0, 0.0)),
                 WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(certs[j].phi[0], WithinAbs(0.0, 1e-15));
  }
}

TEST_CASE("eigenvector harvest on a wide ring emits every twisted state") {
  const AdjacencyMatrix A = kuramoto::build_ring(50, 10);
  const auto certs = kuramoto::equilibria_from_eigenvectors(A);
  REQUIRE(certs.size() == 50);
  for (int j = 0; j < 50; ++j) {
    const auto& c = certs[static_cast<std::size_t>(j)];
    REQUIRE(c.accepted);
    const PhaseVector want = kuramoto::twisted_state(50, j);
    for (int m = 0; m < 50; ++m) {
      REQUIRE(circular_distance(c.theta[m], want[m]) < 1e-12);
    }
  }
}

TEST_CASE("eigenvector harvest is sound on general symmetric matrices") {
  // Dense route: whatever basis the solver picks, every emitted certificate
  // must pass verification on its own.
  const AdjacencyMatrix A = kuramoto::build_erdos_renyi(12, 0.5, 9);
  const auto certs = kuramoto::equilibria_from_eigenvectors(A);
  for (const auto& c : certs) {
    REQUIRE(c.accepted);
    const EquilibriumCertificate recheck =
        kuramoto::verify_equilibrium(A, c.theta, c.epsilon, c.phi);
    REQUIRE(recheck.accepted);
  }
}

TEST_CASE("character equilibria over the Klein group match the complete graph") {
  const GroupSpec klein({2, 2});
  const auto certs = kuramoto::g_circulant_equilibria(klein, {0, 1, 1, 1});
  REQUIRE(certs.size() == 4);
  std::vector<double> values;
  for (const auto& c : certs) {
    REQUIRE(c.accepted);
    REQUIRE(c.source == EquilibriumSource::character);
    REQUIRE(c.lambda.has_value());
    REQUIRE_THAT(std::abs(c.lambda->imag()), WithinAbs(0.0, 1e-13));
    values.push_back(c.lambda->real());
  }
  std::sort(values.begin(), values.end());
  REQUIRE_THAT(values[0], WithinAbs(-1.0, 1e-13));
  REQUIRE_THAT(values[1], WithinAbs(-1.0, 1e-13));
  REQUIRE_THAT(values[2], WithinAbs(-1.0, 1e-13));
  REQUIRE_THAT(values[3], WithinAbs(3.0, 1e-13));
  // the (0,1) character alternates layers: phases (0, pi, 0, pi)
  require_circular_equal(certs[1].theta, {0.0, pi, 0.0, pi});
}

TEST_CASE("character equilibria flag vanishing eigenvalues") {
  const GroupSpec z4({4});
  const auto certs = kuramoto::g_circulant_equilibria(z4, {0, 1, 0, 1});
  REQUIRE(certs.size() == 4);
  // Y_1 = i + i^3 = 0: equilibrium for every lag, flagged as kernel direction
  REQUIRE(certs[1].zero_eigenvalue);
  REQUIRE(certs[1].accepted);
  REQUIRE_THAT(certs[1].phi[0], WithinAbs(0.0, 1e-15));
  REQUIRE_FALSE(certs[0].zero_eigenvalue);  // Y_0 = 2
}

TEST_CASE("character route over Z/n agrees with the Fourier route") {
  const AdjacencyMatrix R = kuramoto::build_ring(6, 2);
  const GroupSpec z6({6});
  std::vector<double> coeffs(6);
  for (int i = 0; i < 6; ++i) coeffs[i] = R.entries(0, i);
  const auto character = kuramoto::g_circulant_equilibria(z6, coeffs);
  const auto fourier = kuramoto::circulant_spectrum(R.first_column());
  REQUIRE(character.size() == 6);
  for (int t = 0; t < 6; ++t) {
    // chi_t has winding t, matching the Fourier mode with exponent -t
    const int j = (6 - t) % 6;
    REQUIRE_THAT(std::abs(*character[t].lambda - fourier[j].value), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("two-layer twisted states are equilibria for any cross-coupling") {
  const AdjacencyMatrix C = kuramoto::build_ring(25, 5);
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> weight(-1.5, 1.5);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  for (int trial = 0; trial < 6; ++trial) {
    const double alpha = weight(gen);
    const double beta = weight(gen);
    const int j = 1 + static_cast<int>(gen() % 24);
    const double off = angle(gen);
    const AdjacencyMatrix A = kuramoto::build_join(C, C, alpha, beta);
    const EquilibriumCertificate cert = kuramoto::certify_multilayer(A, j, off, 1.0);
    REQUIRE(cert.accepted);
    REQUIRE(cert.source == EquilibriumSource::multilayer);
    for (int m = 0; m < 25; ++m) {
      REQUIRE(circular_distance(cert.theta[25 + m], cert.theta[m] + off) < 1e-12);
    }
  }
  REQUIRE_THROWS_AS(kuramoto::multilayer_state(25, 0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(kuramoto::multilayer_state(25, 25, 0.0), std::invalid_argument);
}

TEST_CASE("spectral surgery plants a twisted equilibrium in a random graph") {
  const AdjacencyMatrix A = kuramoto::build_erdos_renyi(20, 0.4, 5);
  const kuramoto::DesignResult result = kuramoto::design_random_equilibrium(A, 1);

  REQUIRE(result.modified.symmetric);
  REQUIRE(result.modified.entries == result.modified.entries.transpose().eval());
  REQUIRE(result.certificate.accepted);
  REQUIRE(result.certificate.source == EquilibriumSource::designed);

  // planted phasor is an eigenvector of the modified matrix
  Eigen::VectorXcd x(20);
  for (int m = 0; m < 20; ++m) x[m] = std::polar(1.0, result.theta0[m]);
  const double gate = (result.modified.entries.cast<std::complex<double>>() * x -
                       result.lambda_star * x)
                          .norm() /
                      x.norm();
  REQUIRE(gate <= 1e-6);

  // spectrum: slots n-2 and n-3 now share lambda*, everything else retained
  const auto before = kuramoto::eig(A);
  const auto after = kuramoto::eig(result.modified);
  std::vector<double> expected;
  for (int i = 0; i < 17; ++i) expected.push_back(before[i].value.real());
  expected.push_back(result.lambda_star);
  expected.push_back(result.lambda_star);
  expected.push_back(before[19].value.real());
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 20; ++i) {
    REQUIRE_THAT(after[i].value.real(), WithinAbs(expected[i], 1e-8));
  }
  REQUIRE_THAT(result.lambda_star, WithinAbs(before[18].value.real(), 1e-12));
}

TEST_CASE("spectral surgery honours the eigenvalue scale policy") {
  const AdjacencyMatrix A = kuramoto::build_erdos_renyi(16, 0.5, 8);
  const auto keep = kuramoto::design_random_equilibrium(A, 2);
  const auto twice =
      kuramoto::design_random_equilibrium(A, 2, kuramoto::ScalePolicy::multiply(2.0));
  REQUIRE_THAT(twice.lambda_star, WithinAbs(2.0 * keep.lambda_star, 1e-12));
  REQUIRE(twice.certificate.accepted);
}

TEST_CASE("spectral surgery rejects degenerate or invalid requests") {
  const AdjacencyMatrix A = kuramoto::build_erdos_renyi(20, 0.4, 5);
  REQUIRE_THROWS_AS(kuramoto::design_random_equilibrium(A, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(kuramoto::design_random_equilibrium(A, 20), std::invalid_argument);
  // winding n/2 makes every sine vanish: no second direction to plant
  REQUIRE_THROWS_AS(kuramoto::design_random_equilibrium(A, 10), kuramoto::DesignError);
  AdjacencyMatrix directed = kuramoto::build_circulant(8, vec({0, 1, 0, 0, 0, 0, 0, 0}));
  REQUIRE_THROWS_AS(kuramoto::design_random_equilibrium(directed, 1), std::invalid_argument);
}

TEST_CASE("certificates re-verify after serialization-grade wrapping") {
  const AdjacencyMatrix A = kuramoto::build_ring(12, 3);
  const EquilibriumCertificate cert = kuramoto::certify_twisted(A, 2, 1.0);
  REQUIRE(cert.accepted);
  for (Eigen::Index i = 0; i < cert.theta.size(); ++i) {
    REQUIRE(cert.theta[i] >= -pi);
    REQUIRE(cert.theta[i] < pi);
  }
  const EquilibriumCertificate again =
      kuramoto::verify_equilibrium(A, cert.theta, cert.epsilon, cert.phi);
  REQUIRE(again.accepted);
  REQUIRE_THAT(again.residual, WithinAbs(cert.residual, 1e-15));
}
