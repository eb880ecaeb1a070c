#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kuramoto/dynamics.hpp"
#include "kuramoto/equilibria.hpp"
#include "kuramoto/errors.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto/io.hpp"
#include "kuramoto/spectral.hpp"
#include "kuramoto/version.hpp"

namespace kuramoto::cli {

namespace detail {

namespace fs = std::filesystem;

// Relative output paths resolve against $KURAMOTO_EQ_OUTDIR when it is set.
inline fs::path resolve_output(const fs::path& path) {
  if (path.is_absolute()) return path;
  if (const char* base = std::getenv("KURAMOTO_EQ_OUTDIR")) {
    if (*base) return fs::path(base) / path;
  }
  return path;
}

inline fs::path with_suffix(const fs::path& path, const std::string& suffix) {
  fs::path p = path;
  const std::string ext = p.extension().string();
  p.replace_extension();
  p += suffix;
  p += ext;
  return p;
}

inline Eigen::VectorXd parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string token =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw std::invalid_argument(what + ": invalid number '" + token + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

inline std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  const Eigen::VectorXd v = parse_number_list(text, what);
  std::vector<int> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const int k = static_cast<int>(std::llround(v[i]));
    if (static_cast<double>(k) != v[i]) {
      throw std::invalid_argument(what + ": expected integers");
    }
    out[static_cast<std::size_t>(i)] = k;
  }
  return out;
}

inline std::vector<double> sample_times(double T, double stride) {
  if (!(T > 0.0) || !(stride > 0.0)) {
    throw std::invalid_argument("sample times: need T > 0 and stride > 0");
  }
  std::vector<double> times;
  const long long m = static_cast<long long>(std::floor(T / stride + 1e-9));
  for (long long i = 0; i <= m; ++i) times.push_back(static_cast<double>(i) * stride);
  if (times.back() < T - 1e-12 * T) times.push_back(T);
  return times;
}

struct SimulateSettings {
  double epsilon = 1.0;
  double phi = 0.0;
  double dt = 1e-4;
  double T = 1.0;
  double stride = 1e-2;
  double window = 0.1;
  double omega_display = 0.0;
  std::string method = "euler";
  bool order_param = false;
  bool long_form = false;
};

inline IntegrationMethod parse_method(const std::string& name) {
  if (name == "euler") return IntegrationMethod::euler;
  if (name == "rk4") return IntegrationMethod::rk4;
  throw std::invalid_argument("unknown integration method '" + name + "'");
}

inline void write_trajectory(const fs::path& path, const Trajectory& traj,
                             const SimulateSettings& s) {
  if (s.long_form) {
    io::write_long_form_csv(path, traj, s.omega_display);
  } else {
    io::write_trajectory_csv(path, traj, s.order_param, s.omega_display);
  }
}

}  // namespace detail

// Entry point shared by the binary and the in-process tests. `args` excludes
// the program name. Exit codes: 0 success, 1 validation/runtime failure,
// 2 usage or input-format error.
inline int run(const std::vector<std::string>& args) {
  namespace fs = std::filesystem;
  using detail::resolve_output;

  CLI::App app{"Construct, certify and simulate equilibria of coupled oscillator networks"};
  app.set_version_flag("--version", kVersionString);
  app.require_subcommand(1);
  int rc = 0;

  // ---------------------------------------------------------------- build
  auto* build = app.add_subcommand("build", "Generate a coupling matrix CSV");
  std::string b_family;
  std::string b_first_row, b_factors, b_coeffs, b_left, b_right;
  int b_n = 0, b_k = 0;
  double b_p = 0.0, b_alpha = 0.0, b_beta = 0.0;
  std::uint64_t b_seed = 0;
  std::string b_out;
  build->add_option("--kind,--family", b_family, "ring|complete|circulant|join|gcirc|er")
      ->required();
  build->add_option("-n,--nodes", b_n, "node count");
  build->add_option("-k,--neighbors", b_k, "neighbour range (ring)");
  build->add_option("--first-row", b_first_row, "comma-separated first row (circulant)");
  build->add_option("--factors", b_factors, "abelian group factors, e.g. 2,2 (g-circulant)");
  build->add_option("--coeffs", b_coeffs, "per-element coefficients (g-circulant)");
  build->add_option("--left", b_left, "left layer matrix CSV (join)");
  build->add_option("--right", b_right, "right layer matrix CSV (join)");
  build->add_option("--alpha", b_alpha, "forward cross-layer weight (join)");
  build->add_option("--beta", b_beta, "backward cross-layer weight (join)");
  build->add_option("-p,--probability", b_p, "edge probability (erdos-renyi)");
  build->add_option("--seed", b_seed, "RNG seed (erdos-renyi)");
  build->add_option("-o,--output", b_out, "output matrix CSV")->required();
  build->callback([&] {
    const fs::path out = resolve_output(b_out);
    io::ManifestBuilder manifest("build", args);
    io::json prov;
    prov["family"] = b_family;
    AdjacencyMatrix A;
    if (b_family == "circulant") {
      const Eigen::VectorXd row = detail::parse_number_list(b_first_row, "--first-row");
      A = build_circulant(static_cast<int>(row.size()), row);
      prov["first_row"] = b_first_row;
    } else if (b_family == "ring") {
      A = build_ring(b_n, b_k);
      prov["n"] = b_n;
      prov["k"] = b_k;
    } else if (b_family == "complete") {
      A = build_complete(b_n);
      prov["n"] = b_n;
    } else if (b_family == "join") {
      if (b_left.empty() || b_right.empty()) {
        throw std::invalid_argument("build join: --left and --right are required");
      }
      const AdjacencyMatrix C = io::read_matrix_csv(b_left);
      const AdjacencyMatrix D = io::read_matrix_csv(b_right);
      manifest.input(b_left);
      manifest.input(b_right);
      A = build_join(C, D, b_alpha, b_beta);
      prov["left"] = b_left;
      prov["right"] = b_right;
      prov["alpha"] = b_alpha;
      prov["beta"] = b_beta;
    } else if (b_family == "gcirc" || b_family == "g-circulant") {
      const GroupSpec group(detail::parse_int_list(b_factors, "--factors"));
      const Eigen::VectorXd cv = detail::parse_number_list(b_coeffs, "--coeffs");
      A = build_g_circulant(group, std::vector<double>(cv.data(), cv.data() + cv.size()));
      prov["family"] = "g-circulant";
      prov["factors"] = b_factors;
      prov["coeffs"] = b_coeffs;
    } else if (b_family == "er" || b_family == "erdos-renyi") {
      A = build_erdos_renyi(b_n, b_p, b_seed);
      prov["family"] = "erdos-renyi";
      prov["n"] = b_n;
      prov["p"] = b_p;
      prov["seed"] = b_seed;
    } else {
      throw std::invalid_argument("unknown family '" + b_family + "'");
    }
    io::write_matrix_csv(out, A, prov);
    manifest.doc["parameters"] = prov;
    manifest.output(out);
    manifest.output(io::sidecar_path(out));
    manifest.write(out.string() + ".manifest.json");
    std::cout << "wrote " << out.string() << " (" << A.n() << "x" << A.n() << ")\n";
  });

  // -------------------------------------------------------------- spectrum
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues/eigenvectors of a matrix CSV");
  std::string s_in, s_out;
  bool s_vectors = false;
  spectrum->add_option("matrix,-i,--input", s_in, "matrix CSV")->required();
  spectrum->add_option("-o,--output", s_out, "output JSON")->required();
  spectrum->add_flag("--vectors", s_vectors, "include eigenvector components");
  spectrum->callback([&] {
    const AdjacencyMatrix A = io::read_matrix_csv(s_in);
    const std::vector<EigenPair> pairs =
        A.circulant ? circulant_spectrum(A.first_column()) : eig(A);
    const fs::path out = resolve_output(s_out);
    io::ManifestBuilder manifest("spectrum", args);
    manifest.input(s_in);
    manifest.parameter("vectors", s_vectors);
    io::atomic_write(out, io::spectrum_to_json(A, pairs, s_vectors).dump(2) + "\n");
    manifest.output(out);
    manifest.write(out.string() + ".manifest.json");
    std::cout << "wrote " << out.string() << " (" << pairs.size() << " eigenvalues, "
              << (A.circulant ? "circulant" : "dense") << ")\n";
  });

  // ------------------------------------------------------------ equilibria
  auto* equilibria = app.add_subcommand(
      "equilibria", "Harvest equilibria from constant-modulus eigenvectors or characters");
  std::string e_in, e_out, e_factors, e_coeffs, e_lag = "auto";
  double e_eps = 1.0, e_tol_modulus = kTolModulus;
  equilibria->add_option("matrix,-i,--input", e_in, "matrix CSV");
  equilibria->add_option("--factors", e_factors, "abelian group factors (character route)");
  equilibria->add_option("--coeffs", e_coeffs, "group coefficients (character route)");
  equilibria->add_option("--epsilon", e_eps, "coupling strength");
  equilibria->add_option("--phase-lag", e_lag,
                         "auto derives the lag per state; a number re-checks all states "
                         "at that fixed uniform lag");
  equilibria->add_option("--tol-modulus", e_tol_modulus, "constant-modulus tolerance");
  equilibria->add_option("-o,--output", e_out, "output certificates JSON")->required();
  equilibria->callback([&] {
    std::vector<EquilibriumCertificate> certs;
    io::ManifestBuilder manifest("equilibria", args);
    manifest.parameter("epsilon", e_eps);
    manifest.parameter("phase_lag", e_lag);
    AdjacencyMatrix A;
    if (!e_factors.empty()) {
      const GroupSpec group(detail::parse_int_list(e_factors, "--factors"));
      const Eigen::VectorXd cv = detail::parse_number_list(e_coeffs, "--coeffs");
      const std::vector<double> coeffs(cv.data(), cv.data() + cv.size());
      certs = g_circulant_equilibria(group, coeffs, e_eps);
      A = build_g_circulant(group, coeffs);
      manifest.parameter("factors", e_factors);
      manifest.parameter("coeffs", e_coeffs);
    } else if (!e_in.empty()) {
      A = io::read_matrix_csv(e_in);
      manifest.input(e_in);
      manifest.parameter("tol_modulus", e_tol_modulus);
      certs = equilibria_from_eigenvectors(A, e_eps, e_tol_modulus);
    } else {
      throw std::invalid_argument("equilibria: need a matrix or --factors/--coeffs");
    }
    if (e_lag != "auto") {
      const double lag = detail::parse_number_list(e_lag, "--phase-lag")[0];
      for (EquilibriumCertificate& cert : certs) {
        const EquilibriumSource source = cert.source;
        cert = verify_equilibrium(A, cert.theta, e_eps, lag);
        cert.source = source;
      }
    }
    const fs::path out = resolve_output(e_out);
    io::write_certificates_json(out, certs);
    manifest.output(out);
    manifest.write(out.string() + ".manifest.json");
    const auto accepted = std::count_if(certs.begin(), certs.end(),
                                        [](const EquilibriumCertificate& c) { return c.accepted; });
    std::cout << "wrote " << out.string() << " (" << accepted << "/" << certs.size()
              << " certificates accepted)\n";
  });

  // ---------------------------------------------------------------- verify
  auto* verify = app.add_subcommand("verify", "Check a phase configuration for stationarity");
  std::string v_in, v_theta, v_phi_file, v_out;
  double v_eps = 1.0, v_phi = 0.0;
  verify->add_option("matrix,-i,--input", v_in, "matrix CSV")->required();
  verify->add_option("theta,--theta", v_theta, "phase vector CSV")->required();
  verify->add_option("--epsilon", v_eps, "coupling strength");
  verify->add_option("--phi", v_phi, "uniform phase lag");
  verify->add_option("--phi-file", v_phi_file, "per-node phase lag CSV");
  verify->add_option("-o,--output", v_out, "certificate JSON (optional)");
  verify->callback([&] {
    const AdjacencyMatrix A = io::read_matrix_csv(v_in);
    const Eigen::VectorXd theta = io::read_vector_csv(v_theta);
    Eigen::VectorXd phi = v_phi_file.empty()
                              ? Eigen::VectorXd(Eigen::VectorXd::Constant(A.n(), v_phi))
                              : Eigen::VectorXd(io::read_vector_csv(v_phi_file));
    const EquilibriumCertificate cert = verify_equilibrium(A, theta, v_eps, phi);
    std::cout << "residual " << io::format_double(cert.residual) << " vs tolerance "
              << io::format_double(cert.tolerance) << ": "
              << (cert.accepted ? "ACCEPTED" : "REJECTED") << "\n";
    if (cert.lambda) {
      std::cout << "eigenvalue " << io::format_double(cert.lambda->real()) << " + "
                << io::format_double(cert.lambda->imag()) << "i"
                << (cert.zero_eigenvalue ? " (zero)" : "") << "\n";
    }
    if (!v_out.empty()) {
      const fs::path out = resolve_output(v_out);
      io::ManifestBuilder manifest("verify", args);
      manifest.input(v_in);
      manifest.input(v_theta);
      if (!v_phi_file.empty()) manifest.input(v_phi_file);
      manifest.parameter("epsilon", v_eps);
      io::write_certificates_json(out, {cert});
      manifest.output(out);
      manifest.write(out.string() + ".manifest.json");
    }
    if (!cert.accepted) rc = 1;
  });

  // -------------------------------------------------------------- simulate
  auto* simulate = app.add_subcommand("simulate", "Integrate or propagate a configuration");
  std::string m_in, m_theta, m_model = "original", m_out;
  int m_twisted = -1;
  detail::SimulateSettings m_s;
  simulate->add_option("matrix,-i,--input", m_in, "matrix CSV")->required();
  simulate->add_option("--theta0,--theta", m_theta,
                       "initial phases: CSV path or builder spec 'twisted:J'");
  simulate->add_option("--twisted", m_twisted, "start from the j-twisted configuration");
  simulate->add_option("--model", m_model, "original|analytical|both");
  simulate->add_option("--epsilon", m_s.epsilon, "coupling strength");
  simulate->add_option("--phi", m_s.phi, "uniform phase lag");
  simulate->add_option("--dt", m_s.dt, "integrator step");
  simulate->add_option("-T,--horizon", m_s.T, "final time");
  simulate->add_option("--stride", m_s.stride, "sampling stride");
  simulate->add_option("--window", m_s.window, "propagation window (analytical)");
  simulate->add_option("--method", m_s.method, "euler|rk4");
  simulate->add_option("--omega", m_s.omega_display, "display frequency added back on output");
  simulate->add_flag("--emit-order-parameter,--order-param", m_s.order_param, "append R column");
  simulate->add_flag("--long-form", m_s.long_form, "emit t,node,theta rows");
  simulate->add_option("-o,--output", m_out, "output trajectory CSV")->required();
  simulate->callback([&] {
    const AdjacencyMatrix A = io::read_matrix_csv(m_in);
    bool theta_from_file = false;
    if (m_theta.rfind("twisted:", 0) == 0) {
      m_twisted = static_cast<int>(
          std::llround(detail::parse_number_list(m_theta.substr(8), "--theta0")[0]));
      m_theta.clear();
    }
    PhaseVector theta0;
    if (m_twisted >= 0) {
      theta0 = twisted_state(A.n(), m_twisted);
    } else if (!m_theta.empty()) {
      theta0 = io::read_vector_csv(m_theta);
      theta_from_file = true;
    } else {
      throw std::invalid_argument("simulate: need --theta0 or --twisted");
    }
    if (m_model != "original" && m_model != "analytical" && m_model != "both") {
      throw std::invalid_argument("simulate: unknown model '" + m_model + "'");
    }
    io::ManifestBuilder manifest("simulate", args);
    manifest.input(m_in);
    if (theta_from_file) manifest.input(m_theta);
    manifest.parameter("model", m_model);
    manifest.parameter("epsilon", m_s.epsilon);
    manifest.parameter("phi", m_s.phi);
    manifest.parameter("dt", m_s.dt);
    manifest.parameter("T", m_s.T);
    manifest.parameter("stride", m_s.stride);
    manifest.parameter("window", m_s.window);
    manifest.parameter("method", m_s.method);
    if (m_twisted >= 0) manifest.parameter("twisted", m_twisted);

    const fs::path out = resolve_output(m_out);
    const bool both = (m_model == "both");
    if (m_model == "original" || both) {
      const Trajectory traj =
          integrate_km(A, theta0, m_s.epsilon, m_s.phi, m_s.dt, m_s.T,
                       detail::parse_method(m_s.method), m_s.stride);
      const fs::path p = both ? detail::with_suffix(out, ".original") : out;
      detail::write_trajectory(p, traj, m_s);
      manifest.output(p);
      std::cout << "wrote " << p.string() << "\n";
    }
    if (m_model == "analytical" || both) {
      const Trajectory traj = propagate_analytical(
          A, theta0, m_s.epsilon, m_s.phi, detail::sample_times(m_s.T, m_s.stride), m_s.window);
      const fs::path p = both ? detail::with_suffix(out, ".analytical") : out;
      detail::write_trajectory(p, traj, m_s);
      manifest.output(p);
      std::cout << "wrote " << p.string() << "\n";
    }
    manifest.write(out.string() + ".manifest.json");
  });

  // ---------------------------------------------------------------- design
  auto* design = app.add_subcommand(
      "design", "Plant a twisted equilibrium into a symmetric matrix by spectral surgery");
  std::string d_in, d_out;
  int d_n = 0, d_j = 1;
  double d_p = 0.0;
  std::uint64_t d_seed = 0;
  std::optional<double> d_scale;
  design->add_option("matrix,-i,--input", d_in,
                     "symmetric matrix CSV (alternative to a fresh random draw)");
  design->add_option("-n,--nodes,--er-n", d_n, "node count for a fresh Erdos-Renyi draw");
  design->add_option("-p,--probability,--er-p", d_p, "edge probability");
  design->add_option("--seed", d_seed, "RNG seed");
  design->add_option("-j,--winding", d_j, "twist winding number");
  design->add_option("--scale", d_scale, "multiply the replaced eigenvalue by this factor");
  design->add_option("-o,--outdir", d_out, "output directory")->required();
  design->callback([&] {
    io::ManifestBuilder manifest("design", args);
    AdjacencyMatrix A;
    if (!d_in.empty()) {
      A = io::read_matrix_csv(d_in);
      manifest.input(d_in);
    } else {
      if (d_n <= 0) {
        throw std::invalid_argument("design: need -i or -n/-p/--seed");
      }
      A = build_erdos_renyi(d_n, d_p, d_seed);
      manifest.parameter("n", d_n);
      manifest.parameter("p", d_p);
      manifest.parameter("seed", d_seed);
    }
    manifest.parameter("j", d_j);
    manifest.parameter("scale", d_scale ? io::json(*d_scale) : io::json("keep"));
    const ScalePolicy policy = d_scale ? ScalePolicy::multiply(*d_scale) : ScalePolicy::keep();
    const DesignResult result = design_random_equilibrium(A, d_j, policy);

    const fs::path dir = resolve_output(d_out);
    std::filesystem::create_directories(dir);
    io::json prov;
    prov["family"] = "erdos-renyi";
    prov["n"] = d_n;
    prov["p"] = d_p;
    prov["seed"] = d_seed;
    io::write_matrix_csv(dir / "A.csv", A, d_in.empty() ? prov : io::json::object());
    io::write_matrix_csv(dir / "A_prime.csv", result.modified);
    io::write_vector_csv(dir / "theta0.csv", result.theta0);
    io::write_certificates_json(dir / "certificate.json", {result.certificate});
    for (const char* name : {"A.csv", "A_prime.csv", "theta0.csv", "certificate.json"}) {
      manifest.output(dir / name);
    }
    manifest.parameter("lambda_star", result.lambda_star);
    manifest.write(dir / "manifest.json");
    std::cout << "wrote " << (dir / "A_prime.csv").string() << " (lambda* = "
              << io::format_double(result.lambda_star) << ", residual "
              << io::format_double(result.certificate.residual) << ")\n";
  });

  // ------------------------------------------------------------- reproduce
  auto* reproduce = app.add_subcommand("reproduce", "Re-create a canned result set");
  std::string r_target, r_out;
  std::uint64_t r_seed = 1;
  reproduce->add_option("target,--target", r_target, "fig1|fig2|fig3|fig4|example1")->required();
  reproduce->add_option("--seed", r_seed, "seed (fig4 only)");
  reproduce->add_option("-o,--outdir", r_out, "output directory (default reproduce-<target>)");
  reproduce->callback([&] {
    const fs::path dir =
        resolve_output(r_out.empty() ? fs::path("reproduce-" + r_target) : fs::path(r_out));
    std::filesystem::create_directories(dir);
    io::ManifestBuilder manifest("reproduce", args);
    manifest.parameter("target", r_target);
    auto emit = [&](const fs::path& p) { manifest.output(p); };

    const double omega = 20.0 * std::numbers::pi;
    detail::SimulateSettings s;
    s.omega_display = omega;
    s.long_form = true;

    if (r_target == "fig1") {
      const AdjacencyMatrix A = build_ring(50, 10);
      io::json prov;
      prov["family"] = "ring";
      prov["n"] = 50;
      prov["k"] = 10;
      io::write_matrix_csv(dir / "matrix.csv", A, prov);
      emit(dir / "matrix.csv");
      std::vector<EquilibriumCertificate> certs;
      for (int j : {1, 3}) {
        certs.push_back(certify_twisted(A, j, 1.0));
        const PhaseVector theta0 = twisted_state(50, j);
        const Trajectory orig = integrate_km(A, theta0, 1.0, 0.0, 1e-4, 1.0);
        const Trajectory ana =
            propagate_analytical(A, theta0, 1.0, 0.0, detail::sample_times(1.0, 1e-2));
        const fs::path po = dir / ("fig1_j" + std::to_string(j) + "_original.csv");
        const fs::path pa = dir / ("fig1_j" + std::to_string(j) + "_analytical.csv");
        detail::write_trajectory(po, orig, s);
        detail::write_trajectory(pa, ana, s);
        emit(po);
        emit(pa);
      }
      io::write_certificates_json(dir / "certificates.json", certs);
      emit(dir / "certificates.json");
    } else if (r_target == "fig2") {
      const AdjacencyMatrix A = build_ring(50, 10);
      io::json prov;
      prov["family"] = "ring";
      prov["n"] = 50;
      prov["k"] = 10;
      io::write_matrix_csv(dir / "matrix.csv", A, prov);
      emit(dir / "matrix.csv");
      const PhaseVector theta0 = twisted_state(50, 1);
      const std::vector<std::pair<std::string, double>> lags = {
          {"phi1", 1.0}, {"phipi2", std::numbers::pi / 2.0}};
      for (const auto& [name, phi] : lags) {
        const Trajectory orig = integrate_km(A, theta0, 1.0, phi, 1e-4, 1.0);
        const Trajectory ana =
            propagate_analytical(A, theta0, 1.0, phi, detail::sample_times(1.0, 1e-2));
        const fs::path po = dir / ("fig2_" + name + "_original.csv");
        const fs::path pa = dir / ("fig2_" + name + "_analytical.csv");
        detail::write_trajectory(po, orig, s);
        detail::write_trajectory(pa, ana, s);
        emit(po);
        emit(pa);
      }
    } else if (r_target == "fig3") {
      const AdjacencyMatrix C = build_ring(25, 5);
      const AdjacencyMatrix A = build_join(C, C, 0.25, 0.75);
      io::json prov;
      prov["family"] = "join";
      prov["layer"] = "ring(25,5)";
      prov["alpha"] = 0.25;
      prov["beta"] = 0.75;
      io::write_matrix_csv(dir / "matrix.csv", A, prov);
      emit(dir / "matrix.csv");
      std::vector<EquilibriumCertificate> certs;
      for (double off : {0.0, std::numbers::pi / 3.0, std::numbers::pi}) {
        certs.push_back(certify_multilayer(A, 1, off, 1.0));
      }
      io::write_certificates_json(dir / "certificates.json", certs);
      emit(dir / "certificates.json");
      const PhaseVector theta0 = multilayer_state(25, 1, std::numbers::pi / 3.0);
      const Trajectory orig = integrate_km(A, theta0, 1.0, 0.0, 1e-4, 1.0);
      const Trajectory ana =
          propagate_analytical(A, theta0, 1.0, 0.0, detail::sample_times(1.0, 1e-2));
      detail::write_trajectory(dir / "fig3_original.csv", orig, s);
      detail::write_trajectory(dir / "fig3_analytical.csv", ana, s);
      emit(dir / "fig3_original.csv");
      emit(dir / "fig3_analytical.csv");
    } else if (r_target == "fig4") {
      manifest.parameter("seed", r_seed);
      const AdjacencyMatrix A = build_erdos_renyi(100, 0.25, r_seed);
      const DesignResult result = design_random_equilibrium(A, 1);
      io::json prov;
      prov["family"] = "erdos-renyi";
      prov["n"] = 100;
      prov["p"] = 0.25;
      prov["seed"] = r_seed;
      io::write_matrix_csv(dir / "A.csv", A, prov);
      io::write_matrix_csv(dir / "A_prime.csv", result.modified);
      io::write_vector_csv(dir / "theta0.csv", result.theta0);
      io::write_certificates_json(dir / "certificate.json", {result.certificate});
      emit(dir / "A.csv");
      emit(dir / "A_prime.csv");
      emit(dir / "theta0.csv");
      emit(dir / "certificate.json");
      const Trajectory on_A = integrate_km(A, result.theta0, 1.0, 0.0, 1e-4, 5.0);
      const Trajectory on_Ap = integrate_km(result.modified, result.theta0, 1.0, 0.0, 1e-4, 5.0);
      std::ostringstream out;
      out << "t,R_original,R_designed\n";
      for (std::size_t k = 0; k < on_A.times.size(); ++k) {
        out << io::format_double(on_A.times[k]) << ','
            << io::format_double(order_parameter(on_A.phases[k])) << ','
            << io::format_double(order_parameter(on_Ap.phases[k])) << '\n';
      }
      io::atomic_write(dir / "fig4_order_parameter.csv", out.str());
      emit(dir / "fig4_order_parameter.csv");
    } else if (r_target == "example1") {
      Eigen::VectorXd row(4);
      row << 0, 0, 1, 1;
      const AdjacencyMatrix A = build_circulant(4, row);
      io::json prov;
      prov["family"] = "circulant";
      prov["first_row"] = "0,0,1,1";
      io::write_matrix_csv(dir / "matrix.csv", A, prov);
      emit(dir / "matrix.csv");
      const std::vector<EigenPair> pairs = circulant_spectrum(A.first_column());
      io::atomic_write(dir / "spectrum.json", io::spectrum_to_json(A, pairs, true).dump(2) + "\n");
      emit(dir / "spectrum.json");
      io::write_certificates_json(dir / "certificates.json", equilibria_from_eigenvectors(A));
      emit(dir / "certificates.json");
      const PhaseVector theta0 = twisted_state(4, 1);
      const double phi = std::numbers::pi / 4.0;
      const Trajectory orig = integrate_km(A, theta0, 1.0, phi, 1e-4, 1.0);
      const Trajectory ana =
          propagate_analytical(A, theta0, 1.0, phi, detail::sample_times(1.0, 1e-2));
      detail::SimulateSettings plain;
      plain.long_form = false;
      plain.order_param = false;
      detail::write_trajectory(dir / "example1_original.csv", orig, plain);
      detail::write_trajectory(dir / "example1_analytical.csv", ana, plain);
      emit(dir / "example1_original.csv");
      emit(dir / "example1_analytical.csv");
    } else {
      throw std::invalid_argument("reproduce: unknown target '" + r_target + "'");
    }
    manifest.write(dir / "manifest.json");
    std::cout << "wrote " << dir.string() << "/\n";
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}

}  // namespace kuramoto::cli
