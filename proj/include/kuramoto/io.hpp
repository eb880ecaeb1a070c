#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kuramoto/dynamics.hpp"
#include "kuramoto/equilibria.hpp"
#include "kuramoto/errors.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto/spectral.hpp"
#include "kuramoto/version.hpp"

namespace kuramoto::io {

using json = nlohmann::ordered_json;

// Shortest decimal representation that round-trips a double.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  if (back == x) {
    for (int prec = 1; prec < 17; ++prec) {
      char probe[40];
      std::snprintf(probe, sizeof(probe), "%.*g", prec, x);
      std::sscanf(probe, "%lf", &back);
      if (back == x) return probe;
    }
  }
  return buf;
}

// Write-then-rename so readers never observe a partially written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("atomic_write: cannot open " + tmp.string());
    }
    out << content;
    if (!out) {
      throw Error("atomic_write: short write to " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
inline std::string fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("fnv1a64_file: cannot open " + path.string());
  }
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

struct Cell {
  double value;
  int line;
  int column;
};

inline std::vector<std::vector<Cell>> parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::vector<std::vector<Cell>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    std::vector<Cell> row;
    std::size_t pos = 0;
    int column = 0;
    while (true) {
      ++column;
      const std::size_t comma = line.find(',', pos);
      const std::string token =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &used);
      } catch (const std::exception&) {
        throw ParseError(path.string(), lineno, column, "invalid number '" + token + "'");
      }
      while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
      if (used != token.size()) {
        throw ParseError(path.string(), lineno, column, "trailing garbage in '" + token + "'");
      }
      if (!std::isfinite(value)) {
        throw ParseError(path.string(), lineno, column, "non-finite value '" + token + "'");
      }
      row.push_back({value, lineno, column});
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

// Sidecar flag file accompanying a matrix CSV ("<matrix stem>.json"): records
// the structural flags plus the generator call, so re-loading preserves exact
// dispatch (e.g. circulant spectra) without re-detecting structure.
inline std::filesystem::path sidecar_path(const std::filesystem::path& matrix_path) {
  std::filesystem::path p = matrix_path;
  p.replace_extension(".json");
  return p;
}

inline void write_matrix_csv(const std::filesystem::path& path, const AdjacencyMatrix& A,
                             const json& provenance = json::object()) {
  std::ostringstream out;
  for (int i = 0; i < A.n(); ++i) {
    for (int j = 0; j < A.n(); ++j) {
      if (j) out << ',';
      out << format_double(A.entries(i, j));
    }
    out << '\n';
  }
  atomic_write(path, out.str());

  json side;
  side["symmetric"] = A.symmetric;
  side["circulant"] = A.circulant;
  side["zero_diagonal"] = A.zero_diagonal;
  if (!provenance.empty()) side["generator"] = provenance;
  atomic_write(sidecar_path(path), side.dump(2) + "\n");
}

// Load a matrix CSV. Flags come from the sidecar when present, otherwise they
// are detected from the entries (exact comparisons; detection marks circulant
// only when every diagonal stripe is constant).
inline AdjacencyMatrix read_matrix_csv(const std::filesystem::path& path) {
  const auto rows = detail::parse_csv(path);
  const int n = static_cast<int>(rows.size());
  if (n == 0) {
    throw ParseError(path.string(), 1, 1, "empty matrix");
  }
  AdjacencyMatrix A;
  A.entries.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) {
      throw ParseError(path.string(), rows[i].front().line, 1,
                       "expected " + std::to_string(n) + " columns, got " +
                           std::to_string(rows[i].size()));
    }
    for (int j = 0; j < n; ++j) A.entries(i, j) = rows[i][j].value;
  }

  const std::filesystem::path side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream in(side);
    json flags;
    try {
      in >> flags;
    } catch (const std::exception& e) {
      throw ParseError(side.string(), 1, 1, std::string("invalid sidecar JSON: ") + e.what());
    }
    A.symmetric = flags.value("symmetric", false);
    A.circulant = flags.value("circulant", false);
    A.zero_diagonal = flags.value("zero_diagonal", false);
  } else {
    A.symmetric = A.entries.isApprox(A.entries.transpose(), 0.0);
    bool circ = true;
    for (int i = 1; i < n && circ; ++i) {
      for (int j = 0; j < n && circ; ++j) {
        circ = (A.entries(i, j) == A.entries(0, ((j - i) % n + n) % n));
      }
    }
    A.circulant = circ;
    A.zero_diagonal = (A.entries.diagonal().array() == 0.0).all();
  }
  return A;
}

// Vector CSV: one value per line, or a single comma-separated row.
inline Eigen::VectorXd read_vector_csv(const std::filesystem::path& path) {
  const auto rows = detail::parse_csv(path);
  if (rows.empty()) {
    throw ParseError(path.string(), 1, 1, "empty vector");
  }
  std::vector<double> values;
  if (rows.size() == 1) {
    for (const auto& cell : rows[0]) values.push_back(cell.value);
  } else {
    for (const auto& row : rows) {
      if (row.size() != 1) {
        throw ParseError(path.string(), row.front().line, 2,
                         "vector file must be one column or one row");
      }
      values.push_back(row[0].value);
    }
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

inline void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
  atomic_write(path, out.str());
}

// Wide trajectory CSV: t, theta_1..theta_n [, mag_1..mag_n] [, R]. A nonzero
// display frequency re-adds the co-rotating term: emitted phases are
// wrap(theta_i + omega * t). R is always computed from the co-rotating phases
// (adding a common rotation does not change it).
inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                                 bool with_order_parameter = false, double omega_display = 0.0) {
  const int n = traj.phases.empty() ? 0 : static_cast<int>(traj.phases.front().size());
  std::ostringstream out;
  out << 't';
  for (int i = 1; i <= n; ++i) out << ",theta_" << i;
  if (!traj.magnitudes.empty()) {
    for (int i = 1; i <= n; ++i) out << ",mag_" << i;
  }
  if (with_order_parameter) out << ",R";
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_double(traj.times[k]);
    for (int i = 0; i < n; ++i) {
      const double shown = omega_display == 0.0
                               ? traj.phases[k][i]
                               : wrap_phase(traj.phases[k][i] + omega_display * traj.times[k]);
      out << ',' << format_double(shown);
    }
    if (!traj.magnitudes.empty()) {
      for (int i = 0; i < n; ++i) out << ',' << format_double(traj.magnitudes[k][i]);
    }
    if (with_order_parameter) out << ',' << format_double(order_parameter(traj.phases[k]));
    out << '\n';
  }
  atomic_write(path, out.str());
}

// Long-form trajectory CSV for spatiotemporal plots: t, node, theta [, mag].
inline void write_long_form_csv(const std::filesystem::path& path, const Trajectory& traj,
                                double omega_display = 0.0) {
  const int n = traj.phases.empty() ? 0 : static_cast<int>(traj.phases.front().size());
  std::ostringstream out;
  out << "t,node,theta";
  if (!traj.magnitudes.empty()) out << ",mag";
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      const double shown = omega_display == 0.0
                               ? traj.phases[k][i]
                               : wrap_phase(traj.phases[k][i] + omega_display * traj.times[k]);
      out << format_double(traj.times[k]) << ',' << (i + 1) << ',' << format_double(shown);
      if (!traj.magnitudes.empty()) out << ',' << format_double(traj.magnitudes[k][i]);
      out << '\n';
    }
  }
  atomic_write(path, out.str());
}

inline json complex_to_json(std::complex<double> z) {
  json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

inline json certificate_to_json(const EquilibriumCertificate& cert) {
  json j;
  j["source"] = to_string(cert.source);
  j["theta"] = std::vector<double>(cert.theta.data(), cert.theta.data() + cert.theta.size());
  j["residual"] = cert.residual;
  j["tolerance"] = cert.tolerance;
  j["accepted"] = cert.accepted;
  j["epsilon"] = cert.epsilon;
  const bool uniform =
      cert.phi.size() == 0 || (cert.phi.array() == cert.phi[0]).all();
  if (uniform && cert.phi.size() > 0) {
    j["phi"] = cert.phi[0];
  } else {
    j["phi"] = std::vector<double>(cert.phi.data(), cert.phi.data() + cert.phi.size());
  }
  j["phi_alternate"] = cert.phi_alternate ? json(*cert.phi_alternate) : json(nullptr);
  j["lambda"] = cert.lambda ? complex_to_json(*cert.lambda) : json(nullptr);
  j["zero_eigenvalue"] = cert.zero_eigenvalue;
  return j;
}

inline void write_certificates_json(const std::filesystem::path& path,
                                    const std::vector<EquilibriumCertificate>& certs) {
  json j;
  j["count"] = certs.size();
  j["certificates"] = json::array();
  for (const auto& c : certs) j["certificates"].push_back(certificate_to_json(c));
  atomic_write(path, j.dump(2) + "\n");
}

inline json spectrum_to_json(const AdjacencyMatrix& A, const std::vector<EigenPair>& pairs,
                             bool with_vectors) {
  json j;
  j["n"] = A.n();
  j["method"] = A.circulant ? "circulant" : "dense";
  j["eigenvalues"] = json::array();
  for (const auto& p : pairs) {
    json e;
    e["value"] = complex_to_json(p.value);
    e["is_real"] = p.is_real_value;
    e["residual"] = (A.entries.cast<std::complex<double>>() * p.vector - p.value * p.vector).norm();
    if (with_vectors) {
      json re = json::array();
      json im = json::array();
      for (Eigen::Index i = 0; i < p.vector.size(); ++i) {
        re.push_back(p.vector[i].real());
        im.push_back(p.vector[i].imag());
      }
      e["vector_re"] = re;
      e["vector_im"] = im;
    }
    j["eigenvalues"].push_back(e);
  }
  return j;
}

// Run manifest written next to each output set: tool version, the exact
// subcommand and arguments, resolved parameters, and a digest of every input
// and output file, so a run can be re-executed and checked byte for byte.
struct ManifestBuilder {
  json doc;

  ManifestBuilder(const std::string& subcommand, const std::vector<std::string>& args) {
    doc["tool"] = "kuramoto-eq";
    doc["version"] = kVersionString;
    doc["subcommand"] = subcommand;
    doc["arguments"] = args;
    doc["parameters"] = json::object();
    doc["inputs"] = json::array();
    doc["outputs"] = json::array();
  }

  void parameter(const std::string& key, const json& value) { doc["parameters"][key] = value; }

  void input(const std::filesystem::path& path) {
    json e;
    e["path"] = path.string();
    e["fnv1a64"] = fnv1a64_file(path);
    doc["inputs"].push_back(e);
  }

  void output(const std::filesystem::path& path) {
    json e;
    e["path"] = path.string();
    e["fnv1a64"] = fnv1a64_file(path);
    doc["outputs"].push_back(e);
  }

  void write(const std::filesystem::path& path) const { atomic_write(path, doc.dump(2) + "\n"); }
};

}  // namespace kuramoto::io
