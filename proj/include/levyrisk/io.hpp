#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "levyrisk/errors.hpp"
#include "levyrisk/pk.hpp"
#include "levyrisk/simulate.hpp"
#include "levyrisk/stats.hpp"

namespace levyrisk {

// Shortest representation that round-trips a double (17 significant digits).
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw invalid_input("cannot open for writing: " + path.string());
  return out;
}

// x,F rows of an empirical CDF at its sample points.
inline void write_ecdf_csv(const std::filesystem::path& path, const EmpiricalCdf& ecdf) {
  auto out = open_out(path);
  out << "x,F\n";
  const auto& v = ecdf.sorted();
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << fmt17(v[i]) << ',' << fmt17(static_cast<double>(i + 1) / n) << '\n';
  }
}

// Same, from raw samples; tolerates an empty set (header-only file).
inline void write_samples_ecdf_csv(const std::filesystem::path& path, std::vector<double> samples) {
  if (samples.empty()) {
    auto out = open_out(path);
    out << "x,F\n";
    return;
  }
  write_ecdf_csv(path, EmpiricalCdf(std::move(samples)));
}

// x,F rows of a lattice CDF at its grid points.
inline void write_grid_csv(const std::filesystem::path& path, const GridDistribution& dist) {
  auto out = open_out(path);
  out << "x,F\n";
  for (std::size_t k = 0; k < dist.points(); ++k) {
    out << fmt17(dist.x(k)) << ',' << fmt17(dist.cdf(k)) << '\n';
  }
}

// Read a two-column x,F CSV back into a lattice CDF on the given grid. Rows
// must cover the lattice points; values between lattice points are absorbed
// by the mass-preserving step evaluation.
inline GridDistribution read_cdf_csv(const std::filesystem::path& path, const GridSpec& grid) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,F", 0) != 0) {
    throw invalid_input("bad CDF file header in " + path.string());
  }
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw invalid_input("bad CDF row in " + path.string());
    try {
      rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw invalid_input("bad CDF row in " + path.string());
    }
  }
  if (rows.empty()) throw invalid_input("empty CDF file " + path.string());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first < rows[i - 1].first || rows[i].second < rows[i - 1].second - 1e-12) {
      throw invalid_input("CDF file rows must be nondecreasing in " + path.string());
    }
  }
  std::vector<double> cdf(grid.n + 1, 0.0);
  std::size_t r = 0;
  double current = 0.0;
  for (std::size_t k = 0; k <= grid.n; ++k) {
    const double xk = static_cast<double>(k) * grid.h;
    while (r < rows.size() && rows[r].first <= xk * (1.0 + 1e-12) + 1e-300) {
      current = rows[r].second;
      ++r;
    }
    cdf[k] = current;
  }
  return GridDistribution(grid.h, std::move(cdf));
}

// Per-path sample table. NaN-valued fields (no epoch on the path) are left
// empty.
inline void write_samples_csv(const std::filesystem::path& path, const EmpiricalSummary& s) {
  auto out = open_out(path);
  out << "tau,S_tau,Shat_tau,N_tau,sigma1,Shat_pre_sigma,J1\n";
  const auto opt = [](double v) { return std::isnan(v) ? std::string() : fmt17(v); };
  for (std::int64_t i = 0; i < s.paths(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out << fmt17(s.tau[idx]) << ',' << fmt17(s.s_tau[idx]) << ',' << fmt17(s.shat_tau[idx]) << ','
        << s.n_tau[idx] << ',' << opt(s.sigma1[idx]) << ',' << fmt17(s.g_pre[idx]) << ','
        << opt(s.j1[idx]) << '\n';
  }
}

inline void write_ntau_hist_csv(const std::filesystem::path& path, const EmpiricalSummary& s) {
  auto out = open_out(path);
  out << "n,count\n";
  const auto hist = s.n_tau_histogram();
  for (std::size_t k = 0; k < hist.size(); ++k) {
    out << k << ',' << hist[k] << '\n';
  }
}

struct LadderDiagRow {
  double beta = 0.0;
  double kappa_hat = 0.0;
  double residual = 0.0;
};

inline void write_ladder_csv(const std::filesystem::path& path,
                             const std::vector<LadderDiagRow>& rows) {
  auto out = open_out(path);
  out << "beta,kappa_hat,residual\n";
  for (const auto& row : rows) {
    out << fmt17(row.beta) << ',' << fmt17(row.kappa_hat) << ',' << fmt17(row.residual) << '\n';
  }
}

}  // namespace levyrisk
