#include "kentropy/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace kentropy {

double Spectrum::trace() const {
  double t = 0.0;
  for (double v : values) t += v;
  return t;
}

void Spectrum::validate() const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw ConfigError("spectrum entry " + std::to_string(i) +
                        " is negative or non-finite");
    }
    if (i > 0 && values[i] > values[i - 1]) {
      throw ConfigError("spectrum is not sorted in descending order (entry " +
                        std::to_string(i) + ")");
    }
  }
}

EigenSystem nystrom_spectrum(const KernelSpec& spec, const Domain& domain,
                             const Grid& grid, int k_max) {
  validate_kernel(spec);
  const long m = grid.size();
  if (k_max < 1 || k_max > m) {
    throw ParameterError("k_max must lie in [1, grid size]");
  }

  const Eigen::MatrixXd K = kernel_matrix(spec, domain, grid);
  const Eigen::VectorXd sw = grid.weights.cwiseSqrt();
  Eigen::MatrixXd A = sw.asDiagonal() * K * sw.asDiagonal();
  A = 0.5 * (A + A.transpose()).eval();  // scrub rounding asymmetry

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) {
    throw NumericError("eigendecomposition of the weighted kernel matrix failed");
  }

  EigenSystem system;
  system.spectrum.source = "nystrom";
  system.spectrum.values.resize(k_max);
  system.eigvecs.resize(m, k_max);
  for (int j = 0; j < k_max; ++j) {
    const long col = m - 1 - j;  // eigh returns ascending order
    system.spectrum.values[j] = std::max(0.0, es.eigenvalues()[col]);
    Eigen::VectorXd phi = es.eigenvectors().col(col).cwiseQuotient(sw);
    // Fix the sign so outputs do not depend on solver internals.
    for (long i = 0; i < m; ++i) {
      if (std::abs(phi[i]) > 1e-12) {
        if (phi[i] < 0.0) phi = -phi;
        break;
      }
    }
    system.eigvecs.col(j) = phi;
  }

  // The discrete trace identity bounds the eigenvalue sum by
  // total_mass * max_x K(x,x); a violation means the solve went bad.
  double max_diag = 0.0;
  for (long i = 0; i < m; ++i) max_diag = std::max(max_diag, K(i, i));
  const double mass = grid.weights.sum();
  double top_sum = 0.0;
  for (double v : system.spectrum.values) top_sum += v;
  if (top_sum > mass * max_diag + 1e-8) {
    throw NumericError("eigenvalue sum exceeds the trace bound");
  }
  return system;
}

double gaussian_eigen_bound(int k, double sigma) {
  if (k < 1) throw ParameterError("gaussian_eigen_bound needs k >= 1");
  if (!(sigma > 0.0)) throw ParameterError("gaussian_eigen_bound needs sigma > 0");
  if (k == 1) return 8.0;  // 0^0 = 1 convention
  const double km1 = static_cast<double>(k - 1);
  const double ln =
      std::log(8.0) - 0.5 * km1 * std::log(2.0 * km1 / M_E) + km1 * std::log(sigma);
  return std::exp(ln);
}

Spectrum gaussian_bound_spectrum(double sigma, int k_max) {
  if (k_max < 1) throw ParameterError("gaussian_bound_spectrum needs k_max >= 1");
  Spectrum s;
  s.source = "gaussian_bound";
  s.values.resize(k_max);
  for (int k = 1; k <= k_max; ++k) s.values[k - 1] = gaussian_eigen_bound(k, sigma);
  std::sort(s.values.begin(), s.values.end(), std::greater<double>());
  return s;
}

namespace {

struct TupleHash {
  std::size_t operator()(const std::vector<int32_t>& key) const {
    std::size_t h = 1469598103934665603ull;
    for (int32_t v : key) {
      h ^= static_cast<std::size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace

Spectrum tensor_spectrum(const std::vector<Spectrum>& factors, double cutoff,
                         std::size_t max_terms) {
  if (factors.empty()) throw ParameterError("tensor_spectrum needs >= 1 factor");
  if (!(cutoff > 0.0)) throw ParameterError("tensor_spectrum needs cutoff > 0");
  for (const Spectrum& f : factors) {
    f.validate();
    if (f.values.empty()) throw ParameterError("tensor factor spectrum is empty");
  }
  const int n = static_cast<int>(factors.size());

  auto product_of = [&](const std::vector<int32_t>& key) {
    double p = 1.0;
    for (int d = 0; d < n; ++d) p *= factors[d].values[key[d]];
    return p;
  };

  using Entry = std::pair<double, std::vector<int32_t>>;
  std::priority_queue<Entry> heap;  // max-heap on the product
  std::unordered_set<std::vector<int32_t>, TupleHash> seen;

  std::vector<int32_t> root(n, 0);
  heap.emplace(product_of(root), root);
  seen.insert(root);

  Spectrum out;
  out.source = "tensor";
  while (!heap.empty()) {
    auto [p, key] = heap.top();
    heap.pop();
    if (p < cutoff) break;  // products only shrink along the frontier
    if (out.values.size() >= max_terms) {
      out.truncation_note = "stopped at " + std::to_string(max_terms) +
                            " terms before reaching the cutoff";
      break;
    }
    out.values.push_back(p);
    for (int d = 0; d < n; ++d) {
      std::vector<int32_t> next = key;
      if (static_cast<std::size_t>(++next[d]) >= factors[d].values.size()) continue;
      if (seen.insert(next).second) heap.emplace(product_of(next), next);
    }
  }
  // The heap pops in descending order already; sort defensively anyway so the
  // invariant survives exact ties in any pop order.
  std::sort(out.values.begin(), out.values.end(), std::greater<double>());
  return out;
}

Spectrum power_law_spectrum(double c, double gamma, std::size_t count) {
  if (!(c > 0.0) || !(gamma > 0.0)) {
    throw ParameterError("power_law_spectrum needs c > 0 and gamma > 0");
  }
  if (count < 1) throw ParameterError("power_law_spectrum needs count >= 1");
  Spectrum s;
  s.source = "power_law";
  s.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    s.values[i] = c / std::pow(static_cast<double>(i + 1), gamma);
  }
  return s;
}

double mercer_tail(const EigenSystem& system, const KernelSpec& spec,
                   const Domain& domain, const Grid& grid, int n_keep) {
  const long m = grid.size();
  if (n_keep < 0 || n_keep > system.eigvecs.cols()) {
    throw ParameterError("mercer_tail: n_keep out of range");
  }
  double worst = 0.0;
  for (long i = 0; i < m; ++i) {
    const Eigen::VectorXd x = grid.nodes.row(i).transpose();
    double rec = 0.0;
    for (int j = 0; j < n_keep; ++j) {
      const double phi = system.eigvecs(i, j);
      rec += system.spectrum.values[j] * phi * phi;
    }
    const double resid = eval_kernel(spec, domain, x, x) - rec;
    worst = std::max(worst, resid);
  }
  return std::sqrt(std::max(0.0, worst));
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "#kernel-entropy v1\n";
  out << "index,lambda\n";
  char buf[64];
  for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, spectrum.values[i]);
    out << buf;
  }
}

Spectrum read_spectrum_csv(std::istream& in) {
  Spectrum s;
  s.source = "csv";
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("index,lambda", 0) != 0) {
        throw ConfigError("spectrum CSV must start with an \"index,lambda\" header");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string idx, val;
    if (!std::getline(row, idx, ',') || !std::getline(row, val)) {
      throw ConfigError("malformed spectrum CSV row: " + line);
    }
    try {
      s.values.push_back(std::stod(val));
    } catch (const std::exception&) {
      throw ConfigError("malformed lambda value in spectrum CSV: " + val);
    }
  }
  if (!header_seen) throw ConfigError("spectrum CSV is missing its header");
  s.validate();
  return s;
}

}  // namespace kentropy
