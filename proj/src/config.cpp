#include "kentropy/config.hpp"

#include <fstream>
#include <sstream>

namespace kentropy {

namespace {

std::string type_name(const Json& j) { return j.type_name(); }

}  // namespace

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json config;
  try {
    in >> config;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!config.is_object()) {
    throw ConfigError("config file " + path + " must hold a JSON object");
  }
  return config;
}

const Json& require_field(const Json& block, const std::string& key,
                          const std::string& path) {
  auto it = block.find(key);
  if (it == block.end()) {
    throw ConfigError("missing config field: " + path + "." + key);
  }
  return *it;
}

double require_number(const Json& block, const std::string& key,
                      const std::string& path) {
  const Json& v = require_field(block, key, path);
  if (!v.is_number()) {
    throw ConfigError("config field " + path + "." + key +
                      " must be a number, got " + type_name(v));
  }
  return v.get<double>();
}

long require_integer(const Json& block, const std::string& key,
                     const std::string& path) {
  const Json& v = require_field(block, key, path);
  if (!v.is_number_integer()) {
    throw ConfigError("config field " + path + "." + key +
                      " must be an integer, got " + type_name(v));
  }
  return v.get<long>();
}

std::string require_string(const Json& block, const std::string& key,
                           const std::string& path) {
  const Json& v = require_field(block, key, path);
  if (!v.is_string()) {
    throw ConfigError("config field " + path + "." + key +
                      " must be a string, got " + type_name(v));
  }
  return v.get<std::string>();
}

double number_or(const Json& block, const std::string& key, double fallback,
                 const std::string& path) {
  if (block.find(key) == block.end()) return fallback;
  return require_number(block, key, path);
}

long integer_or(const Json& block, const std::string& key, long fallback,
                const std::string& path) {
  if (block.find(key) == block.end()) return fallback;
  return require_integer(block, key, path);
}

std::string string_or(const Json& block, const std::string& key,
                      const std::string& fallback, const std::string& path) {
  if (block.find(key) == block.end()) return fallback;
  return require_string(block, key, path);
}

namespace {

Eigen::MatrixXd matrix_from_json(const Json& rows, const std::string& path) {
  if (!rows.is_array() || rows.empty()) {
    throw ConfigError("config field " + path + " must be a non-empty array of rows");
  }
  const long m = static_cast<long>(rows.size());
  long cols = -1;
  Eigen::MatrixXd out;
  for (long i = 0; i < m; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.empty()) {
      throw ConfigError("config field " + path + "[" + std::to_string(i) +
                        "] must be a non-empty array");
    }
    if (cols < 0) {
      cols = static_cast<long>(row.size());
      out.resize(m, cols);
    } else if (static_cast<long>(row.size()) != cols) {
      throw ConfigError("config field " + path + " has rows of unequal length");
    }
    for (long j = 0; j < cols; ++j) {
      const Json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) {
        throw ConfigError("config field " + path + "[" + std::to_string(i) +
                          "][" + std::to_string(j) + "] must be a number");
      }
      out(i, j) = v.get<double>();
    }
  }
  return out;
}

}  // namespace

KernelSpec kernel_from_json(const Json& block) {
  if (!block.is_object()) throw ConfigError("config field kernel must be an object");
  const std::string type = require_string(block, "type", "kernel");
  if (type == "gaussian") {
    GaussianKernel k;
    k.sigma = require_number(block, "sigma", "kernel");
    validate_kernel(k);
    return k;
  }
  if (type == "tabulated") {
    TabulatedKernel k;
    k.nodes = matrix_from_json(require_field(block, "nodes", "kernel"), "kernel.nodes");
    k.values = matrix_from_json(require_field(block, "values", "kernel"), "kernel.values");
    validate_kernel(k);
    return k;
  }
  throw ConfigError("kernel.type must be \"gaussian\" or \"tabulated\", got \"" +
                    type + "\"");
}

Domain domain_from_json(const Json& block) {
  if (!block.is_object()) throw ConfigError("config field domain must be an object");
  const Eigen::MatrixXd box =
      matrix_from_json(require_field(block, "box", "domain"), "domain.box");
  if (box.cols() != 2) {
    throw ConfigError("domain.box rows must be [lo, hi] pairs");
  }
  Domain d;
  d.box = box;
  d.validate();
  return d;
}

Measure measure_from_json(const Json& block) {
  Measure m;
  if (block.is_string()) {
    const std::string kind = block.get<std::string>();
    if (kind == "uniform_lebesgue") {
      m.kind = MeasureKind::UniformLebesgue;
    } else if (kind == "uniform_normalized") {
      m.kind = MeasureKind::UniformNormalized;
    } else {
      throw ConfigError("measure must be \"uniform_lebesgue\", "
                        "\"uniform_normalized\", or an empirical object, got \"" +
                        kind + "\"");
    }
    return m;
  }
  if (block.is_object()) {
    const std::string type = require_string(block, "type", "measure");
    if (type != "empirical") {
      throw ConfigError("measure.type must be \"empirical\", got \"" + type + "\"");
    }
    m.kind = MeasureKind::Empirical;
    m.points = matrix_from_json(require_field(block, "points", "measure"),
                                "measure.points");
    return m;
  }
  throw ConfigError("config field measure must be a string or an object");
}

bool has_problem_setup(const Json& config) {
  return config.find("kernel") != config.end() &&
         config.find("domain") != config.end();
}

ProblemSetup setup_from_json(const Json& config) {
  ProblemSetup setup;
  setup.kernel = kernel_from_json(require_field(config, "kernel", "config"));
  setup.domain = domain_from_json(require_field(config, "domain", "config"));
  if (config.find("measure") != config.end()) {
    setup.measure = measure_from_json(config.at("measure"));
  }
  const long nodes_per_dim = integer_or(config, "nodes_per_dim", 200, "config");
  if (nodes_per_dim < 1) {
    throw ConfigError("config field config.nodes_per_dim must be >= 1");
  }
  const long max_nodes = integer_or(config, "max_nodes", 200000, "config");
  setup.grid = build_grid(setup.domain, setup.measure,
                          static_cast<int>(nodes_per_dim), max_nodes);
  return setup;
}

namespace {

Spectrum spectrum_block(const Json& block, const ProblemSetup* setup,
                        Json* out_sidecar, const std::string& path) {
  if (!block.is_object()) {
    throw ConfigError("config field " + path + " must be an object");
  }
  const std::string source = require_string(block, "source", path);
  Json params = Json::object();
  Spectrum s;

  if (source == "nystrom") {
    if (setup == nullptr) {
      throw ConfigError(path + ".source \"nystrom\" needs the kernel/domain block");
    }
    const long k_max =
        integer_or(block, "k_max", setup->grid.size(), path);
    EigenSystem system = nystrom_spectrum(setup->kernel, setup->domain,
                                          setup->grid, static_cast<int>(k_max));
    s = system.spectrum;
    params["k_max"] = k_max;
    params["grid_nodes"] = setup->grid.size();
  } else if (source == "gaussian_bound") {
    const double sigma = require_number(block, "sigma", path);
    const long k_max = require_integer(block, "k_max", path);
    s = gaussian_bound_spectrum(sigma, static_cast<int>(k_max));
    params["sigma"] = sigma;
    params["k_max"] = k_max;
  } else if (source == "power_law") {
    const double c = require_number(block, "c", path);
    const double gamma = require_number(block, "gamma", path);
    const long count = require_integer(block, "count", path);
    if (count < 1) throw ConfigError(path + ".count must be >= 1");
    s = power_law_spectrum(c, gamma, static_cast<std::size_t>(count));
    params["c"] = c;
    params["gamma"] = gamma;
    params["count"] = count;
  } else if (source == "tensor") {
    const Json& factors = require_field(block, "factors", path);
    if (!factors.is_array() || factors.empty()) {
      throw ConfigError(path + ".factors must be a non-empty array");
    }
    std::vector<Spectrum> parts;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      parts.push_back(spectrum_block(factors[i], setup, nullptr,
                                     path + ".factors[" + std::to_string(i) + "]"));
    }
    const double cutoff = require_number(block, "cutoff", path);
    const long max_terms = integer_or(block, "max_terms", 2000000, path);
    s = tensor_spectrum(parts, cutoff, static_cast<std::size_t>(max_terms));
    params["factors"] = factors.size();
    params["cutoff"] = cutoff;
    params["max_terms"] = max_terms;
  } else if (source == "explicit") {
    const Json& values = require_field(block, "values", path);
    if (!values.is_array() || values.empty()) {
      throw ConfigError(path + ".values must be a non-empty array");
    }
    s.source = "explicit";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values[i].is_number()) {
        throw ConfigError(path + ".values[" + std::to_string(i) +
                          "] must be a number");
      }
      s.values.push_back(values[i].get<double>());
    }
    params["count"] = values.size();
  } else if (source == "csv") {
    const std::string file = require_string(block, "path", path);
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open spectrum CSV: " + file);
    s = read_spectrum_csv(in);
    params["path"] = file;
  } else {
    throw ConfigError(path + ".source \"" + source + "\" is not one of "
                      "nystrom|gaussian_bound|power_law|tensor|explicit|csv");
  }

  s.validate();
  if (out_sidecar != nullptr) {
    Json sidecar = Json::object();
    sidecar["source"] = s.source;
    sidecar["parameters"] = params;
    sidecar["trace"] = s.trace();
    sidecar["truncation_note"] = s.truncation_note;
    *out_sidecar = sidecar;
  }
  return s;
}

}  // namespace

Spectrum spectrum_from_json(const Json& config, const ProblemSetup* setup,
                            Json* out_sidecar) {
  return spectrum_block(require_field(config, "spectrum", "config"), setup,
                        out_sidecar, "spectrum");
}

Json report_to_json(const EntropyBoundReport& report) {
  Json j = Json::object();
  j["epsilon"] = report.epsilon;
  j["effective_radius"] = report.effective_radius;
  j["value_nats"] = report.value_nats;
  j["value_bits"] = report.value_bits();
  Json w = Json::object();
  for (const auto& [key, value] : report.witnesses) w[key] = value;
  j["witnesses"] = w;
  j["convention"] = report.convention;
  j["spectrum_source"] = report.spectrum_source;
  j["fallback"] = report.fallback;
  return j;
}

}  // namespace kentropy
