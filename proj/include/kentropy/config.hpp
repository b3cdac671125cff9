#pragma once

#include <string>

#include "json.hpp"
#include "kentropy/bounds.hpp"
#include "kentropy/kernel.hpp"
#include "kentropy/spectrum.hpp"

namespace kentropy {

// Insertion-ordered so emitted reports keep a stable, readable field order.
using Json = nlohmann::ordered_json;

// Reads and parses a JSON config file; throws ConfigError with the file
// path on I/O or syntax problems.
Json load_config_file(const std::string& path);

// The kernel/domain/measure/nodes_per_dim block shared by every command
// that evaluates a kernel, resolved into ready-to-use objects.
struct ProblemSetup {
  KernelSpec kernel;
  Domain domain;
  Measure measure;
  Grid grid;
};

bool has_problem_setup(const Json& config);
ProblemSetup setup_from_json(const Json& config);

// Individual block parsers (paths in error messages are relative to the
// config root, e.g. "kernel.sigma").
KernelSpec kernel_from_json(const Json& block);
Domain domain_from_json(const Json& block);
Measure measure_from_json(const Json& block);

// Resolves the "spectrum" block.  setup may be null unless the source is
// "nystrom".  out_sidecar, when non-null, receives the cache metadata
// {source, parameters, trace, truncation_note}.
Spectrum spectrum_from_json(const Json& config, const ProblemSetup* setup,
                            Json* out_sidecar = nullptr);

Json report_to_json(const EntropyBoundReport& report);

// Typed field accessors that turn missing/mistyped fields into ConfigError
// with the offending path.
const Json& require_field(const Json& block, const std::string& key,
                          const std::string& path);
double require_number(const Json& block, const std::string& key,
                      const std::string& path);
long require_integer(const Json& block, const std::string& key,
                     const std::string& path);
std::string require_string(const Json& block, const std::string& key,
                           const std::string& path);
double number_or(const Json& block, const std::string& key, double fallback,
                 const std::string& path);
long integer_or(const Json& block, const std::string& key, long fallback,
                const std::string& path);
std::string string_or(const Json& block, const std::string& key,
                      const std::string& fallback, const std::string& path);

}  // namespace kentropy
