#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "pairchar/core_model.hpp"
#include "pairchar/mc_sampler.hpp"

namespace pairchar::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kUsage = 2, kDomainError = 3 };

/// Bad flag combinations detected after parsing (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source and detector flags as given on the command line.
struct ParamInput {
  std::optional<double> p;
  std::optional<double> p_bar;
  int n_modes = 1;
  std::optional<double> eta;
  std::optional<double> p_dc;
};

struct McSettings {
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Kinds defined by p alone (no detector).
bool is_ideal_kind(MetricKind kind);

MetricKind require_metric(const std::string& name);
Provenance require_engine(const std::string& name);

SourceParams make_source(const ParamInput& in);
DetectorModel make_detector(const ParamInput& in);

struct EngineResult {
  double value = 0.0;
  std::optional<double> std_error;
  std::optional<double> cutoff;
  std::optional<double> tail_mass;
  std::map<std::string, double> diagnostics;
};

EngineResult run_engine(MetricKind kind, Provenance engine, const SourceParams& source,
                        const DetectorModel& det, const McSettings& mc,
                        ClickLog* log = nullptr);

nlohmann::json params_json(const SourceParams& source, const DetectorModel& det);
/// {code, message, params}; code is the library error name or "Error".
nlohmann::json error_json(const std::exception& e, const nlohmann::json& params);
int exit_code_for(const std::exception& e);
std::string error_code_name(const std::exception& e);

struct ComputeArgs {
  std::string metric;
  std::string engine = "closed_form";
  ParamInput params;
  McSettings mc;
};

int cmd_compute(const ComputeArgs& args, std::ostream& out);

struct McArgs {
  std::string metric;
  ParamInput params;
  McSettings mc;
  std::string clicks_path;  // empty: no export
};

int cmd_mc(const McArgs& args, std::ostream& out);

enum class Axis { p, eta, p_dc, n_modes };

struct SweepSpec {
  MetricKind kind;
  Axis axis;
  std::vector<double> values;
  ParamInput fixed;
  std::vector<Provenance> engines;
  McSettings mc;
  unsigned threads = 0;
};

Axis parse_axis(const std::string& name);
std::vector<double> log_range(double lo, double hi, int count);

/// Evaluates every (axis value, engine) cell; rows in axis order, engines
/// in the order given. Failed cells carry an error string.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Writes the CSV; exit 0 when every row succeeded, 3 otherwise.
int cmd_sweep(const SweepSpec& spec, std::ostream& out);

}  // namespace pairchar::cli
