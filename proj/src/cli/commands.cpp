#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "csv.hpp"
#include "pairchar/analytic_metrics.hpp"
#include "pairchar/fock_oracle.hpp"

namespace pairchar::cli {

using nlohmann::json;

bool is_ideal_kind(MetricKind kind) {
  return kind == MetricKind::r_ideal || kind == MetricKind::g2_ideal ||
         kind == MetricKind::g2_cross_ideal;
}

MetricKind require_metric(const std::string& name) {
  if (auto k = parse_metric_kind(name)) return *k;
  throw UsageError("unknown metric '" + name + "'");
}

Provenance require_engine(const std::string& name) {
  if (auto e = parse_provenance(name)) return *e;
  throw UsageError("unknown engine '" + name + "' (closed_form, oracle, monte_carlo)");
}

SourceParams make_source(const ParamInput& in) {
  if (in.p && in.p_bar) throw UsageError("give either --p or --p-bar, not both");
  if (!in.p && !in.p_bar) throw UsageError("one of --p or --p-bar is required");
  if (in.n_modes < 1) throw InvalidParameter("--n-modes must be at least 1");
  if (in.p) return SourceParams::from_equivalent_p(*in.p, in.n_modes);
  return SourceParams(*in.p_bar, in.n_modes);
}

DetectorModel make_detector(const ParamInput& in) {
  if (!in.eta) throw UsageError("--eta is required");
  if (!in.p_dc) throw UsageError("--pdc is required");
  return DetectorModel(*in.eta, *in.p_dc);
}

EngineResult run_engine(MetricKind kind, Provenance engine, const SourceParams& source,
                        const DetectorModel& det, const McSettings& mc, ClickLog* log) {
  EngineResult r;
  auto take = [&](const MetricValue& v) {
    r.value = v.value;
    r.diagnostics = v.diagnostics;
    if (auto it = v.diagnostics.find("cutoff"); it != v.diagnostics.end()) r.cutoff = it->second;
    if (auto it = v.diagnostics.find("tail_mass"); it != v.diagnostics.end()) {
      r.tail_mass = it->second;
    }
  };
  switch (engine) {
    case Provenance::closed_form:
      take(evaluate({source, det, kind}));
      break;
    case Provenance::oracle:
      take(oracle_multimode(kind, source, det));
      break;
    case Provenance::monte_carlo: {
      const auto e = estimate_metric(kind, source, det, mc.trials, mc.seed, {mc.threads}, log);
      r.value = e.value;
      r.std_error = e.std_error;
      r.diagnostics = e.diagnostics;
      r.diagnostics["trials"] = static_cast<double>(e.trials);
      break;
    }
  }
  return r;
}

json params_json(const SourceParams& source, const DetectorModel& det) {
  return {{"p", source.equivalent_p()},
          {"p_bar", source.p_bar()},
          {"n_modes", source.n_modes()},
          {"eta", det.eta()},
          {"p_dc", det.p_dc()}};
}

std::string error_code_name(const std::exception& e) {
  if (auto* err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->code()));
  if (dynamic_cast<const UsageError*>(&e)) return "UsageError";
  return "Error";
}

json error_json(const std::exception& e, const json& params) {
  return {{"error", {{"code", error_code_name(e)}, {"message", e.what()}, {"params", params}}}};
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kUsage;
  return kDomainError;
}

namespace {

json raw_params(const ParamInput& in) {
  json j = json::object();
  if (in.p) j["p"] = *in.p;
  if (in.p_bar) j["p_bar"] = *in.p_bar;
  j["n_modes"] = in.n_modes;
  if (in.eta) j["eta"] = *in.eta;
  if (in.p_dc) j["p_dc"] = *in.p_dc;
  return j;
}

}  // namespace

int cmd_compute(const ComputeArgs& args, std::ostream& out) {
  try {
    const MetricKind kind = require_metric(args.metric);
    const Provenance engine = require_engine(args.engine);
    const SourceParams source = make_source(args.params);
    json result;
    if (is_ideal_kind(kind)) {
      if (engine != Provenance::closed_form) {
        throw UsageError("ideal metrics only have a closed form");
      }
      const double v = evaluate({source, DetectorModel(1.0, 0.0), kind}).value;
      result = {{"metric", to_string(kind)},
                {"params", {{"p", source.equivalent_p()}}},
                {"engine", to_string(engine)},
                {"value", v},
                {"diagnostics", json::object()}};
    } else {
      const DetectorModel det = make_detector(args.params);
      const EngineResult r = run_engine(kind, engine, source, det, args.mc);
      result = {{"metric", to_string(kind)},
                {"params", params_json(source, det)},
                {"engine", to_string(engine)},
                {"value", r.value},
                {"diagnostics", r.diagnostics}};
      if (r.std_error) result["std_error"] = *r.std_error;
    }
    out << result.dump(2) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    out << error_json(e, raw_params(args.params)).dump(2) << '\n';
    return exit_code_for(e);
  }
}

int cmd_mc(const McArgs& args, std::ostream& out) {
  try {
    const MetricKind kind = require_metric(args.metric);
    const SourceParams source = make_source(args.params);
    const DetectorModel det = make_detector(args.params);
    ClickLog log;
    const bool keep = !args.clicks_path.empty();
    const auto r = estimate_metric(kind, source, det, args.mc.trials, args.mc.seed,
                                   {args.mc.threads}, keep ? &log : nullptr);
    if (keep) {
      std::ofstream f(args.clicks_path);
      if (!f) throw UsageError("cannot write " + args.clicks_path);
      log.write_csv(f);
    }
    json result = {{"metric", to_string(kind)},
                   {"params", params_json(source, det)},
                   {"engine", "monte_carlo"},
                   {"value", r.value},
                   {"std_error", r.std_error},
                   {"trials", r.trials},
                   {"seed", args.mc.seed},
                   {"diagnostics", r.diagnostics}};
    out << result.dump(2) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    out << error_json(e, raw_params(args.params)).dump(2) << '\n';
    return exit_code_for(e);
  }
}

Axis parse_axis(const std::string& name) {
  if (name == "p") return Axis::p;
  if (name == "eta") return Axis::eta;
  if (name == "p_dc" || name == "pdc") return Axis::p_dc;
  if (name == "N" || name == "n_modes") return Axis::n_modes;
  throw UsageError("unknown axis '" + name + "' (p, eta, p_dc, N)");
}

std::vector<double> log_range(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) {
    throw UsageError("log range needs 0 < lo < hi and at least two points");
  }
  std::vector<double> v(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) v[i] = std::exp(a + (b - a) * i / (count - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

namespace {

void check_axis(const SweepSpec& spec) {
  if (spec.values.empty()) throw UsageError("sweep needs at least one axis value");
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (!(spec.values[i] > spec.values[i - 1])) {
      throw UsageError("axis values must be strictly increasing");
    }
  }
  for (double v : spec.values) {
    bool ok = false;
    switch (spec.axis) {
      case Axis::p: ok = v >= 0.0 && v < 1.0; break;
      case Axis::eta: ok = v >= 0.0 && v <= 1.0; break;
      case Axis::p_dc: ok = v >= 0.0 && v < 1.0; break;
      case Axis::n_modes: ok = v >= 1.0 && v == std::floor(v); break;
    }
    if (!ok) throw UsageError("axis value " + format_number(v) + " outside its domain");
  }
  if (spec.engines.empty()) throw UsageError("sweep needs at least one engine");
}

ParamInput with_axis(ParamInput in, Axis axis, double v) {
  switch (axis) {
    case Axis::p:
      in.p = v;
      in.p_bar.reset();
      break;
    case Axis::eta: in.eta = v; break;
    case Axis::p_dc: in.p_dc = v; break;
    case Axis::n_modes: in.n_modes = static_cast<int>(v); break;
  }
  return in;
}

SweepRow evaluate_row(const SweepSpec& spec, double axis_value, Provenance engine) {
  SweepRow row;
  row.metric = std::string(to_string(spec.kind));
  row.engine = std::string(to_string(engine));
  ParamInput in = with_axis(spec.fixed, spec.axis, axis_value);
  row.n_modes = in.n_modes;
  row.eta = in.eta;
  row.p_dc = in.p_dc;
  row.p = in.p;
  row.p_bar = in.p_bar;
  try {
    const SourceParams source = make_source(in);
    row.p = source.equivalent_p();
    row.p_bar = source.p_bar();
    if (is_ideal_kind(spec.kind)) {
      if (engine != Provenance::closed_form) throw UsageError("ideal metrics are closed form");
      row.value = evaluate({source, DetectorModel(1.0, 0.0), spec.kind}).value;
    } else {
      const DetectorModel det = make_detector(in);
      const EngineResult r = run_engine(spec.kind, engine, source, det, spec.mc);
      row.value = r.value;
      row.std_error = r.std_error;
      row.cutoff = r.cutoff;
      row.tail_mass = r.tail_mass;
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    row.value.reset();
    row.error = error_code_name(e) + ": " + e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  check_axis(spec);
  const std::size_t cells = spec.values.size() * spec.engines.size();
  std::vector<SweepRow> rows(cells);
  std::vector<std::string> usage_errors(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells;) {
      try {
        rows[i] = evaluate_row(spec, spec.values[i / spec.engines.size()],
                               spec.engines[i % spec.engines.size()]);
      } catch (const UsageError& e) {
        usage_errors[i] = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(spec.threads ? spec.threads
                                                                  : std::thread::hardware_concurrency(),
                                                     static_cast<unsigned>(cells)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : usage_errors) {
    if (!e.empty()) throw UsageError(e);
  }
  return rows;
}

int cmd_sweep(const SweepSpec& spec, std::ostream& out) {
  const auto rows = run_sweep(spec);
  write_sweep_csv(out, rows);
  for (const auto& r : rows) {
    if (!r.error.empty()) return kDomainError;
  }
  return kOk;
}

}  // namespace pairchar::cli
