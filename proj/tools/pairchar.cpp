#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../src/cli/commands.hpp"
#include "../src/cli/figures.hpp"
#include "../src/cli/validate.hpp"

using namespace pairchar;
using namespace pairchar::cli;

namespace {

struct CommonFlags {
  std::optional<double> p, p_bar, eta, p_dc;
  int n_modes = 1;
  std::string metric;
};

void add_params(CLI::App* cmd, CommonFlags& f, bool require_metric = true) {
  auto* p = cmd->add_option("--p", f.p, "single-mode-equivalent emission probability");
  auto* pb = cmd->add_option("--p-bar", f.p_bar, "per-mode emission probability");
  p->excludes(pb);
  cmd->add_option("--n-modes", f.n_modes, "number of independent pair modes")->capture_default_str();
  cmd->add_option("--eta", f.eta, "overall detection efficiency");
  cmd->add_option("--pdc", f.p_dc, "dark-count probability per gate");
  auto* m = cmd->add_option("--metric", f.metric, "metric kind");
  if (require_metric) m->required();
}

ParamInput to_input(const CommonFlags& f) { return {f.p, f.p_bar, f.n_modes, f.eta, f.p_dc}; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imperfect-detector characterization of photon-pair sources"};
  app.require_subcommand(1);

  CommonFlags compute_flags;
  std::string compute_engine = "closed_form";
  McSettings compute_mc;
  auto* compute = app.add_subcommand("compute", "evaluate one metric, print JSON");
  add_params(compute, compute_flags);
  compute->add_option("--engine", compute_engine)->capture_default_str();
  compute->add_option("--trials", compute_mc.trials)->capture_default_str();
  compute->add_option("--seed", compute_mc.seed)->capture_default_str();

  CommonFlags sweep_flags;
  std::string axis = "p", engines = "closed_form", out_path, values;
  std::vector<double> range;
  McSettings sweep_mc;
  auto* sweep = app.add_subcommand("sweep", "evaluate a metric along one axis, write CSV");
  add_params(sweep, sweep_flags);
  sweep->add_option("--axis", axis, "p, eta, p_dc or N")->capture_default_str();
  auto* vals = sweep->add_option("--values", values, "comma-separated axis values");
  auto* rng = sweep->add_option("--range", range, "log range: lo hi count")->expected(3);
  vals->excludes(rng);
  sweep->add_option("--engine,--engines", engines, "comma-separated engines")
      ->capture_default_str();
  sweep->add_option("--trials", sweep_mc.trials)->capture_default_str();
  sweep->add_option("--seed", sweep_mc.seed)->capture_default_str();
  sweep->add_option("--out", out_path, "CSV path (default stdout)");

  int figure_id = 0;
  std::string figure_dir = ".";
  auto* figure = app.add_subcommand("figure", "write the curves of one figure");
  figure->add_option("--id,id", figure_id, "2, 4, 5, 7, 9 or 11")->required();
  figure->add_option("--out", figure_dir, "output directory")->capture_default_str();

  ValidateConfig vconfig;
  bool quick = false;
  std::string validate_out;
  auto* validate = app.add_subcommand("validate", "closed form vs oracle report");
  validate->add_flag("--quick", quick, "single-mode grid only");
  validate->add_option("--tolerance", vconfig.tolerance)->capture_default_str();
  validate->add_option("--mc-trials", vconfig.mc_trials, "Monte Carlo checks, 0 to skip")
      ->capture_default_str();
  validate->add_option("--seed", vconfig.mc_seed)->capture_default_str();
  validate->add_option("--out", validate_out, "report path (default stdout)");

  CommonFlags mc_flags;
  McSettings mc_settings;
  std::string clicks;
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate, print JSON");
  add_params(mc, mc_flags);
  mc->add_option("--trials", mc_settings.trials)->capture_default_str();
  mc->add_option("--seed", mc_settings.seed)->capture_default_str();
  mc->add_option("--out,--clicks", clicks, "optional per-trial click CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*compute) {
      return cmd_compute({compute_flags.metric, compute_engine, to_input(compute_flags), compute_mc},
                         std::cout);
    }
    if (*mc) return cmd_mc({mc_flags.metric, to_input(mc_flags), mc_settings, clicks}, std::cout);
    if (*figure) return cmd_figure(figure_id, figure_dir);
    if (*validate) {
      ValidateConfig c = quick ? ValidateConfig::quick() : ValidateConfig{};
      c.tolerance = vconfig.tolerance;
      c.mc_trials = vconfig.mc_trials;
      c.mc_seed = vconfig.mc_seed;
      return cmd_validate(c, validate_out);
    }
    if (*sweep) {
      SweepSpec spec{require_metric(sweep_flags.metric), parse_axis(axis), {},
                     to_input(sweep_flags), {}, sweep_mc, 0};
      if (!range.empty()) {
        spec.values = log_range(range[0], range[1], static_cast<int>(range[2]));
      } else {
        for (const auto& v : split_list(values)) spec.values.push_back(std::stod(v));
      }
      for (const auto& e : split_list(engines)) spec.engines.push_back(require_engine(e));
      if (out_path.empty()) return cmd_sweep(spec, std::cout);
      std::ofstream f(out_path);
      if (!f) throw UsageError("cannot write " + out_path);
      return cmd_sweep(spec, f);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad number: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cout << error_json(e, nullptr).dump(2) << '\n';
    return kDomainError;
  }
  return kUsage;
}
