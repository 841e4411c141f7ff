#include "figures.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "csv.hpp"
#include "pairchar/analytic_metrics.hpp"

namespace pairchar::cli {

using nlohmann::json;

namespace {

const FigureSpec kSpecs[] = {
    {2, MetricKind::r_tilde, MetricKind::r_ideal, std::nullopt, ""},
    {4, MetricKind::g2_conditional, std::nullopt, 1.0, "classical_bound"},
    {5, MetricKind::g2_auto, MetricKind::g2_ideal, std::nullopt, ""},
    {7, MetricKind::g2_cross, MetricKind::g2_cross_ideal, std::nullopt, ""},
    {9, MetricKind::v_hom, std::nullopt, std::nullopt, ""},
    {11, MetricKind::v_ent, std::nullopt, std::nullopt, ""},
};

std::string pdc_tag(double p_dc) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p_dc);
  return buf;
}

json extremum_json(const Curve& c, Objective objective) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const bool better = objective == Objective::maximize
                            ? c.points[i].value > c.points[best].value
                            : c.points[i].value < c.points[best].value;
    if (better) best = i;
  }
  return {{"kind", objective == Objective::maximize ? "max" : "min"},
          {"p", c.points[best].p},
          {"value", c.points[best].value},
          {"interior", best != 0 && best + 1 != c.points.size()}};
}

}  // namespace

const FigureSpec& figure_spec(int id) {
  for (const auto& s : kSpecs) {
    if (s.id == id) return s;
  }
  throw UsageError("unknown figure id " + std::to_string(id) + " (2, 4, 5, 7, 9, 11)");
}

std::vector<double> figure_p_grid() {
  std::vector<double> p;
  for (int i = 0; i < 240; ++i) p.push_back(std::pow(10.0, -6.0 + i / 40.0));
  p.push_back(0.99);
  return p;
}

FigureData build_figure(int id) {
  FigureData fig{figure_spec(id), {}, {}};
  const auto& spec = fig.spec;
  const auto grid = figure_p_grid();
  const std::string metric(to_string(spec.kind));
  const std::string stem = "figure_" + std::to_string(id) + "_";
  const Objective objective = natural_objective(spec.kind);

  json curves = json::array();
  for (double p_dc : kFigureDarkCounts) {
    Curve c{stem + metric + "_pdc_" + pdc_tag(p_dc) + ".csv", metric, p_dc, {}};
    const DetectorModel det(kFigureEta, p_dc);
    for (double p : grid) {
      c.points.push_back({p, evaluate({SourceParams(p), det, spec.kind}).value});
    }
    json entry = {{"file", c.file},
                  {"p_dc", p_dc},
                  {"heuristic_p_opt", p_dc / kFigureEta},
                  {"first", {{"p", c.points.front().p}, {"value", c.points.front().value}}},
                  {"last", {{"p", c.points.back().p}, {"value", c.points.back().value}}},
                  {"grid_extremum", extremum_json(c, objective)}};
    if (spec.kind != MetricKind::g2_auto) {
      try {
        const Optimum o = find_p_opt(spec.kind, det, 1, objective);
        entry["refined_extremum"] = {{"p", o.p_opt},
                                     {"value", o.value},
                                     {"near_heuristic", o.near_heuristic}};
      } catch (const NoExtremum& e) {
        entry["refined_extremum"] = {{"error", e.what()}};
      }
    }
    curves.push_back(entry);
    fig.curves.push_back(std::move(c));
  }

  json reference = nullptr;
  if (spec.reference) {
    const std::string ref(to_string(*spec.reference));
    Curve c{stem + ref + ".csv", ref, std::nullopt, {}};
    for (double p : grid) {
      c.points.push_back({p, evaluate({SourceParams(p), DetectorModel(1.0, 0.0), *spec.reference})
                                 .value});
    }
    reference = {{"file", c.file}, {"metric", ref}};
    fig.curves.push_back(std::move(c));
  }

  fig.manifest = {{"figure", id},
                  {"metric", metric},
                  {"eta", kFigureEta},
                  {"n_modes", 1},
                  {"p_dc_levels", kFigureDarkCounts},
                  {"p_grid",
                   {{"spacing", "log10, 40 points per decade, plus 0.99"},
                    {"count", grid.size()},
                    {"min", grid.front()},
                    {"max", grid.back()},
                    {"values", grid}}},
                  {"curves", curves},
                  {"reference", reference}};
  if (spec.guide) {
    fig.manifest["guide"] = {{"label", spec.guide_label}, {"value", *spec.guide}};
  }
  return fig;
}

std::vector<std::string> write_figure(const FigureData& fig, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (const auto& c : fig.curves) {
    std::vector<SweepRow> rows;
    for (const auto& pt : c.points) {
      SweepRow r;
      r.metric = c.metric;
      r.engine = "closed_form";
      r.p = pt.p;
      r.p_bar = pt.p;
      r.n_modes = 1;
      if (c.p_dc) {
        r.eta = kFigureEta;
        r.p_dc = *c.p_dc;
      }
      r.value = pt.value;
      rows.push_back(std::move(r));
    }
    std::ofstream f(fs::path(out_dir) / c.file);
    if (!f) throw UsageError("cannot write into " + out_dir);
    write_sweep_csv(f, rows);
    written.push_back(c.file);
  }
  const std::string manifest = "figure_" + std::to_string(fig.spec.id) + "_manifest.json";
  std::ofstream f(fs::path(out_dir) / manifest);
  f << fig.manifest.dump(2) << '\n';
  written.push_back(manifest);
  return written;
}

int cmd_figure(int id, const std::string& out_dir) {
  const auto fig = build_figure(id);
  for (const auto& name : write_figure(fig, out_dir)) std::cout << name << '\n';
  return kOk;
}

}  // namespace pairchar::cli
