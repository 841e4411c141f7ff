// One pass/fail line per acceptance criterion; --criterion N runs one.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli/figures.hpp"
#include "pairchar/analytic_metrics.hpp"
#include "pairchar/fock_oracle.hpp"
#include "pairchar/mc_sampler.hpp"

using namespace pairchar;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
bool within_factor(double v, double target, double f) { return v >= target / f && v <= target * f; }

const DetectorModel kWeakDet(1e-2, 1e-6);

Outcome headline_values() {
  Outcome o;
  const SourceParams s(0.1);
  const double r = r_tilde(s, kWeakDet).value;
  const double g = g2_auto(s, kWeakDet).value;
  const double x = g2_cross(s, kWeakDet).value;
  const double vh = v_hom(s, kWeakDet).value;
  const double ve = v_ent(s, kWeakDet).value;
  o.require(r >= 25 && r <= 35, fmt("R~ = %.6g outside [25, 35]", r));
  o.require(g >= 1.994 && g <= 1.998, fmt("g2 = %.6g outside [1.994, 1.998]", g));
  o.require(x >= 10 && x <= 12, fmt("g2_ab = %.6g outside [10, 12]", x));
  o.require(vh >= 0.84 && vh <= 0.86, fmt("V_HOM = %.6g outside [0.84, 0.86]", vh));
  o.require(ve >= 0.82 && ve <= 0.84, fmt("V_ent = %.6g outside [0.82, 0.84]", ve));
  if (o.pass) {
    o.detail = fmt("R~ %.4g, g2 %.5g, g2_ab %.4g", r, g, x) + fmt(", V_HOM %.4g, V_ent %.4g", vh, ve);
  }
  return o;
}

Outcome optima() {
  Outcome o;
  const double target = 1e-4;
  const auto r = find_p_opt(MetricKind::r_tilde, kWeakDet, 1);
  const auto g = find_p_opt(MetricKind::g2_conditional, kWeakDet, 1);
  o.require(within_factor(r.p_opt, target, 3), fmt("R~ p_opt %.3g not within 3x of 1e-4", r.p_opt));
  o.require(within_factor(g.p_opt, target, 3), fmt("g2_a|b p_opt %.3g not within 3x of 1e-4", g.p_opt));
  o.require(within_factor(r.value, 1e6, 2), fmt("R~ max %.4g not within 2x of 1e6", r.value));
  o.require(within_factor(g.value, 1e-3, 2), fmt("g2_a|b min %.4g not within 2x of 1e-3", g.value));
  const auto vh = find_p_opt(MetricKind::v_hom, kWeakDet, 1);
  const auto ve = find_p_opt(MetricKind::v_ent, kWeakDet, 1);
  o.require(vh.value >= 0.97 && vh.value <= 0.99,
            fmt("V_HOM max %.6g at p = %.3g outside [0.97, 0.99]", vh.value, vh.p_opt));
  o.require(within_factor(vh.p_opt, 1e-2, 3), fmt("V_HOM max at p = %.3g, not near 1e-2", vh.p_opt));
  o.require(ve.value >= 0.97 && ve.value <= 0.99,
            fmt("V_ent max %.6g at p = %.3g outside [0.97, 0.99]", ve.value, ve.p_opt));
  const double at = v_hom(SourceParams(1e-2), kWeakDet).value;
  const double ae = v_ent(SourceParams(1e-2), kWeakDet).value;
  o.detail += fmt(" (for reference V_HOM(1e-2) = %.4f, V_ent(1e-2) = %.4f)", at, ae);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  double worst = 0.0;
  std::string worst_cell;
  int cells = 0, failed = 0;
  for (double p : {0.01, 0.1, 0.3, 0.5})
    for (double eta : {0.01, 0.2, 0.5, 1.0})
      for (double pdc : {0.0, 1e-4, 1e-2})
        for (int n : {1, 2, 5}) {
          const auto s = SourceParams::from_equivalent_p(p, n);
          const DetectorModel d(eta, pdc);
          for (MetricKind k : kPrimaryMetrics) {
            ++cells;
            std::ostringstream cell;
            cell << to_string(k) << " p=" << p << " eta=" << eta << " pdc=" << pdc << " N=" << n;
            try {
              const double dev = rel(evaluate({s, d, k}).value, oracle_multimode(k, s, d).value);
              if (dev > worst) {
                worst = dev;
                worst_cell = cell.str();
              }
              if (!(dev < 1e-8)) {
                ++failed;
                o.require(false, cell.str() + fmt(" deviates by %.3g", dev));
              }
            } catch (const std::exception& e) {
              ++failed;
              o.require(false, cell.str() + " raised " + e.what());
            }
          }
        }
  o.detail = std::to_string(cells) + " cells, " + std::to_string(failed) + " failed, worst " +
             fmt("%.2g", worst) + " (" + worst_cell + ")" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome series_identities() {
  Outcome o;
  double worst = 0.0;
  for (double p : {0.1, 0.5, 0.9})
    for (double x : {0.1, 0.5, 0.99})
      for (const auto& c : check_series_identities(p, x)) {
        worst = std::max(worst, c.relative_deviation());
        o.require(c.relative_deviation() < 1e-10,
                  c.name + fmt(" at p = %g, x = %g deviates by %.3g", p, x, c.relative_deviation()));
      }
  if (o.pass) o.detail = fmt("27 checks, worst %.2g", worst);
  return o;
}

Outcome ideal_identity() {
  Outcome o;
  double worst = 0.0;
  for (double p : {0.1, 0.3, 0.5}) {
    const auto m = ideal_normal_ordered_moments(SourceParams(p));
    const double devs[] = {rel(m.g2_cross(), std::sqrt(m.r() * m.g2_a() * m.g2_b())),
                           rel(m.r(), 0.25 * (1 + 1 / p) * (1 + 1 / p)), rel(m.g2_a(), 2.0),
                           rel(m.g2_b(), 2.0), rel(m.g2_cross(), 1 + 1 / p)};
    for (double d : devs) {
      worst = std::max(worst, d);
      o.require(d < 1e-10, fmt("p = %g: deviation %.3g", p, d));
    }
  }
  if (o.pass) o.detail = fmt("worst %.2g", worst);
  return o;
}

Outcome coalescence() {
  Outcome o;
  const std::vector<int> n11{1, 1};
  const FockState in(2, {{Occupation(n11), 1.0}}, 2, 0.0);
  const double a11 = std::abs(apply_beamsplitter(in, 0, 1, 0.5).amplitude(Occupation(n11)));
  o.require(a11 <= 1e-14, fmt("|1,1> amplitude %.3g", a11));
  double worst = 0.0;
  for (double p : {0.1, 0.5}) {
    const int k = initial_order(p, CutoffPolicy{});
    const auto split = hom_dip_state(p, k);
    const double c = std::sqrt(p) / 2;
    const PairTerm t[] = {{0, 0, c}, {1, 1, -c}};
    const auto direct = make_pair_exponential_state(t, 2, std::sqrt(1 - p), k, 1.0);
    for (const auto& term : split.terms())
      worst = std::max(worst, std::abs(term.amplitude - direct.amplitude(term.occupation)));
    for (const auto& term : direct.terms())
      worst = std::max(worst, std::abs(term.amplitude - split.amplitude(term.occupation)));
  }
  o.require(worst <= 1e-10, fmt("dip state amplitudes differ by %.3g", worst));
  o.detail = fmt("|1,1> amplitude %.2g, dip amplitude difference %.2g", a11, worst) +
             (o.pass ? "" : "; " + o.detail);
  return o;
}

Outcome monte_carlo() {
  Outcome o;
  const int seeds = 20;
  int cells = 0, good_cells = 0;
  for (double eta : {0.05, 0.5})
    for (double pdc : {0.0, 1e-3})
      for (int n : {1, 2}) {
        const auto s = SourceParams::from_equivalent_p(0.1, n);
        const DetectorModel d(eta, pdc);
        for (MetricKind k : kPrimaryMetrics) {
          ++cells;
          const double exact = evaluate({s, d, k}).value;
          int hits = 0;
          for (int seed = 1; seed <= seeds; ++seed) {
            try {
              const auto r = estimate_metric(k, s, d, 1000000, seed);
              hits += std::abs(r.value - exact) < 4 * r.std_error;
            } catch (const DegenerateCounts&) {
            }
          }
          if (hits >= 19) {
            ++good_cells;
          } else {
            std::ostringstream c;
            c << to_string(k) << " eta=" << eta << " pdc=" << pdc << " N=" << n << ": " << hits
              << "/20 within 4 SE";
            o.require(false, c.str());
          }
        }
      }
  o.detail = std::to_string(good_cells) + "/" + std::to_string(cells) + " cells with >= 19/20 seeds" +
             (o.pass ? "" : "; " + o.detail);
  return o;
}

std::vector<double> golden_values(const std::string& file) {
  std::ifstream f(std::filesystem::path(PAIRCHAR_GOLDEN_DIR) / file);
  std::vector<double> v;
  std::string line;
  std::getline(f, line);
  while (std::getline(f, line)) {
    std::stringstream ss(line);
    std::string field;
    for (int i = 0; i < 8; ++i) std::getline(ss, field, ',');
    v.push_back(std::stod(field));
  }
  return v;
}

Outcome figures() {
  Outcome o;
  double worst_golden = 0.0;
  for (int id : cli::kFigureIds) {
    const auto fig = cli::build_figure(id);
    for (const auto& curve : fig.curves) {
      const auto golden = golden_values(curve.file);
      if (golden.size() != curve.points.size()) {
        o.require(false, curve.file + " missing or wrong length");
        continue;
      }
      for (std::size_t i = 0; i < golden.size(); ++i)
        worst_golden = std::max(worst_golden, rel(curve.points[i].value, golden[i]));
    }
    for (const auto& c : fig.manifest["curves"]) {
      if (!c.contains("p_dc") || c["p_dc"].is_null()) continue;
      const std::string tag = "figure " + std::to_string(id) + fmt(" p_dc %g", c["p_dc"].get<double>());
      if (id == 5) {
        // noise-dominated end of the curve
        const double first = c["first"]["value"].get<double>();
        o.require(std::abs(first - 1.0) < 1e-3, tag + fmt(": g2 at smallest p is %.6g", first));
        continue;
      }
      o.require(c["grid_extremum"]["interior"].get<bool>(), tag + ": extremum at the grid edge");
      o.require(c["refined_extremum"]["near_heuristic"].get<bool>(),
                tag + fmt(": extremum at %.3g, not within 3x of p_dc/eta",
                          c["refined_extremum"]["p"].get<double>()));
    }
    if (id == 5) {
      // closer to 1 as dark counts grow
      double prev = INFINITY;
      for (const auto& c : fig.manifest["curves"]) {
        if (!c.contains("p_dc") || c["p_dc"].is_null()) continue;
        const double gap = std::abs(c["first"]["value"].get<double>() - 1.0);
        o.require(gap < prev, "figure 5: noise limit not approached monotonically in p_dc");
        prev = gap;
      }
    }
  }
  o.require(worst_golden <= 1e-12, fmt("golden regression deviation %.3g", worst_golden));
  o.detail = fmt("6 figures, golden deviation %.2g", worst_golden) + (o.pass ? "" : "; " + o.detail);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const Criterion all[] = {
      {1, "headline values", 1.0, headline_values},
      {2, "optima", 5.0, optima},
      {3, "oracle equivalence", 120.0, oracle_equivalence},
      {4, "series identities", 1.0, series_identities},
      {5, "ideal moment identity", 0.0, ideal_identity},
      {6, "hom coalescence", 0.0, coalescence},
      {7, "monte carlo consistency", 180.0, monte_carlo},
      {8, "figure reproduction", 0.0, figures},
  };
  bool ok = true;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("raised ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      out.pass = false;
      out.detail += fmt("; took %.2f s, budget %.0f s", secs, c.budget_s);
    }
    std::printf("criterion %d: %s %s (%.2f s): %s\n", c.id, out.pass ? "PASS" : "FAIL", c.name, secs,
                out.detail.c_str());
    ok = ok && out.pass;
  }
  return ok ? 0 : 1;
}
