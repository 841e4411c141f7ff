#include <doctest.h>

#include <cmath>
#include <random>

#include "pairchar/analytic_metrics.hpp"
#include "reference_values.hpp"

using namespace pairchar;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double eval(MetricKind k, double p, double eta, double pdc, int n = 1) {
  return evaluate({SourceParams::from_equivalent_p(p, n), DetectorModel(eta, pdc), k}).value;
}

const DetectorModel kWeakDet(1e-2, 1e-6);

}  // namespace

TEST_CASE("ideal cauchy-schwarz parameter") {
  CHECK(r_ideal(1.0) == 1.0);
  CHECK(r_ideal(0.1) == doctest::Approx(30.25).epsilon(1e-15));
  CHECK(r_ideal(1.0 / 3.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(r_ideal(0.0), DivergentMetric);
  CHECK_THROWS_AS(r_ideal(-0.1), InvalidParameter);
  CHECK_THROWS_AS(r_ideal(1.5), InvalidParameter);
}

TEST_CASE("r_tilde near the weak-detector operating point") {
  const double v = r_tilde(SourceParams(0.1), kWeakDet).value;
  CHECK(v >= 25.0);
  CHECK(v <= 35.0);
  CHECK(r_tilde(SourceParams(0.1), kWeakDet).provenance == Provenance::closed_form);
}

TEST_CASE("r_tilde first order expansion") {
  // n_a = 1 at p = 1/2; eta -> 0 without dark counts
  CHECK(r_tilde_first_order(SourceParams(0.5), DetectorModel(1e-12, 0.0)) ==
        doctest::Approx(2.25).epsilon(1e-11));
  // 2 p_dc = eta n_a kills the second factor
  CHECK(r_tilde_first_order(SourceParams(0.5), DetectorModel(0.02, 0.01)) == 1.0);
  const double exact = r_tilde(SourceParams(0.1), kWeakDet).value;
  CHECK(rel(r_tilde_first_order(SourceParams(0.1), kWeakDet), exact) < 0.05);
  CHECK_THROWS_AS(r_tilde_first_order(SourceParams(0.1), DetectorModel(0.0, 0.0)),
                  InvalidParameter);
  CHECK_THROWS_AS(r_tilde_first_order(SourceParams(0.1, 2), kWeakDet), InvalidParameter);
}

TEST_CASE("g2 auto correlation") {
  const double v = g2_auto(SourceParams(0.1), kWeakDet).value;
  CHECK(std::abs(v - 1.996) <= 0.002);
  // dark counts only
  CHECK(g2_auto(SourceParams(1e-15), DetectorModel(0.01, 1e-3)).value ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(g2_auto(SourceParams(0.0), DetectorModel(0.01, 1e-3)).value ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(g2_auto(SourceParams(0.0), DetectorModel(0.5, 0.0)), IndeterminateRatio);
}

TEST_CASE("g2 taylor form") {
  CHECK(g2_auto_taylor(SourceParams(1e-12), DetectorModel(1e-3, 0.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g2_auto_taylor(SourceParams(0.5), DetectorModel(1.0, 0.0)) == doctest::Approx(1.5));
  CHECK(std::abs(g2_auto_taylor(SourceParams(0.1), kWeakDet) -
                 g2_auto(SourceParams(0.1), kWeakDet).value) < 1e-3);
}

TEST_CASE("conditional g2") {
  const auto opt = find_p_opt(MetricKind::g2_conditional, kWeakDet, 1);
  CHECK(opt.value > 0.5e-3);
  CHECK(opt.value < 2e-3);
  // herald from dark counts only: the field is the bare thermal marginal
  const double v = g2_conditional(SourceParams(1e-9), DetectorModel(0.01, 1e-3)).value;
  CHECK(v == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS_AS(g2_conditional(SourceParams(0.0), DetectorModel(0.5, 0.0)),
                  IndeterminateRatio);
}

TEST_CASE("cross correlation") {
  const double v = g2_cross(SourceParams(0.1), kWeakDet).value;
  CHECK(rel(v, 11.0) < 0.1);
  for (double p : {0.05, 0.3, 0.7}) {
    CHECK(g2_cross(SourceParams(p), DetectorModel(1.0, 0.0)).value ==
          doctest::Approx(1.0 / p).epsilon(1e-14));
    CHECK(g2_cross_no_dark(SourceParams(p), DetectorModel(1.0, 0.0)) ==
          doctest::Approx(1.0 / p).epsilon(1e-14));
    CHECK(g2_cross_no_dark(SourceParams(p), DetectorModel(0.3, 0.0)) ==
          doctest::Approx(g2_cross(SourceParams(p), DetectorModel(0.3, 0.0)).value)
              .epsilon(1e-13));
  }
  const auto opt = find_p_opt(MetricKind::g2_cross, kWeakDet, 1);
  CHECK(opt.value > 1250.0);
  CHECK(opt.value < 5000.0);
}

TEST_CASE("hom visibility") {
  CHECK(std::abs(v_hom(SourceParams(0.1), kWeakDet).value - 0.85) <= 0.01);
  CHECK(v_hom(SourceParams(1e-9), DetectorModel(0.3, 0.0)).value ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(v_hom(SourceParams(0.0), DetectorModel(0.3, 0.0)), IndeterminateRatio);
}

TEST_CASE("hom approximation error is second order in eta") {
  for (double p : {0.01, 0.1, 0.5}) {
    double prev = 0.0;
    for (double eta = 0.08; eta > 0.004; eta /= 2) {
      const SourceParams s(p);
      const DetectorModel d(eta, 0.0);
      const double err = std::abs(v_hom(s, d).value - v_hom_approx(s, d));
      if (prev > 0.0) CHECK(prev / err >= 3.5);
      prev = err;
    }
  }
}

TEST_CASE("bell visibility") {
  CHECK(std::abs(v_ent(SourceParams(0.1), kWeakDet).value - 0.83) <= 0.01);
  CHECK(v_ent(SourceParams(1e-12), DetectorModel(0.3, 0.0)).value ==
        doctest::Approx(1.0).epsilon(1e-10));
  for (double p : {0.01, 0.2, 0.6})
    for (double eta : {0.05, 0.5, 1.0})
      CHECK(v_ent_no_dark(SourceParams(p), DetectorModel(eta, 0.0)) ==
            doctest::Approx(v_ent(SourceParams(p), DetectorModel(eta, 0.0)).value)
                .epsilon(1e-13));
}

TEST_CASE("closed forms match the brute-force reference") {
  for (const auto& c : refvals::kCases) {
    for (MetricKind k : kPrimaryMetrics) {
      CAPTURE(to_string(k));
      CAPTURE(c.p);
      CAPTURE(c.n_modes);
      CHECK(rel(eval(k, c.p, c.eta, c.p_dc, c.n_modes), c.value(k)) < 1e-8);
    }
  }
}

TEST_CASE("multimode kernels reduce to the single-mode formulas") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lg(-6.0, 0.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  using Fn = double (*)(double, double, double);
  const std::pair<MetricKind, Fn> pairs[] = {
      {MetricKind::r_tilde, single_mode::r_tilde},
      {MetricKind::g2_auto, single_mode::g2_auto},
      {MetricKind::g2_conditional, single_mode::g2_conditional},
      {MetricKind::g2_cross, single_mode::g2_cross},
      {MetricKind::v_hom, single_mode::v_hom},
      {MetricKind::v_ent, single_mode::v_ent},
  };
  for (int i = 0; i < 300; ++i) {
    const double p = std::min(0.99, std::pow(10.0, lg(rng)));
    const double eta = std::max(1e-3, u(rng));
    const double pdc = u(rng) < 0.2 ? 0.0 : std::pow(10.0, lg(rng) - 1.0);
    for (auto [k, f] : pairs) {
      CAPTURE(to_string(k));
      CAPTURE(p);
      CAPTURE(eta);
      CAPTURE(pdc);
      CHECK(rel(eval(k, p, eta, pdc), f(p, eta, pdc)) <= 1e-14);
    }
  }
}

TEST_CASE("ideal detectors always violate cauchy-schwarz") {
  for (double p = 1e-4; p < 1.0; p *= 1.3)
    CHECK(r_tilde(SourceParams(p), DetectorModel(1.0, 0.0)).value >= 1.0);
}

TEST_CASE("range properties over the equivalence grid") {
  for (double p : {0.01, 0.1, 0.3, 0.5})
    for (double eta : {0.01, 0.2, 0.5, 1.0})
      for (double pdc : {0.0, 1e-4, 1e-2})
        for (int n : {1, 2, 5}) {
          CAPTURE(p);
          CAPTURE(eta);
          CAPTURE(pdc);
          CAPTURE(n);
          for (MetricKind k : {MetricKind::v_hom, MetricKind::v_ent}) {
            const double v = eval(k, p, eta, pdc, n);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
          }
          CHECK(eval(MetricKind::g2_cross, p, eta, pdc, n) >= 1.0);
        }
}

TEST_CASE("ideal moment metrics") {
  auto m = ideal_moments_metrics(0.1);
  CHECK(m.r == doctest::Approx(30.25).epsilon(1e-15));
  CHECK(m.g2 == 2.0);
  CHECK(m.g2_cross == doctest::Approx(11.0).epsilon(1e-15));
  CHECK(m.identity_residual < 1e-15);
  m = ideal_moments_metrics(1.0 / 3.0);
  CHECK(m.r == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(m.g2_cross == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(ideal_moments_metrics(0.5).g2_cross == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(ideal_moments_metrics(0.0), InvalidParameter);
  CHECK_THROWS_AS(ideal_moments_metrics(1.0), InvalidParameter);
}

TEST_CASE("evaluate dispatches every kind") {
  const MetricRequest req{SourceParams(0.1), kWeakDet, MetricKind::r_ideal};
  CHECK(evaluate(req).value == doctest::Approx(30.25));
  MetricRequest g2i = req;
  g2i.kind = MetricKind::g2_ideal;
  CHECK(evaluate(g2i).value == 2.0);
  MetricRequest gci = req;
  gci.kind = MetricKind::g2_cross_ideal;
  CHECK(evaluate(gci).value == doctest::Approx(11.0));
  MetricRequest va = req;
  va.kind = MetricKind::v_hom_approx;
  CHECK(evaluate(va).value == doctest::Approx(v_hom_approx(SourceParams(0.1), kWeakDet)));
}

TEST_CASE("optimum search") {
  const auto r = find_p_opt(MetricKind::r_tilde, kWeakDet, 1);
  CHECK(r.heuristic_p == doctest::Approx(1e-4));
  CHECK(r.near_heuristic);
  CHECK(r.p_opt > 1e-4 / 3);
  CHECK(r.p_opt < 3e-4);
  CHECK(r.value > 5e5);
  CHECK(r.value < 2e6);
  const auto g = find_p_opt(MetricKind::g2_conditional, kWeakDet, 1);
  CHECK(g.near_heuristic);
  CHECK(natural_objective(MetricKind::g2_conditional) == Objective::minimize);
  CHECK(natural_objective(MetricKind::v_ent) == Objective::maximize);
}

TEST_CASE("optimum search reports monotone metrics") {
  CHECK_THROWS_AS(find_p_opt(MetricKind::r_tilde, DetectorModel(0.01, 0.0), 1), NoExtremum);
  CHECK_THROWS_AS(find_p_opt(MetricKind::g2_cross, DetectorModel(0.5, 0.0), 1), NoExtremum);
  CHECK_THROWS_AS(find_p_opt(MetricKind::g2_auto, kWeakDet, 1), InvalidParameter);
}

TEST_CASE("p_bar reading of the multimode visibilities") {
  const SourceParams s = SourceParams::from_equivalent_p(0.3, 5);
  const DetectorModel d(0.2, 1e-4);
  // both readings agree at one mode, so only the multimode case separates them
  CHECK(v_hom_bare_p_reading(SourceParams(0.3), d) ==
        doctest::Approx(v_hom(SourceParams(0.3), d).value).epsilon(1e-13));
  CHECK(rel(v_hom_bare_p_reading(s, d), 0.62300723256846419) > 0.5);
  CHECK(rel(v_ent_bare_p_reading(s, d), 0.53548987771647391) > 0.5);
}

TEST_SUITE("visibility_optima") {
  TEST_CASE("hom visibility optimum with a weak detector") {
    const auto opt = find_p_opt(MetricKind::v_hom, kWeakDet, 1);
    INFO("p_opt = ", opt.p_opt, ", max = ", opt.value);
    CHECK(opt.value >= 0.97);
    CHECK(opt.value <= 0.99);
    CHECK(opt.p_opt > 1e-2 / 3);
    CHECK(opt.p_opt < 3e-2);
  }
  TEST_CASE("bell visibility optimum") {
    const auto opt = find_p_opt(MetricKind::v_ent, kWeakDet, 1);
    INFO("p_opt = ", opt.p_opt, ", max = ", opt.value);
    CHECK(opt.value >= 0.97);
    CHECK(opt.value <= 0.99);
  }
}
