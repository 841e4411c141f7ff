#include <doctest.h>

#include <cmath>
#include <random>

#include "pairchar/core_model.hpp"

using namespace pairchar;

TEST_CASE("click probability at the trivial points") {
  CHECK(click_prob(DetectorModel(1.0, 0.0), 1) == 1.0);
  const DetectorModel det(0.3, 0.02);
  CHECK(click_prob(det, 0) == 0.02);
  CHECK(no_click_prob(det, 0) == doctest::Approx(0.98).epsilon(1e-15));
}

TEST_CASE("click probability for three photons on a weak detector") {
  const double expected = 1.0 - (1.0 - 1e-6) * 0.99 * 0.99 * 0.99;
  const double got = click_prob(DetectorModel(0.01, 1e-6), 3);
  CHECK(std::abs(got - expected) <= 1e-14 * expected);
  CHECK(got == doctest::Approx(0.0297019703).epsilon(1e-9));
}

TEST_CASE("click probability saturates to exactly one") {
  CHECK(click_prob(DetectorModel(0.5, 0.0), 5000) == 1.0);
  CHECK(click_prob(DetectorModel(0.5, 0.3), 100000) == 1.0);
}

TEST_CASE("click probability keeps relative precision for faint signals") {
  // 1 - (1 - 1e-12) = 1e-12 would lose four digits done naively
  const double got = click_prob(DetectorModel(1e-12, 0.0), 1);
  CHECK(got == doctest::Approx(1e-12).epsilon(1e-15));
}

TEST_CASE("click probability is monotone in each argument") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<long> photons(0, 200);
  for (int i = 0; i < 2000; ++i) {
    const double eta = u(rng);
    const double pdc = 0.999 * u(rng);
    const long n = photons(rng);
    const DetectorModel det(eta, pdc);
    const double base = click_prob(det, n);
    CHECK(click_prob(det, n + 1) >= base);
    CHECK(click_prob(DetectorModel(std::min(1.0, eta + 0.01), pdc), n) >= base);
    CHECK(click_prob(DetectorModel(eta, std::min(0.999, pdc + 0.001)), n) >= base);
  }
}

TEST_CASE("detector parameters are validated") {
  CHECK_THROWS_AS(DetectorModel(-0.1, 0.0), InvalidParameter);
  CHECK_THROWS_AS(DetectorModel(1.1, 0.0), InvalidParameter);
  CHECK_THROWS_AS(DetectorModel(0.5, 1.0), InvalidParameter);
  CHECK_THROWS_AS(DetectorModel(0.5, -1e-9), InvalidParameter);
  CHECK_THROWS_AS(DetectorModel(std::nan(""), 0.0), InvalidParameter);
  CHECK_NOTHROW(DetectorModel(0.0, 0.0));
  CHECK_NOTHROW(DetectorModel(1.0, 0.999));
}

TEST_CASE("halved detector") {
  CHECK(halved(DetectorModel(0.5, 0.01)) == DetectorModel(0.25, 0.01));
  CHECK(halved(DetectorModel(1.0, 0.0)) == DetectorModel(0.5, 0.0));
  CHECK(halved(halved(DetectorModel(0.8, 0.0))).eta() == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("source parameters") {
  CHECK(SourceParams(0.0).mean_photons() == 0.0);
  CHECK(SourceParams(0.2, 3).mean_photons() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(SourceParams(1.0), InvalidParameter);
  CHECK_THROWS_AS(SourceParams(-0.1), InvalidParameter);
  CHECK_THROWS_AS(SourceParams(0.1, 0), InvalidParameter);
  CHECK(SourceParams::from_equivalent_p(0.37, 1).p_bar() == 0.37);
}

TEST_CASE("equivalent p round trip") {
  for (int n : {1, 2, 3, 5, 10, 50}) {
    for (double p : {1e-9, 1e-4, 0.01, 0.1, 0.3, 0.5, 0.9, 0.999}) {
      const auto s = SourceParams::from_equivalent_p(p, n);
      CHECK(s.p_bar() == doctest::Approx(p / (n - p * (n - 1))).epsilon(1e-15));
      CHECK(std::abs(s.equivalent_p() - p) <= 1e-14 * p);
    }
  }
}

TEST_CASE("mean photon number is preserved across mode counts") {
  // p = 1/2 gives p_bar = 1/(N+1) and a mean of exactly 1
  for (int n = 1; n <= 10; ++n) {
    const auto s = SourceParams::from_equivalent_p(0.5, n);
    CHECK(s.p_bar() == doctest::Approx(1.0 / (n + 1)).epsilon(2e-16));
    CHECK(s.mean_photons() == doctest::Approx(1.0).epsilon(4e-16));
  }
}

TEST_CASE("metric and provenance names round trip") {
  for (auto k : {MetricKind::r_ideal, MetricKind::r_tilde, MetricKind::g2_conditional,
                 MetricKind::v_ent_no_dark, MetricKind::g2_cross_ideal}) {
    CHECK(parse_metric_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_metric_kind("nope").has_value());
  for (auto p : {Provenance::closed_form, Provenance::oracle, Provenance::monte_carlo}) {
    CHECK(parse_provenance(to_string(p)) == p);
  }
  CHECK(to_string(ErrorCode::DegenerateCounts) == "DegenerateCounts");
}
