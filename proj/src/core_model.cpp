#include "pairchar/core_model.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace pairchar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DivergentMetric: return "DivergentMetric";
    case ErrorCode::IndeterminateRatio: return "IndeterminateRatio";
    case ErrorCode::NoExtremum: return "NoExtremum";
    case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorCode::InvalidMode: return "InvalidMode";
    case ErrorCode::DegenerateCounts: return "DegenerateCounts";
  }
  return "Unknown";
}

DetectorModel::DetectorModel(double eta, double p_dc) : eta_(eta), p_dc_(p_dc) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidParameter("detector efficiency must lie in [0, 1], got " +
                           std::to_string(eta));
  }
  if (!(p_dc >= 0.0 && p_dc < 1.0)) {
    throw InvalidParameter("dark-count probability must lie in [0, 1), got " +
                           std::to_string(p_dc));
  }
}

double no_click_prob(const DetectorModel& det, long n) {
  if (n < 0) throw InvalidParameter("photon number must be non-negative");
  if (n == 0) return 1.0 - det.p_dc();
  if (det.eta() == 1.0) return 0.0;
  return std::exp(std::log1p(-det.p_dc()) +
                  static_cast<double>(n) * std::log1p(-det.eta()));
}

double click_prob(const DetectorModel& det, long n) {
  if (n < 0) throw InvalidParameter("photon number must be non-negative");
  if (n == 0) return det.p_dc();
  if (det.eta() == 1.0) return 1.0;
  return -std::expm1(std::log1p(-det.p_dc()) +
                     static_cast<double>(n) * std::log1p(-det.eta()));
}

DetectorModel halved(const DetectorModel& det) {
  return DetectorModel(det.eta() / 2.0, det.p_dc());
}

SourceParams::SourceParams(double p_bar, int n_modes) : p_bar_(p_bar), n_modes_(n_modes) {
  if (!(p_bar >= 0.0 && p_bar < 1.0)) {
    throw InvalidParameter("emission probability must lie in [0, 1), got " +
                           std::to_string(p_bar));
  }
  if (n_modes < 1) {
    throw InvalidParameter("mode count must be positive, got " + std::to_string(n_modes));
  }
}

SourceParams SourceParams::from_equivalent_p(double p, int n_modes) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw InvalidParameter("emission probability must lie in [0, 1), got " +
                           std::to_string(p));
  }
  if (n_modes < 1) {
    throw InvalidParameter("mode count must be positive, got " + std::to_string(n_modes));
  }
  if (n_modes == 1) return SourceParams(p, 1);
  const double n = n_modes;
  return SourceParams(p / (n - p * (n - 1.0)), n_modes);
}

double SourceParams::mean_photons() const noexcept {
  return n_modes_ * p_bar_ / (1.0 - p_bar_);
}

double SourceParams::equivalent_p() const noexcept {
  if (n_modes_ == 1) return p_bar_;
  const double n = n_modes_;
  return n * p_bar_ / (1.0 + (n - 1.0) * p_bar_);
}

namespace {

constexpr std::array<std::pair<MetricKind, std::string_view>, 14> kMetricNames{{
    {MetricKind::r_ideal, "r_ideal"},
    {MetricKind::r_tilde, "r_tilde"},
    {MetricKind::r_tilde_first_order, "r_tilde_first_order"},
    {MetricKind::g2_ideal, "g2_ideal"},
    {MetricKind::g2_auto, "g2_auto"},
    {MetricKind::g2_auto_taylor, "g2_auto_taylor"},
    {MetricKind::g2_conditional, "g2_conditional"},
    {MetricKind::g2_cross, "g2_cross"},
    {MetricKind::g2_cross_ideal, "g2_cross_ideal"},
    {MetricKind::g2_cross_no_dark, "g2_cross_no_dark"},
    {MetricKind::v_hom, "v_hom"},
    {MetricKind::v_hom_approx, "v_hom_approx"},
    {MetricKind::v_ent, "v_ent"},
    {MetricKind::v_ent_no_dark, "v_ent_no_dark"},
}};

}  // namespace

std::string_view to_string(MetricKind kind) {
  for (const auto& [k, name] : kMetricNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric_kind(std::string_view name) {
  for (const auto& [k, n] : kMetricNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::closed_form: return "closed_form";
    case Provenance::oracle: return "oracle";
    case Provenance::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

std::optional<Provenance> parse_provenance(std::string_view name) {
  if (name == "closed_form") return Provenance::closed_form;
  if (name == "oracle") return Provenance::oracle;
  if (name == "monte_carlo") return Provenance::monte_carlo;
  return std::nullopt;
}

}  // namespace pairchar
