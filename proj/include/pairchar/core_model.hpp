#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "pairchar/errors.hpp"

namespace pairchar {

/// Click detector with overall efficiency eta (channel transmission folded
/// in) and dark-count probability p_dc per detection gate. One model is
/// shared by every detector of a setup.
class DetectorModel {
 public:
  DetectorModel(double eta, double p_dc);

  double eta() const noexcept { return eta_; }
  double p_dc() const noexcept { return p_dc_; }

  friend bool operator==(const DetectorModel&, const DetectorModel&) = default;

 private:
  double eta_;
  double p_dc_;
};

/// Probability that the detector clicks on an n-photon Fock state,
/// 1 - (1 - p_dc)(1 - eta)^n. Evaluated in the log domain so that small
/// click probabilities keep full relative precision.
double click_prob(const DetectorModel& det, long n);

/// Survival factor (1 - p_dc)(1 - eta)^n, the complement of click_prob.
double no_click_prob(const DetectorModel& det, long n);

/// Effective detector seen through one port of a 50:50 splitter.
DetectorModel halved(const DetectorModel& det);

/// Pair source: n_modes independent two-mode squeezed pairs, each with
/// emission probability p_bar.
class SourceParams {
 public:
  SourceParams(double p_bar, int n_modes = 1);

  /// Multimode source with the same mean photon number as a single-mode
  /// source of emission probability p.
  static SourceParams from_equivalent_p(double p, int n_modes);

  double p_bar() const noexcept { return p_bar_; }
  int n_modes() const noexcept { return n_modes_; }

  /// N p_bar / (1 - p_bar): mean photon number per arm.
  double mean_photons() const noexcept;
  /// Single-mode emission probability with the same mean photon number.
  double equivalent_p() const noexcept;

  friend bool operator==(const SourceParams&, const SourceParams&) = default;

 private:
  double p_bar_;
  int n_modes_;
};

enum class MetricKind {
  r_ideal,
  r_tilde,
  r_tilde_first_order,
  g2_ideal,
  g2_auto,
  g2_auto_taylor,
  g2_conditional,
  g2_cross,
  g2_cross_ideal,
  g2_cross_no_dark,
  v_hom,
  v_hom_approx,
  v_ent,
  v_ent_no_dark,
};

/// The six detector-aware metrics every engine (closed form, oracle,
/// Monte Carlo) can evaluate.
inline constexpr MetricKind kPrimaryMetrics[] = {
    MetricKind::r_tilde,  MetricKind::g2_auto, MetricKind::g2_conditional,
    MetricKind::g2_cross, MetricKind::v_hom,   MetricKind::v_ent,
};

std::string_view to_string(MetricKind kind);
std::optional<MetricKind> parse_metric_kind(std::string_view name);

enum class Provenance { closed_form, oracle, monte_carlo };

std::string_view to_string(Provenance provenance);
std::optional<Provenance> parse_provenance(std::string_view name);

struct MetricValue {
  MetricKind kind;
  double value = 0.0;
  Provenance provenance = Provenance::closed_form;
  /// Engine-specific extras: "cutoff", "tail_mass", "std_error", ...
  std::map<std::string, double> diagnostics;
};

}  // namespace pairchar
