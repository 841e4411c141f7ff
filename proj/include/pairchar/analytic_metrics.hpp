#pragma once

#include "pairchar/core_model.hpp"

namespace pairchar {

/// Ideal Cauchy-Schwarz parameter of a two-mode squeezed state,
/// (1/4)(1 + 1/p)^2. Defined on (0, 1]; p = 0 diverges.
double r_ideal(double p);

// Detector-aware metrics. All use the multimode expressions with p_bar in
// every factor; for n_modes = 1 they coincide with the single-mode ones.
// Evaluated in binary128 and rounded to double.
MetricValue r_tilde(const SourceParams& source, const DetectorModel& det);
MetricValue g2_auto(const SourceParams& source, const DetectorModel& det);
MetricValue g2_conditional(const SourceParams& source, const DetectorModel& det);
MetricValue g2_cross(const SourceParams& source, const DetectorModel& det);
MetricValue v_hom(const SourceParams& source, const DetectorModel& det);
MetricValue v_ent(const SourceParams& source, const DetectorModel& det);

// Approximate and reduced single-mode forms (n_modes must be 1).

/// First order in eta and p_dc: (1 + (1/(2 n_a) - eta/4)(1 - 2 p_dc/(eta n_a)))^2.
double r_tilde_first_order(const SourceParams& source, const DetectorModel& det);
/// First order in p_dc: (2 - eta n_a/(1 + eta n_a))(1 - 2 p_dc/(eta n_a)).
double g2_auto_taylor(const SourceParams& source, const DetectorModel& det);
/// Dark-count-free cross-correlation 1 + (1/p)(1 - p)/(1 - p(1 - eta)^2).
double g2_cross_no_dark(const SourceParams& source, const DetectorModel& det);
/// Dark-count-free, first order in eta: (1+p)/(1+3p) + 2 p eta/(1+3p)^2.
double v_hom_approx(const SourceParams& source, const DetectorModel& det);
/// Dark-count-free Bell visibility (1 - p)/(1 + p - 2 p^2 (1 - eta)^2).
double v_ent_no_dark(const SourceParams& source, const DetectorModel& det);

struct IdealMetrics {
  double r;
  double g2;
  double g2_cross;
  /// |g2_cross - sqrt(r g2 g2)| relative to g2_cross.
  double identity_residual;
};

/// Ideal-detector values of a two-mode squeezed state: R, g2 = 2 and
/// g2_ab = 1 + 1/p. Throws if g2_ab = sqrt(R g2_a g2_b) fails to hold.
IdealMetrics ideal_moments_metrics(double p);

struct MetricRequest {
  SourceParams source;
  DetectorModel det;
  MetricKind kind;
};

/// Closed-form evaluation of any metric kind. Approximate and ideal kinds
/// return their value with provenance closed_form.
MetricValue evaluate(const MetricRequest& request);

enum class Objective { maximize, minimize };

/// Direction in which the metric improves: minimize for g2_conditional,
/// maximize for R_tilde, g2_cross and the visibilities.
Objective natural_objective(MetricKind kind);

struct Optimum {
  double p_opt;
  double value;
  /// p_dc / eta; zero when p_dc = 0.
  double heuristic_p;
  /// p_opt within a factor 3 of heuristic_p (always false when p_dc = 0).
  bool near_heuristic;
};

/// Extremum of the closed form over the equivalent single-mode emission
/// probability p in (1e-12, 1 - 1e-6). Log-grid bracketing followed by
/// golden-section search to relative p tolerance 1e-6. Throws NoExtremum if
/// the best grid point is an end of the interval.
Optimum find_p_opt(MetricKind kind, const DetectorModel& det, int n_modes,
                   Objective objective);
Optimum find_p_opt(MetricKind kind, const DetectorModel& det, int n_modes = 1);

/// Multimode visibilities with the bare equivalent p (instead of p_bar) in
/// the denominator factors that print it. Only for comparing the two
/// readings against the oracle.
double v_hom_bare_p_reading(const SourceParams& source, const DetectorModel& det);
double v_ent_bare_p_reading(const SourceParams& source, const DetectorModel& det);

/// The single-mode formulas transcribed term by term (binary128). Used as an
/// independent route to check the rearranged multimode kernels at N = 1.
namespace single_mode {
double r_tilde(double p, double eta, double p_dc);
double g2_auto(double p, double eta, double p_dc);
double g2_conditional(double p, double eta, double p_dc);
double g2_cross(double p, double eta, double p_dc);
double v_hom(double p, double eta, double p_dc);
double v_ent(double p, double eta, double p_dc);
}  // namespace single_mode

}  // namespace pairchar
