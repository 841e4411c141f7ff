#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pairchar/analytic_metrics.hpp"
#include "pairchar/core_model.hpp"
#include "pairchar/fock_state.hpp"

namespace pairchar {

struct CutoffPolicy {
  /// Stop doubling once successive values differ by less than this.
  double rel_tolerance = 1e-10;
  /// Tail target used to pick the first series order.
  double start_tail = 1e-16;
  int min_order = 8;
  /// Hard ceiling on the total photon number of one pair mode's state.
  int max_total_photons = 512;
  /// Convolution entries below this probability are dropped (N > 1 only).
  double prune = 1e-30;
};

/// First series order tried for emission probability p_bar.
int initial_order(double p_bar, const CutoffPolicy& policy);

// Pair-mode states behind each measurement, one per independent pair mode.

/// sqrt(1-p) exp(sqrt(p) a^dag b^dag)|00>, a = 0, b = 1.
FockState two_mode_squeezed_state(double p, int order, double max_tail = 1.0);
/// Two-mode squeezed state after a 50:50 splitter on the pair:
/// d = 0, dbar = 1.
FockState hom_dip_state(double p, int order, double max_tail = 1.0);
/// Pair split across two temporal modes: d_e = 0, d_l = 1, dbar_e = 2,
/// dbar_l = 3.
FockState hom_delayed_state(double p, int order, double max_tail = 1.0);
/// Polarization-entangled pairs: a_h = 0, a_v = 1, b_h = 2, b_v = 3.
FockState bell_state(double p, int order, double max_tail = 1.0);

/// A state plus the mode groups seen by each detector of the setup.
struct Setup {
  FockState state;
  std::vector<std::vector<int>> groups;
};

/// Probability that every detector of the setup clicks when n_modes
/// independent copies of the pair-mode state impinge on it. n_modes = 1 sums
/// over the state directly; larger n_modes convolve the per-group photon
/// number distributions.
double setup_click_probability(const Setup& setup, const DetectorModel& det, int n_modes,
                               double prune = 0.0);

MetricValue oracle_r(const SourceParams& source, const DetectorModel& det,
                     const CutoffPolicy& policy = {});
MetricValue oracle_g2(const SourceParams& source, const DetectorModel& det,
                      const CutoffPolicy& policy = {});
MetricValue oracle_g2_conditional(const SourceParams& source, const DetectorModel& det,
                                  const CutoffPolicy& policy = {});
MetricValue oracle_g2_cross(const SourceParams& source, const DetectorModel& det,
                            const CutoffPolicy& policy = {});
MetricValue oracle_v_hom(const SourceParams& source, const DetectorModel& det,
                         const CutoffPolicy& policy = {});
MetricValue oracle_v_ent(const SourceParams& source, const DetectorModel& det,
                         const CutoffPolicy& policy = {});

/// Dispatch over the six primary kinds; every oracle_* op already handles
/// n_modes > 1 by factorization.
MetricValue oracle_multimode(MetricKind kind, const SourceParams& source,
                             const DetectorModel& det, const CutoffPolicy& policy = {});

struct NormalOrderedMoments {
  double n_a;        // <a^dag a>
  double n_b;        // <b^dag b>
  double aa;         // <a^dag^2 a^2>
  double bb;         // <b^dag^2 b^2>
  double ab;         // <a^dag b^dag b a>
  int cutoff;
  double tail_mass;

  double r() const { return ab * ab / (aa * bb); }
  double g2_a() const { return aa / (n_a * n_a); }
  double g2_b() const { return bb / (n_b * n_b); }
  double g2_cross() const { return ab / (n_a * n_b); }
};

/// Photon-number moments of the whole (multimode) source. Throws
/// InvalidParameter when p_bar = 0 since the ratios are undefined.
NormalOrderedMoments ideal_normal_ordered_moments(const SourceParams& source,
                                                  const CutoffPolicy& policy = {});

struct SeriesIdentityCheck {
  std::string name;
  double p;
  double x;
  double expected;
  double computed;
  double tail_mass;

  double relative_deviation() const { return std::abs(computed - expected) / std::abs(expected); }
};

/// Generating-function checks on truncated states:
///   marginal  <x^{n_a}> = (1-p)/(1-px),
///   joint     <x^{n_a + n_b}> = (1-p)/(1-px^2),
///   squeezed  <x^{n_d}> / sqrt(1-p) = 1/sqrt(1-px^2) on one output of the dip state.
std::vector<SeriesIdentityCheck> check_series_identities(double p, double x,
                                                         int max_order = 256);

}  // namespace pairchar
