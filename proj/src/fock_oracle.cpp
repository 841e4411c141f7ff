#include "pairchar/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pairchar {

namespace {

constexpr double kFloor = 1e-300;

struct Evaluation {
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double tail_mass = 0.0;
  int cutoff = 0;
  std::map<std::string, double> extra;
};

Evaluation ratio(double num, double den, const FockState& reference, const char* what) {
  if (!(std::abs(den) >= kFloor)) {
    throw IndeterminateRatio(std::string(what) + ": vanishing denominator in the oracle");
  }
  return {num / den, num, den, reference.tail_mass(), reference.cutoff(), {}};
}

void require_signal(const SourceParams& source, const DetectorModel& det, MetricKind kind) {
  if (source.p_bar() == 0.0 && det.p_dc() == 0.0) {
    throw IndeterminateRatio(std::string(to_string(kind)) +
                             ": no emission and no dark counts, every count rate vanishes");
  }
}

// Doubles the series order until the metric settles.
template <class Eval>
MetricValue adapt(MetricKind kind, const SourceParams& source, const CutoffPolicy& policy,
                  Eval&& eval) {
  int order = initial_order(source.p_bar(), policy);
  auto too_large = [&](int k) { return 2 * k > policy.max_total_photons; };
  if (too_large(order)) {
    throw CutoffTooSmall(std::string(to_string(kind)) + ": p_bar = " +
                         std::to_string(source.p_bar()) + " needs more than " +
                         std::to_string(policy.max_total_photons) + " photons");
  }
  Evaluation cur = eval(order);
  if (order > 0) {
    for (;;) {
      const int next = 2 * order;
      if (too_large(next)) {
        throw CutoffTooSmall(std::string(to_string(kind)) + ": not converged within " +
                             std::to_string(policy.max_total_photons) + " photons");
      }
      Evaluation refined = eval(next);
      const double change = std::abs(refined.value - cur.value);
      cur = std::move(refined);
      order = next;
      if (change <= policy.rel_tolerance * std::abs(cur.value)) break;
    }
  }
  MetricValue out{kind, cur.value, Provenance::oracle, std::move(cur.extra)};
  out.diagnostics["numerator"] = cur.numerator;
  out.diagnostics["denominator"] = cur.denominator;
  out.diagnostics["cutoff"] = cur.cutoff;
  // n_modes independent truncations
  const double tail = std::min(cur.tail_mass, 1.0);
  out.diagnostics["tail_mass"] = -std::expm1(source.n_modes() * std::log1p(-tail));
  return out;
}

constexpr double kNoTailLimit = std::numeric_limits<double>::infinity();

FockState split_arm(const FockState& tms, int arm) {
  return apply_beamsplitter(tms.with_vacuum_modes(1), arm, 2, 0.5);
}

}  // namespace

int initial_order(double p_bar, const CutoffPolicy& policy) {
  if (p_bar == 0.0) return 0;
  const double k = std::ceil(std::log(policy.start_tail * (1.0 - p_bar)) / std::log(p_bar));
  if (!(k < 1e6)) return std::numeric_limits<int>::max() / 4;
  return std::max(policy.min_order, static_cast<int>(k));
}

FockState two_mode_squeezed_state(double p, int order, double max_tail) {
  const PairTerm terms[] = {{0, 1, std::sqrt(p)}};
  return make_pair_exponential_state(terms, 2, std::sqrt(1.0 - p), order, max_tail);
}

FockState hom_dip_state(double p, int order, double max_tail) {
  return apply_beamsplitter(two_mode_squeezed_state(p, order, max_tail), 0, 1, 0.5);
}

FockState hom_delayed_state(double p, int order, double max_tail) {
  const double c = std::sqrt(p) / 2.0;
  const PairTerm terms[] = {{1, 0, c}, {1, 2, -c}, {3, 0, c}, {3, 2, -c}};
  return make_pair_exponential_state(terms, 4, std::sqrt(1.0 - p), order, max_tail);
}

FockState bell_state(double p, int order, double max_tail) {
  const double c = std::sqrt(p);
  const PairTerm terms[] = {{0, 3, c}, {1, 2, -c}};
  return make_pair_exponential_state(terms, 4, 1.0 - p, order, max_tail);
}

double setup_click_probability(const Setup& setup, const DetectorModel& det, int n_modes,
                               double prune) {
  if (n_modes < 1) throw InvalidParameter("n_modes must be at least 1");
  if (n_modes == 1) return detection_probability(setup.state, {setup.groups, det});
  const auto single = group_count_distribution(setup.state, setup.groups);
  return all_click_probability(convolution_power(single, n_modes, prune), det);
}

MetricValue oracle_r(const SourceParams& source, const DetectorModel& det,
                     const CutoffPolicy& policy) {
  require_signal(source, det, MetricKind::r_tilde);
  const int n = source.n_modes();
  return adapt(MetricKind::r_tilde, source, policy, [&](int order) {
    const FockState tms = two_mode_squeezed_state(source.p_bar(), order, kNoTailLimit);
    const double both =
        setup_click_probability({tms, {{0}, {1}}}, halved(det), n, policy.prune);
    const double auto_a =
        setup_click_probability({split_arm(tms, 0), {{0}, {2}}}, det, n, policy.prune);
    const double auto_b =
        setup_click_probability({split_arm(tms, 1), {{1}, {2}}}, det, n, policy.prune);
    return ratio(both * both, auto_a * auto_b, tms, "r_tilde");
  });
}

MetricValue oracle_g2(const SourceParams& source, const DetectorModel& det,
                      const CutoffPolicy& policy) {
  require_signal(source, det, MetricKind::g2_auto);
  const int n = source.n_modes();
  return adapt(MetricKind::g2_auto, source, policy, [&](int order) {
    const FockState tms = two_mode_squeezed_state(source.p_bar(), order, kNoTailLimit);
    const double coincidence =
        setup_click_probability({split_arm(tms, 0), {{0}, {2}}}, det, n, policy.prune);
    const double single = setup_click_probability({tms, {{0}}}, halved(det), n, policy.prune);
    return ratio(coincidence, single * single, tms, "g2_auto");
  });
}

MetricValue oracle_g2_conditional(const SourceParams& source, const DetectorModel& det,
                                  const CutoffPolicy& policy) {
  require_signal(source, det, MetricKind::g2_conditional);
  const int n = source.n_modes();
  return adapt(MetricKind::g2_conditional, source, policy, [&](int order) {
    const FockState tms = two_mode_squeezed_state(source.p_bar(), order, kNoTailLimit);
    const FockState split = split_arm(tms, 0);
    const double triple =
        setup_click_probability({split, {{0}, {2}, {1}}}, det, n, policy.prune);
    const double herald = setup_click_probability({tms, {{1}}}, det, n, policy.prune);
    const double pair = setup_click_probability({split, {{0}, {1}}}, det, n, policy.prune);
    Evaluation e = ratio(triple * herald, pair * pair, tms, "g2_conditional");
    e.extra["heralding_probability"] = herald;
    return e;
  });
}

MetricValue oracle_g2_cross(const SourceParams& source, const DetectorModel& det,
                            const CutoffPolicy& policy) {
  require_signal(source, det, MetricKind::g2_cross);
  const int n = source.n_modes();
  return adapt(MetricKind::g2_cross, source, policy, [&](int order) {
    const FockState tms = two_mode_squeezed_state(source.p_bar(), order, kNoTailLimit);
    const double both = setup_click_probability({tms, {{0}, {1}}}, det, n, policy.prune);
    const double a = setup_click_probability({tms, {{0}}}, det, n, policy.prune);
    const double b = setup_click_probability({tms, {{1}}}, det, n, policy.prune);
    return ratio(both, a * b, tms, "g2_cross");
  });
}

MetricValue oracle_v_hom(const SourceParams& source, const DetectorModel& det,
                         const CutoffPolicy& policy) {
  require_signal(source, det, MetricKind::v_hom);
  const int n = source.n_modes();
  return adapt(MetricKind::v_hom, source, policy, [&](int order) {
    const FockState dip = hom_dip_state(source.p_bar(), order, kNoTailLimit);
    const FockState delayed = hom_delayed_state(source.p_bar(), order, kNoTailLimit);
    const double p_dip = setup_click_probability({dip, {{0}, {1}}}, det, n, policy.prune);
    const double p_out =
        setup_click_probability({delayed, {{0, 1}, {2, 3}}}, det, n, policy.prune);
    Evaluation e = ratio(p_out - p_dip, p_out, delayed, "v_hom");
    e.extra["coincidence_dip"] = p_dip;
    e.extra["coincidence_out"] = p_out;
    return e;
  });
}

MetricValue oracle_v_ent(const SourceParams& source, const DetectorModel& det,
                         const CutoffPolicy& policy) {
  require_signal(source, det, MetricKind::v_ent);
  const int n = source.n_modes();
  return adapt(MetricKind::v_ent, source, policy, [&](int order) {
    const FockState bell = bell_state(source.p_bar(), order, kNoTailLimit);
    const double hv = setup_click_probability({bell, {{0}, {3}}}, det, n, policy.prune);
    const double hh = setup_click_probability({bell, {{0}, {2}}}, det, n, policy.prune);
    Evaluation e = ratio(hv - hh, hv + hh, bell, "v_ent");
    e.extra["coincidence_hv"] = hv;
    e.extra["coincidence_hh"] = hh;
    return e;
  });
}

MetricValue oracle_multimode(MetricKind kind, const SourceParams& source,
                             const DetectorModel& det, const CutoffPolicy& policy) {
  switch (kind) {
    case MetricKind::r_tilde: return oracle_r(source, det, policy);
    case MetricKind::g2_auto: return oracle_g2(source, det, policy);
    case MetricKind::g2_conditional: return oracle_g2_conditional(source, det, policy);
    case MetricKind::g2_cross: return oracle_g2_cross(source, det, policy);
    case MetricKind::v_hom: return oracle_v_hom(source, det, policy);
    case MetricKind::v_ent: return oracle_v_ent(source, det, policy);
    default:
      throw InvalidParameter("the oracle has no setup for " + std::string(to_string(kind)));
  }
}

NormalOrderedMoments ideal_normal_ordered_moments(const SourceParams& source,
                                                  const CutoffPolicy& policy) {
  if (source.p_bar() == 0.0) {
    throw InvalidParameter("normal-ordered moment ratios need p_bar > 0");
  }
  auto moments = [&](int order) {
    const FockState tms = two_mode_squeezed_state(source.p_bar(), order, kNoTailLimit);
    const std::vector<std::vector<int>> groups{{0}, {1}};
    const auto d = convolution_power(group_count_distribution(tms, groups), source.n_modes(),
                                     policy.prune);
    NormalOrderedMoments m{0, 0, 0, 0, 0, tms.cutoff(), d.tail_mass()};
    for (const auto& e : d.entries()) {
      const double na = e.counts[0];
      const double nb = e.counts[1];
      m.n_a += e.probability * na;
      m.n_b += e.probability * nb;
      m.aa += e.probability * na * (na - 1.0);
      m.bb += e.probability * nb * (nb - 1.0);
      m.ab += e.probability * na * nb;
    }
    return m;
  };
  int order = initial_order(source.p_bar(), policy);
  if (2 * order > policy.max_total_photons) {
    throw CutoffTooSmall("moments: p_bar too close to 1 for the photon ceiling");
  }
  NormalOrderedMoments cur = moments(order);
  for (;;) {
    const int next = 2 * order;
    if (2 * next > policy.max_total_photons) {
      throw CutoffTooSmall("moments: not converged within the photon ceiling");
    }
    NormalOrderedMoments refined = moments(next);
    const double change = std::max({std::abs(refined.n_a - cur.n_a) / refined.n_a,
                                    std::abs(refined.aa - cur.aa) / refined.aa,
                                    std::abs(refined.ab - cur.ab) / refined.ab});
    cur = refined;
    order = next;
    if (change <= policy.rel_tolerance) return cur;
  }
}

std::vector<SeriesIdentityCheck> check_series_identities(double p, double x, int max_order) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("identity checks need p in (0, 1)");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidParameter("identity checks need x in [0, 1]");
  CutoffPolicy policy;
  policy.start_tail = 1e-14;
  const int order = std::min(max_order, initial_order(p, policy));
  const FockState tms = two_mode_squeezed_state(p, order, kNoTailLimit);
  const FockState dip = hom_dip_state(p, order, kNoTailLimit);

  std::vector<SeriesIdentityCheck> out;
  const auto marginal = generating_moment(tms, {{0, x}});
  out.push_back({"marginal", p, x, (1.0 - p) / (1.0 - p * x), marginal.value, marginal.tail_mass});
  const auto joint = generating_moment(tms, {{0, x}, {1, x}});
  out.push_back({"joint", p, x, (1.0 - p) / (1.0 - p * x * x), joint.value, joint.tail_mass});
  const auto squeezed = generating_moment(dip, {{0, x}});
  out.push_back({"squeezed", p, x, 1.0 / std::sqrt(1.0 - p * x * x),
                 squeezed.value / std::sqrt(1.0 - p), squeezed.tail_mass});
  return out;
}

}  // namespace pairchar
