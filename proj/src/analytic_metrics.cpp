#include "pairchar/analytic_metrics.hpp"

#include <array>
#include <cmath>
#include <string>

#include <boost/multiprecision/float128.hpp>

#include "pairchar/metric_kernels.hpp"

namespace pairchar {

namespace {

using Quad = boost::multiprecision::float128;

constexpr double kFloor = 1e-300;

kernels::Inputs<Quad> quad_inputs(const SourceParams& source, const DetectorModel& det) {
  return {Quad(source.p_bar()), Quad(source.n_modes()), Quad(det.eta()), Quad(det.p_dc())};
}

void require_signal(const SourceParams& source, const DetectorModel& det, MetricKind kind) {
  if (source.p_bar() == 0.0 && det.p_dc() == 0.0) {
    throw IndeterminateRatio(std::string(to_string(kind)) +
                             ": no emission and no dark counts, every count rate vanishes");
  }
}

MetricValue finish(MetricKind kind, const kernels::Fraction<Quad>& f, bool squared) {
  const double num = static_cast<double>(f.numerator);
  const double den = static_cast<double>(f.denominator);
  if (std::abs(den) < kFloor) {
    if (squared && std::abs(num) >= kFloor) {
      throw DivergentMetric(std::string(to_string(kind)) + ": vanishing denominator");
    }
    throw IndeterminateRatio(std::string(to_string(kind)) + ": vanishing denominator");
  }
  const Quad ratio = f.numerator / f.denominator;
  MetricValue out{kind, static_cast<double>(squared ? ratio * ratio : ratio),
                  Provenance::closed_form, {}};
  out.diagnostics["numerator"] = num;
  out.diagnostics["denominator"] = den;
  return out;
}

void require_single_mode(const SourceParams& source, const char* what) {
  if (source.n_modes() != 1) {
    throw InvalidParameter(std::string(what) + " is a single-mode expression; n_modes must be 1");
  }
}

double mean_click_rate(const SourceParams& source, const DetectorModel& det, const char* what) {
  require_single_mode(source, what);
  const double x = det.eta() * source.mean_photons();
  if (!(x > 0.0)) {
    throw InvalidParameter(std::string(what) + " needs eta * n_a > 0");
  }
  return x;
}

}  // namespace

double r_ideal(double p) {
  if (p == 0.0) throw DivergentMetric("r_ideal diverges as p -> 0");
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidParameter("r_ideal needs p in (0, 1], got " + std::to_string(p));
  }
  const double s = 1.0 + 1.0 / p;
  return 0.25 * s * s;
}

MetricValue r_tilde(const SourceParams& source, const DetectorModel& det) {
  require_signal(source, det, MetricKind::r_tilde);
  return finish(MetricKind::r_tilde, kernels::r_tilde_sqrt(quad_inputs(source, det)), true);
}

MetricValue g2_auto(const SourceParams& source, const DetectorModel& det) {
  require_signal(source, det, MetricKind::g2_auto);
  return finish(MetricKind::g2_auto, kernels::g2_auto(quad_inputs(source, det)), false);
}

MetricValue g2_conditional(const SourceParams& source, const DetectorModel& det) {
  require_signal(source, det, MetricKind::g2_conditional);
  const auto in = quad_inputs(source, det);
  const Quad herald = kernels::ThermalArm<Quad>(in).click(in.eta);
  if (static_cast<double>(herald) < kFloor) {
    throw IndeterminateRatio("g2_conditional: heralding probability vanishes");
  }
  MetricValue out = finish(MetricKind::g2_conditional, kernels::g2_conditional(in), false);
  out.diagnostics["heralding_probability"] = static_cast<double>(herald);
  return out;
}

MetricValue g2_cross(const SourceParams& source, const DetectorModel& det) {
  require_signal(source, det, MetricKind::g2_cross);
  return finish(MetricKind::g2_cross, kernels::g2_cross(quad_inputs(source, det)), false);
}

MetricValue v_hom(const SourceParams& source, const DetectorModel& det) {
  require_signal(source, det, MetricKind::v_hom);
  return finish(MetricKind::v_hom, kernels::v_hom(quad_inputs(source, det)), false);
}

MetricValue v_ent(const SourceParams& source, const DetectorModel& det) {
  require_signal(source, det, MetricKind::v_ent);
  return finish(MetricKind::v_ent, kernels::v_ent(quad_inputs(source, det)), false);
}

double r_tilde_first_order(const SourceParams& source, const DetectorModel& det) {
  const double eta_n = mean_click_rate(source, det, "r_tilde_first_order");
  const double n_a = source.mean_photons();
  const double inner = 1.0 + (1.0 / (2.0 * n_a) - det.eta() / 4.0) * (1.0 - 2.0 * det.p_dc() / eta_n);
  return inner * inner;
}

double g2_auto_taylor(const SourceParams& source, const DetectorModel& det) {
  const double eta_n = mean_click_rate(source, det, "g2_auto_taylor");
  return (2.0 - eta_n / (1.0 + eta_n)) * (1.0 - 2.0 * det.p_dc() / eta_n);
}

double g2_cross_no_dark(const SourceParams& source, const DetectorModel& det) {
  require_single_mode(source, "g2_cross_no_dark");
  const double p = source.p_bar();
  if (p == 0.0) throw DivergentMetric("g2_cross_no_dark diverges as p -> 0");
  const double y = 1.0 - det.eta();
  return 1.0 + (1.0 / p) * ((1.0 - p) / (1.0 - p * y * y));
}

double v_hom_approx(const SourceParams& source, const DetectorModel& det) {
  require_single_mode(source, "v_hom_approx");
  const double p = source.p_bar();
  const double d = 1.0 + 3.0 * p;
  return (1.0 + p) / d + 2.0 * p * det.eta() / (d * d);
}

double v_ent_no_dark(const SourceParams& source, const DetectorModel& det) {
  require_single_mode(source, "v_ent_no_dark");
  const double p = source.p_bar();
  const double y = 1.0 - det.eta();
  return (1.0 - p) / (1.0 + p - 2.0 * p * p * y * y);
}

IdealMetrics ideal_moments_metrics(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidParameter("ideal metrics need p in (0, 1), got " + std::to_string(p));
  }
  IdealMetrics m{r_ideal(p), 2.0, 1.0 + 1.0 / p, 0.0};
  m.identity_residual = std::abs(m.g2_cross - std::sqrt(m.r * m.g2 * m.g2)) / m.g2_cross;
  if (m.identity_residual > 1e-14) {
    throw InvalidParameter("ideal identity g2_ab = sqrt(R g2_a g2_b) violated");
  }
  return m;
}

MetricValue evaluate(const MetricRequest& request) {
  const auto& [source, det, kind] = request;
  auto scalar = [&](double v) { return MetricValue{kind, v, Provenance::closed_form, {}}; };
  auto ideal_p = [&] {
    require_single_mode(source, "ideal metrics");
    return source.p_bar();
  };
  switch (kind) {
    case MetricKind::r_ideal: return scalar(r_ideal(ideal_p()));
    case MetricKind::r_tilde: return r_tilde(source, det);
    case MetricKind::r_tilde_first_order: return scalar(r_tilde_first_order(source, det));
    case MetricKind::g2_ideal: return scalar(ideal_moments_metrics(ideal_p()).g2);
    case MetricKind::g2_auto: return g2_auto(source, det);
    case MetricKind::g2_auto_taylor: return scalar(g2_auto_taylor(source, det));
    case MetricKind::g2_conditional: return g2_conditional(source, det);
    case MetricKind::g2_cross: return g2_cross(source, det);
    case MetricKind::g2_cross_ideal: return scalar(ideal_moments_metrics(ideal_p()).g2_cross);
    case MetricKind::g2_cross_no_dark: return scalar(g2_cross_no_dark(source, det));
    case MetricKind::v_hom: return v_hom(source, det);
    case MetricKind::v_hom_approx: return scalar(v_hom_approx(source, det));
    case MetricKind::v_ent: return v_ent(source, det);
    case MetricKind::v_ent_no_dark: return scalar(v_ent_no_dark(source, det));
  }
  throw InvalidParameter("unknown metric kind");
}

Objective natural_objective(MetricKind kind) {
  return kind == MetricKind::g2_conditional ? Objective::minimize : Objective::maximize;
}

Optimum find_p_opt(MetricKind kind, const DetectorModel& det, int n_modes) {
  return find_p_opt(kind, det, n_modes, natural_objective(kind));
}

Optimum find_p_opt(MetricKind kind, const DetectorModel& det, int n_modes,
                   Objective objective) {
  switch (kind) {
    case MetricKind::r_tilde:
    case MetricKind::g2_conditional:
    case MetricKind::g2_cross:
    case MetricKind::v_hom:
    case MetricKind::v_ent:
      break;
    default:
      throw InvalidParameter("find_p_opt supports r_tilde, g2_conditional, g2_cross, "
                             "v_hom and v_ent, got " + std::string(to_string(kind)));
  }
  const double sign = objective == Objective::maximize ? 1.0 : -1.0;
  auto score = [&](double log_p) {
    const auto source = SourceParams::from_equivalent_p(std::exp(log_p), n_modes);
    return sign * evaluate({source, det, kind}).value;
  };

  constexpr int kGrid = 361;
  const double lo = std::log(1e-12);
  const double hi = std::log1p(-1e-6);
  const double step = (hi - lo) / (kGrid - 1);
  int best = 0;
  double best_score = score(lo);
  for (int i = 1; i < kGrid; ++i) {
    const double s = score(lo + i * step);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  if (best == 0 || best == kGrid - 1) {
    throw NoExtremum(std::string(to_string(kind)) +
                     " is monotone on the search interval (extremum at its edge)");
  }

  // Golden-section search on log p.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo + (best - 1) * step;
  double b = lo + (best + 1) * step;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = score(c);
  double fd = score(d);
  while (b - a > 1e-6) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = score(d);
    }
  }
  const double log_p = fc > fd ? c : d;
  Optimum opt{std::exp(log_p), sign * std::max(fc, fd), 0.0, false};
  if (det.p_dc() > 0.0 && det.eta() > 0.0) {
    opt.heuristic_p = det.p_dc() / det.eta();
    const double ratio = opt.p_opt / opt.heuristic_p;
    opt.near_heuristic = ratio <= 3.0 && ratio >= 1.0 / 3.0;
  }
  return opt;
}

double v_hom_bare_p_reading(const SourceParams& source, const DetectorModel& det) {
  return static_cast<double>(kernels::printed::v_hom_bare_p(
      Quad(source.p_bar()), Quad(source.equivalent_p()), Quad(source.n_modes()),
      Quad(det.eta()), Quad(det.p_dc())));
}

double v_ent_bare_p_reading(const SourceParams& source, const DetectorModel& det) {
  return static_cast<double>(kernels::printed::v_ent_bare_p(
      Quad(source.p_bar()), Quad(source.equivalent_p()), Quad(source.n_modes()),
      Quad(det.eta()), Quad(det.p_dc())));
}

namespace single_mode {

#define PAIRCHAR_SINGLE_MODE(name)                                                   \
  double name(double p, double eta, double p_dc) {                                   \
    return static_cast<double>(kernels::printed::name(Quad(p), Quad(eta), Quad(p_dc))); \
  }

PAIRCHAR_SINGLE_MODE(r_tilde)
PAIRCHAR_SINGLE_MODE(g2_auto)
PAIRCHAR_SINGLE_MODE(g2_conditional)
PAIRCHAR_SINGLE_MODE(g2_cross)
PAIRCHAR_SINGLE_MODE(v_hom)
PAIRCHAR_SINGLE_MODE(v_ent)

#undef PAIRCHAR_SINGLE_MODE

}  // namespace single_mode

}  // namespace pairchar
