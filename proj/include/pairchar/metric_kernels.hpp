#pragma once

// Closed-form click-detector metrics, templated on the scalar type.
//
// Every metric is a combination of arm generating functions
//   S(x) = E[x^n] = ((1 - p_bar) / (1 - p_bar x))^N
// for thermal arms of N independent pair modes. The textbook combinations
// 1 - 2 q S(x1) + q^2 S(x2) cancel catastrophically at small eta and p, so
// they are rewritten as (1 - q S(x1))^2 + q^2 S(x1)^2 [S(x2)/S(x1)^2 - 1] with
// the bracket evaluated through the exact identity
//   (1 - p_bar x1)^2 - (1 - p_bar)(1 - p_bar x2)
//       = p_bar (1 - 2 x1 + x2) + p_bar^2 (x1^2 - x2),
// whose coefficients are supplied in closed form in terms of eta. Every term
// is then non-negative. The three-detector expectation of the heralded
// auto-correlation has no such rearrangement and is left to the scalar
// type's precision.

#include <cmath>

namespace pairchar::kernels {

template <class S>
struct Inputs {
  S p_bar;
  S n_modes;
  S eta;
  S p_dc;
};

template <class S>
struct Fraction {
  S numerator;
  S denominator;
};

/// Photon-number statistics of one arm: N thermal modes of parameter p_bar.
template <class S>
class ThermalArm {
 public:
  explicit ThermalArm(const Inputs<S>& in)
      : p_bar_(in.p_bar), n_(in.n_modes), q_(S(1) - in.p_dc) {
    using std::log1p;
    log_q_ = log1p(-in.p_dc);
  }

  const S& q() const { return q_; }

  /// log E[x^n] for x = 1 - c.
  S log_survival(const S& c) const {
    using std::log1p;
    return n_ * log1p(-p_bar_ * c / (S(1) - p_bar_ + p_bar_ * c));
  }

  /// E[x^n] for x = 1 - c.
  S survival(const S& c) const {
    using std::exp;
    return exp(log_survival(c));
  }

  /// 1 - (1 - p_dc) E[x^n]: click probability of a detector with survival x
  /// per photon.
  S click(const S& c) const {
    using std::expm1;
    return -expm1(log_q_ + log_survival(c));
  }

  /// [S(x2) / S(x1)^2]^power - 1, given the identity coefficients
  /// a = 1 - 2 x1 + x2 and b = x1^2 - x2 and the complement c2 = 1 - x2.
  S excess(const S& a, const S& b, const S& c2, const S& power = S(1)) const {
    using std::expm1;
    using std::log1p;
    const S delta = (p_bar_ * a + p_bar_ * p_bar_ * b) /
                    ((S(1) - p_bar_) * (S(1) - p_bar_ + p_bar_ * c2));
    return expm1(power * n_ * log1p(delta));
  }

  /// S(x1 x2) / (S(x1) S(x2)) - 1 for complements c1, c2 (c12 = 1 - x1 x2).
  S joint_excess(const S& c1, const S& c2, const S& c12) const {
    using std::expm1;
    using std::log1p;
    const S delta = p_bar_ * c1 * c2 / ((S(1) - p_bar_) * (S(1) - p_bar_ + p_bar_ * c12));
    return expm1(n_ * log1p(delta));
  }

 private:
  S p_bar_;
  S n_;
  S q_;
  S log_q_;
};

// Complements 1 - x of the survival factors that appear in the metrics.
template <class S>
struct Complements {
  explicit Complements(const S& eta)
      : half(eta / 2),
        full(eta),
        half_sq(eta * (S(1) - eta / 4)),
        full_sq(eta * (S(2) - eta)),
        half_full(eta * (S(3) - eta) / 2) {}
  S half;       // 1 - (1 - eta/2)
  S full;       // 1 - (1 - eta)
  S half_sq;    // 1 - (1 - eta/2)^2
  S full_sq;    // 1 - (1 - eta)^2
  S half_full;  // 1 - (1 - eta/2)(1 - eta)
};

/// <D_a(eta/2) D_b(eta/2)>: coincidence between the twin arms at halved
/// efficiency.
template <class S>
S halved_coincidence(const Inputs<S>& in) {
  const ThermalArm<S> arm(in);
  const Complements<S> c(in.eta);
  const S& q = arm.q();
  const S a = arm.survival(c.half);
  const S one_a = arm.click(c.half);
  return one_a * one_a +
         q * q * a * a * arm.excess(in.eta * in.eta / 4, S(0), c.half_sq);
}

/// <D_d(eta) D_dbar(eta)> after splitting one arm on a 50:50 beamsplitter.
template <class S>
S split_coincidence(const Inputs<S>& in) {
  const ThermalArm<S> arm(in);
  const Complements<S> c(in.eta);
  const S& q = arm.q();
  const S a = arm.survival(c.half);
  const S one_a = arm.click(c.half);
  return one_a * one_a + q * q * a * a * arm.excess(S(0), in.eta * in.eta / 4, c.full);
}

template <class S>
Fraction<S> r_tilde_sqrt(const Inputs<S>& in) {
  return {halved_coincidence(in), split_coincidence(in)};
}

template <class S>
Fraction<S> g2_auto(const Inputs<S>& in) {
  const ThermalArm<S> arm(in);
  const S single = arm.click(Complements<S>(in.eta).half);
  return {split_coincidence(in), single * single};
}

template <class S>
Fraction<S> g2_cross(const Inputs<S>& in) {
  const ThermalArm<S> arm(in);
  const Complements<S> c(in.eta);
  const S& q = arm.q();
  const S y = arm.survival(c.full);
  const S one_y = arm.click(c.full);
  const S coincidence =
      one_y * one_y + q * q * y * y * arm.excess(in.eta * in.eta, S(0), c.full_sq);
  return {coincidence, one_y * one_y};
}

/// Heralded auto-correlation through the joint-expectation identity
/// <D_d D_dbar D_b><D_b> / <D_a(eta/2) D_b>^2.
template <class S>
Fraction<S> g2_conditional(const Inputs<S>& in) {
  const ThermalArm<S> arm(in);
  const Complements<S> c(in.eta);
  const S& q = arm.q();
  const S s_h = arm.survival(c.half);
  const S s_y = arm.survival(c.full);
  const S s_hy = arm.survival(c.half_full);
  const S s_yy = arm.survival(c.full_sq);
  const S herald = arm.click(c.full);
  const S single_herald =
      arm.click(c.half) * herald + q * q * s_h * s_y * arm.joint_excess(c.half, c.full, c.half_full);
  const S triple = S(1) - 2 * q * s_h - q * s_y + q * q * s_y + 2 * q * q * s_hy -
                   q * q * q * s_yy;
  return {triple * herald, single_herald * single_herald};
}

template <class S>
Fraction<S> v_hom(const Inputs<S>& in) {
  using std::expm1;
  const ThermalArm<S> arm(in);
  const Complements<S> c(in.eta);
  const S& q = arm.q();
  const S& eta = in.eta;
  // x1 = (1 - eta/2)^2, x2 = (1 - eta)^2
  const S x1 = (S(1) - eta / 2) * (S(1) - eta / 2);
  const S a = eta * eta / 2;
  const S b = eta * eta / 4 * (x1 + (S(1) - eta));
  const S w = arm.survival(c.half_sq);
  const S one_w = arm.click(c.half_sq);
  // dip arm: per-detector survival is sqrt(S(x2)), so its excess over S(x1)
  // carries half the exponent
  const S numerator = 2 * q * w * arm.excess(a, b, c.full_sq, S(1) / 2);
  const S denominator = one_w * one_w + q * q * w * w * arm.excess(a, b, c.full_sq);
  return {numerator, denominator};
}

template <class S>
Fraction<S> v_ent(const Inputs<S>& in) {
  const ThermalArm<S> arm(in);
  const Complements<S> c(in.eta);
  const S& q = arm.q();
  const S y = arm.survival(c.full);
  const S one_y = arm.click(c.full);
  const S correlated = q * q * y * y * arm.excess(in.eta * in.eta, S(0), c.full_sq);
  return {correlated, 2 * one_y * one_y + correlated};
}

/// Single-mode expressions transcribed term by term, without any
/// rearrangement. Used as the second route in the equivalence tests and for
/// the multimode denominator-reading comparison.
namespace printed {

template <class S>
S geometric(const S& p, const S& x) {
  return (S(1) - p) / (S(1) - p * x);
}

template <class S>
S r_tilde(const S& p, const S& eta, const S& p_dc) {
  const S q = S(1) - p_dc;
  const S h = S(1) - eta / 2;
  const S y = S(1) - eta;
  const S ratio = (S(1) - 2 * q * geometric(p, h) + q * q * geometric(p, h * h)) /
                  (S(1) - 2 * q * geometric(p, h) + q * q * geometric(p, y));
  return ratio * ratio;
}

template <class S>
S g2_auto(const S& p, const S& eta, const S& p_dc) {
  const S q = S(1) - p_dc;
  const S h = S(1) - eta / 2;
  const S y = S(1) - eta;
  const S single = S(1) - q * geometric(p, h);
  return (S(1) - 2 * q * geometric(p, h) + q * q * geometric(p, y)) / (single * single);
}

template <class S>
S g2_conditional(const S& p, const S& eta, const S& p_dc) {
  const S q = S(1) - p_dc;
  const S h = S(1) - eta / 2;
  const S y = S(1) - eta;
  const S herald = S(1) - q * (S(1) - p) / (S(1) - p * y);
  auto zeta = [&](const S& x) {
    return ((S(1) - p) / (S(1) - p * x) - q * (S(1) - p) / (S(1) - p * y * x)) / herald;
  };
  const S single = S(1) - q * zeta(h);
  return (S(1) - 2 * q * zeta(h) + q * q * zeta(y)) / (single * single);
}

template <class S>
S g2_cross(const S& p, const S& eta, const S& p_dc) {
  const S q = S(1) - p_dc;
  const S y = S(1) - eta;
  const S single = S(1) - q * geometric(p, y);
  return (S(1) - 2 * q * geometric(p, y) + q * q * geometric(p, y * y)) / (single * single);
}

template <class S>
S v_hom(const S& p, const S& eta, const S& p_dc) {
  using std::sqrt;
  const S q = S(1) - p_dc;
  const S h2 = (S(1) - eta / 2) * (S(1) - eta / 2);
  const S y2 = (S(1) - eta) * (S(1) - eta);
  return 2 * q * (sqrt(geometric(p, y2)) - geometric(p, h2)) /
         (S(1) - 2 * q * geometric(p, h2) + q * q * geometric(p, y2));
}

template <class S>
S v_ent(const S& p, const S& eta, const S& p_dc) {
  const S q = S(1) - p_dc;
  const S y = S(1) - eta;
  const S g = geometric(p, y);
  const S g2 = geometric(p, y * y);
  return (q * q * g2 - q * q * g * g) / (S(2) - 4 * q * g + q * q * g2 + q * q * g * g);
}

/// Multimode HOM visibility with the bare single-mode p in the last
/// denominator factor, i.e. the alternative reading of the printed formula.
template <class S>
S v_hom_bare_p(const S& p_bar, const S& p, const S& n, const S& eta, const S& p_dc) {
  using std::pow;
  const S q = S(1) - p_dc;
  const S h2 = (S(1) - eta / 2) * (S(1) - eta / 2);
  const S y2 = (S(1) - eta) * (S(1) - eta);
  const S num = 2 * q * (pow(geometric(p_bar, y2), n / 2) - pow(geometric(p_bar, h2), n));
  const S den = S(1) - 2 * q * pow(geometric(p_bar, h2), n) +
                q * q * pow(S(1) - p_bar, n) / pow(S(1) - p * y2, n);
  return num / den;
}

/// Multimode Bell visibility with the bare p in the two last denominator
/// factors.
template <class S>
S v_ent_bare_p(const S& p_bar, const S& p, const S& n, const S& eta, const S& p_dc) {
  using std::pow;
  const S q = S(1) - p_dc;
  const S y = S(1) - eta;
  const S g = pow(geometric(p_bar, y), n);
  const S g2 = pow(geometric(p_bar, y * y), n);
  const S num = q * q * g2 - q * q * g * g;
  const S den = S(2) - 4 * q * g + q * q * pow(S(1) - p_bar, n) / pow(S(1) - p * y * y, n) +
                q * q * pow(S(1) - p_bar, 2 * n) / pow(S(1) - p * y, 2 * n);
  return num / den;
}

}  // namespace printed

}  // namespace pairchar::kernels
