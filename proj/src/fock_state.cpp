#include "pairchar/fock_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace pairchar {

namespace {

using AmplitudeMap = std::unordered_map<std::uint64_t, Amplitude>;
// The series terms mix signs across modes; extended precision keeps the
// rounding well below the truncation tail.
using WideAmplitude = std::complex<long double>;
using WideAmplitudeMap = std::unordered_map<std::uint64_t, WideAmplitude>;

std::vector<FockTerm> sorted_terms(const AmplitudeMap& map) {
  std::vector<FockTerm> out;
  out.reserve(map.size());
  for (const auto& [key, amp] : map) {
    if (amp != Amplitude(0.0, 0.0)) out.push_back({Occupation::from_packed(key), amp});
  }
  std::sort(out.begin(), out.end(),
            [](const FockTerm& a, const FockTerm& b) { return a.occupation < b.occupation; });
  return out;
}

void check_mode(int mode, int mode_count) {
  if (mode < 0 || mode >= mode_count) {
    throw InvalidMode("mode index " + std::to_string(mode) + " outside [0, " +
                      std::to_string(mode_count) + ")");
  }
}

}  // namespace

Occupation::Occupation(std::span<const int> counts) {
  if (counts.size() > static_cast<std::size_t>(kMaxModes)) {
    throw InvalidMode("at most " + std::to_string(kMaxModes) + " modes are supported");
  }
  for (std::size_t m = 0; m < counts.size(); ++m) {
    if (counts[m] < 0 || counts[m] > kMaxPhotonsPerMode) {
      throw InvalidParameter("occupation out of range: " + std::to_string(counts[m]));
    }
    bits_ |= static_cast<std::uint64_t>(counts[m]) << (kBits * m);
  }
}

Occupation Occupation::with(int mode, int count) const {
  if (count < 0 || count > kMaxPhotonsPerMode) {
    throw CutoffTooSmall("photon number " + std::to_string(count) +
                         " exceeds the per-mode capacity");
  }
  Occupation o = *this;
  o.bits_ &= ~(kMask << (kBits * mode));
  o.bits_ |= static_cast<std::uint64_t>(count) << (kBits * mode);
  return o;
}

Occupation Occupation::shifted(int mode, int delta) const {
  return with(mode, (*this)[mode] + delta);
}

int Occupation::total() const noexcept {
  int n = 0;
  for (int m = 0; m < kMaxModes; ++m) n += (*this)[m];
  return n;
}

FockState::FockState(int mode_count, std::vector<FockTerm> terms, int cutoff, double tail_mass)
    : mode_count_(mode_count), terms_(std::move(terms)), cutoff_(cutoff), tail_mass_(tail_mass) {
  if (mode_count < 1 || mode_count > kMaxModes) {
    throw InvalidMode("mode count must lie in [1, " + std::to_string(kMaxModes) + "]");
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const FockTerm& a, const FockTerm& b) { return a.occupation < b.occupation; });
  for (const auto& t : terms_) {
    if (t.occupation.total() > cutoff_) {
      throw InvalidParameter("term exceeds the state's photon cutoff");
    }
    for (int m = mode_count_; m < kMaxModes; ++m) {
      if (t.occupation[m] != 0) throw InvalidMode("term occupies a mode beyond mode_count");
    }
  }
}

FockState FockState::vacuum(int mode_count) {
  return FockState(mode_count, {{Occupation{}, Amplitude(1.0, 0.0)}}, 0, 0.0);
}

Amplitude FockState::amplitude(const Occupation& occupation) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), occupation,
      [](const FockTerm& t, const Occupation& o) { return t.occupation < o; });
  if (it != terms_.end() && it->occupation == occupation) return it->amplitude;
  return {0.0, 0.0};
}

double FockState::norm_squared() const {
  long double s = 0.0L;
  for (const auto& t : terms_) s += std::norm(std::complex<long double>(t.amplitude));
  return static_cast<double>(s);
}

FockState FockState::with_vacuum_modes(int extra) const {
  return FockState(mode_count_ + extra, terms_, cutoff_, tail_mass_);
}

FockState make_pair_exponential_state(std::span<const PairTerm> terms, int mode_count,
                                      Amplitude norm, int order, double max_tail) {
  if (order < 0) throw InvalidParameter("series order must be non-negative");
  for (const auto& t : terms) {
    check_mode(t.mode_i, mode_count);
    check_mode(t.mode_j, mode_count);
    if (!(std::abs(t.coefficient) < 1.0)) {
      throw InvalidParameter("pair coefficients must have magnitude below 1");
    }
  }
  if (2 * order > kMaxPhotonsPerMode) {
    throw CutoffTooSmall("series order " + std::to_string(order) + " exceeds mode capacity");
  }

  // phi_k = (1/k) Q^dag phi_{k-1}, the k-th term of exp(Q^dag)|0>. Every
  // pair term adds two photons, so the orders never share an occupation.
  struct Coefficient {
    long double re, im;
  };
  std::vector<Coefficient> coeffs;
  for (const auto& t : terms) coeffs.push_back({t.coefficient.real(), t.coefficient.imag()});
  std::vector<FockTerm> kept{{Occupation(), norm}};
  WideAmplitudeMap current{{0, WideAmplitude(norm.real(), norm.imag())}};
  double last_weight = std::norm(norm);
  double dropped_weight = 0.0;
  for (int k = 1; k <= order + 1 && !terms.empty(); ++k) {
    WideAmplitudeMap next;
    next.reserve(current.size() * 2 + 16);
    for (const auto& [key, amp] : current) {
      const Occupation occ = Occupation::from_packed(key);
      const long double ar = amp.real(), ai = amp.imag();
      for (std::size_t n = 0; n < terms.size(); ++n) {
        const auto& t = terms[n];
        const int ni = occ[t.mode_i];
        long double factor;
        Occupation raised;
        if (t.mode_i == t.mode_j) {
          factor = std::sqrt((ni + 1.0L) * (ni + 2.0L)) / k;
          raised = occ.shifted(t.mode_i, 2);
        } else {
          const int nj = occ[t.mode_j];
          factor = std::sqrt((ni + 1.0L) * (nj + 1.0L)) / k;
          raised = occ.shifted(t.mode_i, 1).shifted(t.mode_j, 1);
        }
        const Coefficient& c = coeffs[n];
        auto& slot = next[raised.packed()];
        slot = {slot.real() + factor * (ar * c.re - ai * c.im),
                slot.imag() + factor * (ar * c.im + ai * c.re)};
      }
    }
    long double wide_weight = 0.0L;
    for (const auto& [key, amp] : next) wide_weight += amp.real() * amp.real() + amp.imag() * amp.imag();
    const double weight = static_cast<double>(wide_weight);
    if (k == order + 1) {
      dropped_weight = weight;
      break;
    }
    for (const auto& [key, amp] : next) {
      const Amplitude a(static_cast<double>(amp.real()), static_cast<double>(amp.imag()));
      if (a != Amplitude(0.0, 0.0)) kept.push_back({Occupation::from_packed(key), a});
    }
    current = std::move(next);
    last_weight = weight;
  }

  double tail = 0.0;
  if (dropped_weight > 0.0) {
    const double ratio = last_weight > 0.0 ? dropped_weight / last_weight
                                           : std::numeric_limits<double>::infinity();
    tail = ratio < 1.0 ? dropped_weight / (1.0 - ratio) : std::numeric_limits<double>::infinity();
  }
  if (tail > max_tail) {
    throw CutoffTooSmall("series order " + std::to_string(order) + " leaves tail mass " +
                         std::to_string(tail) + " above " + std::to_string(max_tail));
  }
  return FockState(mode_count, std::move(kept), terms.empty() ? 0 : 2 * order, tail);
}

namespace {

// Images of |m, n> under the splitter, built one creation operator at a time
// so every intermediate vector stays normalized. The closed binomial sum
// cancels catastrophically beyond about a hundred photons.
class SplitterImages {
 public:
  explicit SplitterImages(double t) : st_(std::sqrt(t)), ct_(std::sqrt(1.0 - t)) {}

  // Entry k holds the amplitude on |k, m + n - k>.
  const std::vector<double>& get(int m, int n) {
    const std::uint64_t key = (static_cast<std::uint64_t>(m) << 32) | static_cast<unsigned>(n);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    std::vector<double> out;
    if (m == 0 && n == 0) {
      out = {1.0};
    } else {
      const bool raise_j = n >= m;
      const std::vector<double>& base = raise_j ? get(m, n - 1) : get(m - 1, n);
      // a_i^dag -> st d_i^dag + ct d_j^dag, a_j^dag -> ct d_i^dag - st d_j^dag
      const double to_i = raise_j ? ct_ : st_;
      const double to_j = raise_j ? -st_ : ct_;
      const int s = m + n;
      out.assign(static_cast<std::size_t>(s) + 1, 0.0);
      for (int k = 0; k <= s; ++k) {
        double v = 0.0;
        if (k > 0) v += to_i * std::sqrt(static_cast<double>(k)) * base[k - 1];
        if (k < s) v += to_j * std::sqrt(static_cast<double>(s - k)) * base[k];
        out[k] = v;
      }
      const double scale = 1.0 / std::sqrt(static_cast<double>(raise_j ? n : m));
      for (double& v : out) v *= scale;
    }
    return cache_.emplace(key, std::move(out)).first->second;
  }

 private:
  double st_;
  double ct_;
  std::unordered_map<std::uint64_t, std::vector<double>> cache_;
};

}  // namespace

FockState apply_beamsplitter(const FockState& state, int mode_i, int mode_j, double t) {
  check_mode(mode_i, state.mode_count());
  check_mode(mode_j, state.mode_count());
  if (mode_i == mode_j) throw InvalidMode("beamsplitter needs two distinct modes");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidParameter("transmittance must lie in [0, 1], got " + std::to_string(t));
  }
  SplitterImages images(t);
  AmplitudeMap out;
  out.reserve(state.terms().size() * 4);
  for (const auto& term : state.terms()) {
    const int m = term.occupation[mode_i];
    const int n = term.occupation[mode_j];
    const Occupation rest = term.occupation.with(mode_i, 0).with(mode_j, 0);
    const auto& image = images.get(m, n);
    for (int k = 0; k <= m + n; ++k) {
      if (image[k] == 0.0) continue;
      out[rest.with(mode_i, k).with(mode_j, m + n - k).packed()] += term.amplitude * image[k];
    }
  }
  return FockState(state.mode_count(), sorted_terms(out), state.cutoff(), state.tail_mass());
}

void DetectorAssignment::validate(int mode_count) const {
  std::vector<bool> used(static_cast<std::size_t>(mode_count), false);
  for (const auto& g : groups) {
    if (g.empty()) throw InvalidMode("detector group without modes");
    for (int m : g) {
      check_mode(m, mode_count);
      if (used[static_cast<std::size_t>(m)]) {
        throw InvalidMode("mode " + std::to_string(m) + " assigned to two detectors");
      }
      used[static_cast<std::size_t>(m)] = true;
    }
  }
}

double detection_probability(const FockState& state, const DetectorAssignment& assignment) {
  assignment.validate(state.mode_count());
  std::vector<double> click(static_cast<std::size_t>(state.cutoff()) + 1);
  for (std::size_t n = 0; n < click.size(); ++n) {
    click[n] = click_prob(assignment.det, static_cast<long>(n));
  }
  double total = 0.0;
  for (const auto& term : state.terms()) {
    double p = std::norm(term.amplitude);
    for (const auto& g : assignment.groups) {
      int n = 0;
      for (int m : g) n += term.occupation[m];
      p *= click[static_cast<std::size_t>(n)];
    }
    total += p;
  }
  return total;
}

TruncatedMoment generating_moment(const FockState& state,
                                  const std::map<int, double>& per_mode_base) {
  for (const auto& [mode, x] : per_mode_base) {
    check_mode(mode, state.mode_count());
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidParameter("generating bases must lie in [0, 1]");
  }
  double total = 0.0;
  for (const auto& term : state.terms()) {
    double v = std::norm(term.amplitude);
    for (const auto& [mode, x] : per_mode_base) v *= std::pow(x, term.occupation[mode]);
    total += v;
  }
  return {total, state.tail_mass()};
}

CountDistribution::CountDistribution(int group_count, std::vector<Entry> entries,
                                     double tail_mass)
    : group_count_(group_count), entries_(std::move(entries)), tail_mass_(tail_mass) {
  if (group_count < 1 || group_count > kMaxGroups) {
    throw InvalidParameter("count distributions support 1 to " + std::to_string(kMaxGroups) +
                           " groups");
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.counts < b.counts; });
}

double CountDistribution::total_probability() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.probability;
  return s;
}

namespace {

constexpr int kCountBits = 16;

std::uint64_t pack_counts(const std::array<int, kMaxGroups>& c) {
  std::uint64_t key = 0;
  for (int g = 0; g < kMaxGroups; ++g) {
    if (c[g] >= (1 << kCountBits)) throw CutoffTooSmall("photon count exceeds packing range");
    key |= static_cast<std::uint64_t>(c[g]) << (kCountBits * g);
  }
  return key;
}

std::array<int, kMaxGroups> unpack_counts(std::uint64_t key) {
  std::array<int, kMaxGroups> c{};
  for (int g = 0; g < kMaxGroups; ++g) {
    c[g] = static_cast<int>((key >> (kCountBits * g)) & ((1u << kCountBits) - 1));
  }
  return c;
}

CountDistribution from_map(int group_count, const std::unordered_map<std::uint64_t, double>& m,
                           double tail) {
  std::vector<CountDistribution::Entry> entries;
  entries.reserve(m.size());
  for (const auto& [key, prob] : m) entries.push_back({unpack_counts(key), prob});
  return CountDistribution(group_count, std::move(entries), tail);
}

}  // namespace

CountDistribution group_count_distribution(const FockState& state,
                                           std::span<const std::vector<int>> groups) {
  DetectorAssignment{{groups.begin(), groups.end()}, DetectorModel(1.0, 0.0)}.validate(
      state.mode_count());
  std::unordered_map<std::uint64_t, double> acc;
  for (const auto& term : state.terms()) {
    std::array<int, kMaxGroups> counts{};
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (int m : groups[g]) counts[g] += term.occupation[m];
    }
    acc[pack_counts(counts)] += std::norm(term.amplitude);
  }
  return from_map(static_cast<int>(groups.size()), acc, state.tail_mass());
}

CountDistribution convolve(const CountDistribution& a, const CountDistribution& b,
                           double prune) {
  if (a.group_count() != b.group_count()) {
    throw InvalidParameter("convolving distributions over different detector counts");
  }
  std::unordered_map<std::uint64_t, double> acc;
  acc.reserve(a.entries().size() * 4);
  double pruned = 0.0;
  for (const auto& ea : a.entries()) {
    for (const auto& eb : b.entries()) {
      const double p = ea.probability * eb.probability;
      if (p < prune) {
        pruned += p;
        continue;
      }
      std::array<int, kMaxGroups> c{};
      for (int g = 0; g < kMaxGroups; ++g) c[g] = ea.counts[g] + eb.counts[g];
      acc[pack_counts(c)] += p;
    }
  }
  // independent truncations: 1 - (1 - ta)(1 - tb)
  const double tail = a.tail_mass() + b.tail_mass() - a.tail_mass() * b.tail_mass() + pruned;
  return from_map(a.group_count(), acc, tail);
}

CountDistribution convolution_power(const CountDistribution& d, int n, double prune) {
  if (n < 1) throw InvalidParameter("convolution power must be positive");
  CountDistribution out = d;
  for (int i = 1; i < n; ++i) out = convolve(out, d, prune);
  return out;
}

double all_click_probability(const CountDistribution& d, const DetectorModel& det) {
  double total = 0.0;
  for (const auto& e : d.entries()) {
    double p = e.probability;
    for (int g = 0; g < d.group_count(); ++g) p *= click_prob(det, e.counts[g]);
    total += p;
  }
  return total;
}

}  // namespace pairchar
