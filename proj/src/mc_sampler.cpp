#include "pairchar/mc_sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <thread>

#include "pairchar/fock_oracle.hpp"

namespace pairchar {

namespace {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr double kMaxSamplerTail = 1e-9;

}  // namespace

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t setup, std::uint64_t trial)
    : state_(mix64(mix64(mix64(seed) ^ setup) ^ trial)), trial_(trial) {}

std::uint64_t TrialStream::next() noexcept {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

OccupationSampler::OccupationSampler(const FockState& state)
    : mode_count_(state.mode_count()), kept_mass_(0.0) {
  if (!(state.tail_mass() < kMaxSamplerTail)) {
    throw CutoffTooSmall("sampler needs tail mass below 1e-9, state has " +
                         std::to_string(state.tail_mass()));
  }
  std::vector<std::pair<double, Occupation>> weighted;
  weighted.reserve(state.terms().size());
  for (const auto& t : state.terms()) {
    const double w = std::norm(t.amplitude);
    if (w > 0.0) weighted.emplace_back(w, t.occupation);
  }
  std::stable_sort(weighted.begin(), weighted.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  outcomes_.reserve(weighted.size());
  cumulative_.reserve(weighted.size());
  for (const auto& [w, occ] : weighted) {
    kept_mass_ += w;
    outcomes_.push_back(occ);
    cumulative_.push_back(kept_mass_);
  }
  if (outcomes_.empty()) throw InvalidParameter("cannot sample from a zero state");
}

Occupation OccupationSampler::sample(TrialStream& stream) const {
  const double u = stream.uniform() * kept_mass_;
  // the head usually holds almost all the mass
  const std::size_t head = std::min<std::size_t>(8, cumulative_.size());
  for (std::size_t i = 0; i < head; ++i) {
    if (u < cumulative_[i]) return outcomes_[i];
  }
  auto it = std::upper_bound(cumulative_.begin() + head, cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return outcomes_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::vector<Occupation> sample_occupations(const OccupationSampler& sampler, std::uint64_t seed,
                                           std::uint64_t trials) {
  std::vector<Occupation> out;
  out.reserve(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    TrialStream stream(seed, 0, t);
    out.push_back(sampler.sample(stream));
  }
  return out;
}

Occupation add_occupations(const Occupation& a, const Occupation& b) {
  if (b.packed() == 0) return a;
  if (a.packed() == 0) return b;
  Occupation out = a;
  for (int m = 0; m < kMaxModes; ++m) {
    if (b[m] != 0) out = out.with(m, a[m] + b[m]);
  }
  return out;
}

namespace {

std::uint32_t detect_pattern(const Occupation& occ, const std::vector<std::vector<int>>& groups,
                             double eta, double p_dc, TrialStream& stream) {
  std::uint32_t pattern = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    int photons = 0;
    for (int m : groups[g]) photons += occ[m];
    bool click = false;
    for (int k = 0; k < photons && !click; ++k) click = stream.bernoulli(eta);
    if (!click && p_dc > 0.0) click = stream.bernoulli(p_dc);
    if (click) pattern |= 1u << g;
  }
  return pattern;
}

}  // namespace

ClickRecord detect(const Occupation& occupation, const DetectorAssignment& assignment,
                   TrialStream& stream) {
  ClickRecord r;
  r.trial_id = stream.trial();
  r.detector_count = static_cast<int>(assignment.groups.size());
  r.clicks = detect_pattern(occupation, assignment.groups, assignment.det.eta(),
                            assignment.det.p_dc(), stream);
  return r;
}

CountTally::CountTally(int detector_count) : detector_count_(detector_count) {
  if (detector_count < 1 || detector_count > kMaxDetectors) {
    throw InvalidParameter("tallies support 1 to 8 detectors");
  }
  counts_.assign(std::size_t{1} << detector_count, 0);
}

void CountTally::add(const ClickRecord& record) {
  ++counts_.at(record.clicks);
  ++trials_;
}

void CountTally::merge(const CountTally& other) {
  if (other.detector_count_ != detector_count_) {
    throw InvalidParameter("merging tallies of different setups");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  trials_ += other.trials_;
}

std::uint64_t CountTally::count_all(std::uint32_t mask) const {
  std::uint64_t n = 0;
  for (std::uint32_t p = 0; p < counts_.size(); ++p) {
    if ((p & mask) == mask) n += counts_[p];
  }
  return n;
}

std::map<std::uint32_t, std::uint64_t> CountTally::nonzero_counts() const {
  std::map<std::uint32_t, std::uint64_t> out;
  for (std::uint32_t p = 0; p < counts_.size(); ++p) {
    if (counts_[p] != 0) out[p] = counts_[p];
  }
  return out;
}

void ClickLog::write_csv(std::ostream& out) const {
  out << "trial_id";
  for (const auto& n : detector_names) out << ',' << n;
  out << '\n';
  const std::size_t trials = patterns.empty() ? 0 : patterns.front().size();
  for (std::size_t t = 0; t < trials; ++t) {
    out << t;
    for (std::size_t s = 0; s < patterns.size(); ++s) {
      for (int g = 0; g < setup_sizes[s]; ++g) out << ',' << ((patterns[s][t] >> g) & 1u);
    }
    out << '\n';
  }
}

namespace {

struct SetupDef {
  FockState state;
  std::vector<std::vector<int>> groups;
  std::vector<std::string> names;
};

// Probability that every detector in `mask` of setup `setup` clicks.
struct EventDef {
  int setup;
  std::uint32_t mask;
  std::string name;
};

struct Plan {
  std::vector<SetupDef> setups;
  std::vector<EventDef> events;
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
  // each inner list must contain at least one observed event
  std::vector<std::vector<int>> denominators;
};

// value = prod_e P_e^{k_e}
void power_product(Plan& plan, std::vector<int> powers) {
  plan.value = [powers](const std::vector<double>& p) {
    double v = 1.0;
    for (std::size_t e = 0; e < p.size(); ++e) v *= std::pow(p[e], powers[e]);
    return v;
  };
  plan.gradient = [powers](const std::vector<double>& p) {
    std::vector<double> g(p.size());
    for (std::size_t e = 0; e < p.size(); ++e) {
      double v = powers[e] * std::pow(p[e], powers[e] - 1);
      for (std::size_t o = 0; o < p.size(); ++o) {
        if (o != e) v *= std::pow(p[o], powers[o]);
      }
      g[e] = v;
    }
    return g;
  };
  for (std::size_t e = 0; e < powers.size(); ++e) {
    if (powers[e] < 0) plan.denominators.push_back({static_cast<int>(e)});
  }
}

Plan make_plan(MetricKind kind, double p_bar) {
  CutoffPolicy policy;
  policy.start_tail = 1e-12;
  const int order = initial_order(p_bar, policy);
  if (2 * order > policy.max_total_photons) {
    throw CutoffTooSmall("p_bar too close to 1 to sample a truncated state");
  }
  auto tms = [&] { return two_mode_squeezed_state(p_bar, order, kMaxSamplerTail); };
  auto split_a = [&] { return apply_beamsplitter(tms().with_vacuum_modes(1), 0, 2, 0.5); };
  Plan plan;
  switch (kind) {
    case MetricKind::r_tilde: {
      FockState s = apply_beamsplitter(
          apply_beamsplitter(tms().with_vacuum_modes(2), 0, 2, 0.5), 1, 3, 0.5);
      plan.setups.push_back({s, {{0}, {2}, {1}, {3}}, {"d_a", "dbar_a", "d_b", "dbar_b"}});
      plan.events = {{0, 0b0101, "d_a&d_b"}, {0, 0b0011, "d_a&dbar_a"},
                     {0, 0b1100, "d_b&dbar_b"}};
      power_product(plan, {2, -1, -1});
      break;
    }
    case MetricKind::g2_auto:
      plan.setups.push_back({split_a(), {{0}, {2}}, {"d", "dbar"}});
      plan.events = {{0, 0b11, "d&dbar"}, {0, 0b01, "d"}, {0, 0b10, "dbar"}};
      power_product(plan, {1, -1, -1});
      break;
    case MetricKind::g2_conditional:
      plan.setups.push_back({split_a(), {{0}, {2}, {1}}, {"d", "dbar", "b"}});
      plan.events = {{0, 0b111, "d&dbar&b"}, {0, 0b100, "b"}, {0, 0b101, "d&b"}};
      power_product(plan, {1, 1, -2});
      break;
    case MetricKind::g2_cross:
      plan.setups.push_back({tms(), {{0}, {1}}, {"a", "b"}});
      plan.events = {{0, 0b11, "a&b"}, {0, 0b01, "a"}, {0, 0b10, "b"}};
      power_product(plan, {1, -1, -1});
      break;
    case MetricKind::v_hom:
      plan.setups.push_back(
          {hom_dip_state(p_bar, order, kMaxSamplerTail), {{0}, {1}}, {"dip_d", "dip_dbar"}});
      plan.setups.push_back({hom_delayed_state(p_bar, order, kMaxSamplerTail),
                             {{0, 1}, {2, 3}},
                             {"out_d", "out_dbar"}});
      plan.events = {{0, 0b11, "dip_d&dip_dbar"}, {1, 0b11, "out_d&out_dbar"}};
      plan.value = [](const std::vector<double>& p) { return 1.0 - p[0] / p[1]; };
      plan.gradient = [](const std::vector<double>& p) {
        return std::vector<double>{-1.0 / p[1], p[0] / (p[1] * p[1])};
      };
      plan.denominators = {{1}};
      break;
    case MetricKind::v_ent:
      plan.setups.push_back({bell_state(p_bar, order, kMaxSamplerTail),
                             {{0}, {1}, {2}, {3}},
                             {"a_h", "a_v", "b_h", "b_v"}});
      plan.events = {{0, 0b1001, "a_h&b_v"}, {0, 0b0101, "a_h&b_h"}};
      plan.value = [](const std::vector<double>& p) { return (p[0] - p[1]) / (p[0] + p[1]); };
      plan.gradient = [](const std::vector<double>& p) {
        const double s = (p[0] + p[1]) * (p[0] + p[1]);
        return std::vector<double>{2.0 * p[1] / s, -2.0 * p[0] / s};
      };
      plan.denominators = {{0, 1}};
      break;
    default:
      throw InvalidParameter("no Monte Carlo estimator for " + std::string(to_string(kind)));
  }
  return plan;
}

constexpr std::uint64_t kChunk = 1 << 15;

CountTally run_setup(const SetupDef& setup, std::uint64_t setup_id, int n_modes,
                     const DetectorModel& det, std::uint64_t trials, std::uint64_t seed,
                     unsigned threads, std::vector<std::uint32_t>* patterns) {
  const OccupationSampler sampler(setup.state);
  const int detectors = static_cast<int>(setup.groups.size());
  const double eta = det.eta();
  const double p_dc = det.p_dc();
  if (patterns) patterns->assign(trials, 0);

  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<CountTally> tallies(chunks, CountTally(detectors));
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;) {
      CountTally& tally = tallies[c];
      const std::uint64_t end = std::min(trials, (c + 1) * kChunk);
      for (std::uint64_t t = c * kChunk; t < end; ++t) {
        TrialStream stream(seed, setup_id, t);
        Occupation occ = sampler.sample(stream);
        for (int m = 1; m < n_modes; ++m) occ = add_occupations(occ, sampler.sample(stream));
        ClickRecord r;
        r.trial_id = t;
        r.detector_count = detectors;
        r.clicks = detect_pattern(occ, setup.groups, eta, p_dc, stream);
        tally.add(r);
        if (patterns) (*patterns)[t] = r.clicks;
      }
    }
  };
  const unsigned n = std::max<unsigned>(
      1, std::min<std::uint64_t>(threads ? threads : std::thread::hardware_concurrency(),
                                 chunks));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  CountTally total(detectors);
  for (const auto& t : tallies) total.merge(t);
  return total;
}

}  // namespace

EstimatorResult estimate_metric(MetricKind kind, const SourceParams& source,
                                const DetectorModel& det, std::uint64_t trials,
                                std::uint64_t seed, const SamplerOptions& options,
                                ClickLog* log) {
  if (trials < 1) throw InvalidParameter("at least one trial is needed");
  Plan plan = make_plan(kind, source.p_bar());

  std::vector<CountTally> tallies;
  if (log) {
    *log = {};
    log->patterns.resize(plan.setups.size());
  }
  for (std::size_t s = 0; s < plan.setups.size(); ++s) {
    tallies.push_back(run_setup(plan.setups[s], s, source.n_modes(), det, trials, seed,
                                options.threads, log ? &log->patterns[s] : nullptr));
    if (log) {
      log->setup_sizes.push_back(static_cast<int>(plan.setups[s].groups.size()));
      for (const auto& n : plan.setups[s].names) log->detector_names.push_back(n);
    }
  }

  EstimatorResult out;
  out.trials = trials;
  std::vector<std::uint64_t> counts;
  std::vector<double> probs;
  for (const auto& e : plan.events) {
    counts.push_back(tallies[e.setup].count_all(e.mask));
    probs.push_back(static_cast<double>(counts.back()) / static_cast<double>(trials));
    out.diagnostics["count:" + e.name] = static_cast<double>(counts.back());
  }
  for (const auto& group : plan.denominators) {
    std::uint64_t seen = 0;
    std::string names;
    for (int e : group) {
      seen += counts[e];
      names += (names.empty() ? "" : " + ") + plan.events[e].name;
    }
    if (seen == 0) {
      throw DegenerateCounts(std::string(to_string(kind)) + ": no trial produced " + names +
                             " in " + std::to_string(trials) + " trials");
    }
  }
  out.value = plan.value(probs);

  // Delta method over the multinomial pattern frequencies of each setup.
  const std::vector<double> grad = plan.gradient(probs);
  double variance = 0.0;
  for (std::size_t s = 0; s < tallies.size(); ++s) {
    const auto& tally = tallies[s];
    double mean = 0.0;
    double second = 0.0;
    for (const auto& [pattern, c] : tally.nonzero_counts()) {
      double g = 0.0;
      for (std::size_t e = 0; e < plan.events.size(); ++e) {
        const auto& ev = plan.events[e];
        if (ev.setup == static_cast<int>(s) && (pattern & ev.mask) == ev.mask) g += grad[e];
      }
      const double pi = static_cast<double>(c) / static_cast<double>(trials);
      mean += pi * g;
      second += pi * g * g;
    }
    variance += std::max(0.0, second - mean * mean) / static_cast<double>(trials);
  }
  out.std_error = std::sqrt(variance);
  return out;
}

}  // namespace pairchar
