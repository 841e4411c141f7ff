#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pairchar/core_model.hpp"
#include "pairchar/fock_state.hpp"

namespace pairchar {

/// Counter-based random stream: the state is a pure function of
/// (seed, setup, trial), so any partition of the trials over threads
/// reproduces the serial draws.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t setup, std::uint64_t trial);

  std::uint64_t trial() const noexcept { return trial_; }
  std::uint64_t next() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1p-53; }
  /// True with probability p, for p in [0, 1].
  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t state_;
  std::uint64_t trial_;
};

/// Draws occupation tuples with the photon-number distribution of a
/// truncated state, renormalized over the kept terms.
class OccupationSampler {
 public:
  /// Throws CutoffTooSmall when the state's tail mass is 1e-9 or more.
  explicit OccupationSampler(const FockState& state);

  Occupation sample(TrialStream& stream) const;
  int mode_count() const noexcept { return mode_count_; }
  double kept_mass() const noexcept { return kept_mass_; }

 private:
  int mode_count_;
  double kept_mass_;
  std::vector<Occupation> outcomes_;  // most probable first
  std::vector<double> cumulative_;
};

std::vector<Occupation> sample_occupations(const OccupationSampler& sampler, std::uint64_t seed,
                                           std::uint64_t trials);

/// Field-wise sum of two occupations; CutoffTooSmall on overflow.
Occupation add_occupations(const Occupation& a, const Occupation& b);

struct ClickRecord {
  std::uint64_t trial_id = 0;
  int detector_count = 0;
  /// Bit g set when detector g clicked.
  std::uint32_t clicks = 0;

  bool clicked(int detector) const noexcept { return (clicks >> detector) & 1u; }
};

/// Photon-by-photon thinning: each photon of a group survives with
/// probability eta, and the detector also fires on an independent dark count.
ClickRecord detect(const Occupation& occupation, const DetectorAssignment& assignment,
                   TrialStream& stream);

inline constexpr int kMaxDetectors = 8;

class CountTally {
 public:
  explicit CountTally(int detector_count);

  void add(const ClickRecord& record);
  void merge(const CountTally& other);

  int detector_count() const noexcept { return detector_count_; }
  std::uint64_t trials() const noexcept { return trials_; }
  std::uint64_t count(std::uint32_t pattern) const { return counts_.at(pattern); }
  /// Trials in which every detector of `mask` clicked.
  std::uint64_t count_all(std::uint32_t mask) const;
  std::map<std::uint32_t, std::uint64_t> nonzero_counts() const;

 private:
  int detector_count_;
  std::uint64_t trials_ = 0;
  std::vector<std::uint64_t> counts_;
};

struct EstimatorResult {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  /// Raw counts of every event entering the estimator.
  std::map<std::string, double> diagnostics;
};

struct SamplerOptions {
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Optional raw output: one pattern per trial and setup.
struct ClickLog {
  std::vector<std::string> detector_names;  // setups concatenated
  std::vector<int> setup_sizes;
  std::vector<std::vector<std::uint32_t>> patterns;  // [setup][trial]

  /// CSV with header trial_id,<detector names> and one 0/1 row per trial.
  void write_csv(std::ostream& out) const;
};

/// Count-ratio estimate of a primary metric over `trials` trials per setup,
/// with a delta-method standard error. Throws DegenerateCounts when a
/// denominator event was never observed.
EstimatorResult estimate_metric(MetricKind kind, const SourceParams& source,
                                const DetectorModel& det, std::uint64_t trials,
                                std::uint64_t seed, const SamplerOptions& options = {},
                                ClickLog* log = nullptr);

}  // namespace pairchar
