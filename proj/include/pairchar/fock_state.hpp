#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pairchar/core_model.hpp"

namespace pairchar {

inline constexpr int kMaxModes = 6;
inline constexpr int kMaxPhotonsPerMode = 1023;

/// Photon occupation tuple (n_0, ..., n_5) packed ten bits per mode.
class Occupation {
 public:
  Occupation() = default;
  explicit Occupation(std::span<const int> counts);

  int operator[](int mode) const noexcept {
    return static_cast<int>((bits_ >> (kBits * mode)) & kMask);
  }
  /// Copy with mode's count changed by delta; throws CutoffTooSmall past the
  /// per-mode capacity.
  Occupation shifted(int mode, int delta) const;
  Occupation with(int mode, int count) const;
  int total() const noexcept;
  std::uint64_t packed() const noexcept { return bits_; }
  static Occupation from_packed(std::uint64_t bits) {
    Occupation o;
    o.bits_ = bits;
    return o;
  }

  friend auto operator<=>(const Occupation&, const Occupation&) = default;

 private:
  static constexpr int kBits = 10;
  static constexpr std::uint64_t kMask = (1u << kBits) - 1;
  std::uint64_t bits_ = 0;
};

using Amplitude = std::complex<double>;

struct FockTerm {
  Occupation occupation;
  Amplitude amplitude;
};

/// Truncated pure state on up to kMaxModes bosonic modes, stored as a sparse
/// amplitude list sorted by occupation. Immutable once built.
class FockState {
 public:
  FockState(int mode_count, std::vector<FockTerm> terms, int cutoff, double tail_mass);

  static FockState vacuum(int mode_count);

  int mode_count() const noexcept { return mode_count_; }
  /// Largest total photon number any kept term may carry.
  int cutoff() const noexcept { return cutoff_; }
  /// Estimated probability mass dropped by the truncation.
  double tail_mass() const noexcept { return tail_mass_; }
  std::span<const FockTerm> terms() const noexcept { return terms_; }

  Amplitude amplitude(const Occupation& occupation) const;
  double norm_squared() const;

  /// Same state with extra modes in the vacuum appended.
  FockState with_vacuum_modes(int extra) const;

 private:
  int mode_count_;
  std::vector<FockTerm> terms_;
  int cutoff_;
  double tail_mass_;
};

/// coefficient * a_i^dag a_j^dag (i == j allowed).
struct PairTerm {
  int mode_i;
  int mode_j;
  Amplitude coefficient;
};

/// norm * exp(sum_t c_t a_i^dag a_j^dag)|0> truncated after `order` powers of
/// the exponent, so the kept terms carry at most 2 * order photons. The
/// tail mass is extrapolated geometrically from the first dropped order.
/// Throws CutoffTooSmall when that estimate exceeds max_tail.
FockState make_pair_exponential_state(std::span<const PairTerm> terms, int mode_count,
                                      Amplitude norm, int order, double max_tail = 1e-9);

/// Beamsplitter of transmittance t mixing modes i and j:
///   a_i^dag -> sqrt(t) a_i^dag + sqrt(1-t) a_j^dag,
///   a_j^dag -> sqrt(1-t) a_i^dag - sqrt(t) a_j^dag,
/// so at t = 1/2 the inputs relate to the outputs by a = (d + dbar)/sqrt2
/// and b = (d - dbar)/sqrt2 with d on mode i and dbar on mode j.
FockState apply_beamsplitter(const FockState& state, int mode_i, int mode_j, double t);

/// One physical detector per group; a group of several modes sees their
/// total photon number with a single dark-count factor.
struct DetectorAssignment {
  std::vector<std::vector<int>> groups;
  DetectorModel det;

  /// Throws InvalidMode unless groups are disjoint, non-empty and within
  /// [0, mode_count).
  void validate(int mode_count) const;
};

/// Probability that every detector of the assignment clicks, summed exactly
/// over the kept terms. The truncation adds at most state.tail_mass().
double detection_probability(const FockState& state, const DetectorAssignment& assignment);

struct TruncatedMoment {
  double value;
  double tail_mass;
};

/// <prod_i x_i^{n_i}> over the kept terms, for bases x_i in [0, 1].
TruncatedMoment generating_moment(const FockState& state,
                                  const std::map<int, double>& per_mode_base);

inline constexpr int kMaxGroups = 4;

/// Sparse joint distribution of the photon numbers reaching each detector
/// group. Independent pair modes combine by convolution.
class CountDistribution {
 public:
  struct Entry {
    std::array<int, kMaxGroups> counts;
    double probability;
  };

  CountDistribution(int group_count, std::vector<Entry> entries, double tail_mass);

  int group_count() const noexcept { return group_count_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  double tail_mass() const noexcept { return tail_mass_; }
  double total_probability() const;

 private:
  int group_count_;
  std::vector<Entry> entries_;
  double tail_mass_;
};

CountDistribution group_count_distribution(const FockState& state,
                                           std::span<const std::vector<int>> groups);

/// Distribution of the sum of independent count vectors. Entries with
/// probability below `prune` are dropped and added to the tail.
CountDistribution convolve(const CountDistribution& a, const CountDistribution& b,
                           double prune = 0.0);
CountDistribution convolution_power(const CountDistribution& d, int n, double prune = 0.0);

/// Probability that every group's detector clicks.
double all_click_probability(const CountDistribution& d, const DetectorModel& det);

}  // namespace pairchar
