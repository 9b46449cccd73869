#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dvkit/error.hpp"

namespace dvkit::sampler {

/// Probability of drawing from the target pool when none is given.
inline constexpr double kDefaultOmega = 0.5;

class EmptyPoolSelected : public Error {
 public:
  explicit EmptyPoolSelected(const std::string& pool)
      : Error("EmptyPoolSelected", "the " + pool + " pool is empty but has nonzero probability") {}
};

/// Mixture D(w) = w * D_target + (1 - w) * D_cotrain over demo ids.
///
/// Every slot is an independent Bernoulli(w) choice of pool followed by a
/// uniform draw with replacement inside that pool. Batch b uses its own
/// SplitMix64 substream of (seed, b), so batches can be produced in any
/// order or concurrently.
class SampleStream {
 public:
  /// Throws RangeError for w outside [0, 1] or batch_size == 0, and
  /// EmptyPoolSelected when a pool with nonzero probability is empty.
  SampleStream(std::vector<std::string> target_ids, std::vector<std::string> cotrain_ids,
               double omega, std::uint64_t seed, std::size_t batch_size);

  std::vector<std::string> next_batch(std::uint64_t batch_index) const;

  const std::vector<std::string>& target_ids() const { return target_; }
  const std::vector<std::string>& cotrain_ids() const { return cotrain_; }
  double omega() const { return omega_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t batch_size() const { return batch_size_; }

  /// Pool and index of each slot of batch `batch_index`; `true` = target.
  struct Draw {
    bool target;
    std::size_t index;
  };
  std::vector<Draw> draws(std::uint64_t batch_index) const;

 private:
  std::vector<std::string> target_;
  std::vector<std::string> cotrain_;
  double omega_;
  std::uint64_t seed_;
  std::size_t batch_size_;
};

struct StreamStats {
  std::size_t draws = 0;
  std::size_t target_draws = 0;
  double target_fraction = 0;
  double cotrain_fraction = 0;
  std::map<std::string, std::size_t> target_counts;   // per id, every id listed
  std::map<std::string, std::size_t> cotrain_counts;
};

/// Statistics over batches 0 .. n_batches-1. Throws RangeError when
/// n_batches == 0.
StreamStats stream_stats(const SampleStream& stream, std::size_t n_batches);

/// Pearson chi-square statistic of observed counts against a uniform
/// expectation.
double chi_square_uniform(const std::map<std::string, std::size_t>& counts);

std::string stats_text(const SampleStream& stream, std::size_t n_batches, const StreamStats& s);
std::string stats_json(const SampleStream& stream, std::size_t n_batches, const StreamStats& s);

}  // namespace dvkit::sampler
