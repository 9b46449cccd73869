#include "dvkit/sampler.hpp"

#include <json.hpp>
#include <sstream>

#include "dvkit/rng.hpp"

namespace dvkit::sampler {

SampleStream::SampleStream(std::vector<std::string> target_ids,
                           std::vector<std::string> cotrain_ids, double omega,
                           std::uint64_t seed, std::size_t batch_size)
    : target_(std::move(target_ids)),
      cotrain_(std::move(cotrain_ids)),
      omega_(omega),
      seed_(seed),
      batch_size_(batch_size) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw RangeError("omega", "must lie in [0, 1]");
  if (batch_size == 0) throw RangeError("batch", "must be positive");
  if (omega > 0 && target_.empty()) throw EmptyPoolSelected("target");
  if (omega < 1 && cotrain_.empty()) throw EmptyPoolSelected("co-training");
}

std::vector<SampleStream::Draw> SampleStream::draws(std::uint64_t batch_index) const {
  auto rng = SplitMix64::substream(seed_, batch_index);
  std::vector<Draw> out;
  out.reserve(batch_size_);
  for (std::size_t i = 0; i < batch_size_; ++i) {
    // One uniform per slot decides the pool even at w = 0 or 1, so the
    // stream layout does not depend on w.
    const bool target = rng.uniform() < omega_;
    const auto& pool = target ? target_ : cotrain_;
    out.push_back({target, static_cast<std::size_t>(rng.below(pool.size()))});
  }
  return out;
}

std::vector<std::string> SampleStream::next_batch(std::uint64_t batch_index) const {
  std::vector<std::string> ids;
  ids.reserve(batch_size_);
  for (const Draw& d : draws(batch_index)) ids.push_back(d.target ? target_[d.index] : cotrain_[d.index]);
  return ids;
}

StreamStats stream_stats(const SampleStream& stream, std::size_t n_batches) {
  if (n_batches == 0) throw RangeError("n", "need at least one batch");
  std::vector<std::size_t> tc(stream.target_ids().size()), cc(stream.cotrain_ids().size());
  StreamStats s;
  for (std::size_t b = 0; b < n_batches; ++b) {
    for (const auto& d : stream.draws(b)) {
      ++s.draws;
      if (d.target) {
        ++s.target_draws;
        ++tc[d.index];
      } else {
        ++cc[d.index];
      }
    }
  }
  s.target_fraction = static_cast<double>(s.target_draws) / static_cast<double>(s.draws);
  s.cotrain_fraction = 1.0 - s.target_fraction;
  // Duplicate ids within a pool share one entry.
  for (std::size_t i = 0; i < tc.size(); ++i) s.target_counts[stream.target_ids()[i]] += tc[i];
  for (std::size_t i = 0; i < cc.size(); ++i) s.cotrain_counts[stream.cotrain_ids()[i]] += cc[i];
  return s;
}

double chi_square_uniform(const std::map<std::string, std::size_t>& counts) {
  if (counts.empty()) return 0;
  double total = 0;
  for (const auto& [id, c] : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  if (expected == 0) return 0;
  double chi = 0;
  for (const auto& [id, c] : counts) {
    const double d = static_cast<double>(c) - expected;
    chi += d * d / expected;
  }
  return chi;
}

std::string stats_text(const SampleStream& stream, std::size_t n_batches, const StreamStats& s) {
  std::ostringstream os;
  os << "omega: " << stream.omega() << "\nseed: " << stream.seed()
     << "\nbatch: " << stream.batch_size() << "\nbatches: " << n_batches
     << "\ndraws: " << s.draws << "\ntarget_fraction: " << s.target_fraction
     << "\ncotrain_fraction: " << s.cotrain_fraction << "\n";
  for (const auto& [id, c] : s.target_counts) os << "target " << id << " " << c << "\n";
  for (const auto& [id, c] : s.cotrain_counts) os << "cotrain " << id << " " << c << "\n";
  return os.str();
}

std::string stats_json(const SampleStream& stream, std::size_t n_batches, const StreamStats& s) {
  nlohmann::json j{{"omega", stream.omega()},
                   {"seed", stream.seed()},
                   {"batch", stream.batch_size()},
                   {"batches", n_batches},
                   {"draws", s.draws},
                   {"target_fraction", s.target_fraction},
                   {"cotrain_fraction", s.cotrain_fraction},
                   {"target_counts", s.target_counts},
                   {"cotrain_counts", s.cotrain_counts}};
  return j.dump();
}

}  // namespace dvkit::sampler
