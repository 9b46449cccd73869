#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "dvkit/sampler.hpp"

using namespace dvkit;
using namespace dvkit::sampler;

namespace {

std::vector<std::string> ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Upper 0.1% point of chi-square with k degrees of freedom, Wilson-Hilferty.
double chi2_critical_999(double k) {
  const double z = 3.090232;
  const double a = 2.0 / (9.0 * k);
  return k * std::pow(1 - a + z * std::sqrt(a), 3);
}

}  // namespace

TEST_CASE("omega 0 and 1 isolate the pools") {
  const SampleStream only_target(ids("t", 5), ids("c", 5), 1.0, 1, 64);
  const SampleStream only_cotrain(ids("t", 5), ids("c", 5), 0.0, 1, 64);
  for (std::uint64_t b = 0; b < 50; ++b) {
    for (const auto& id : only_target.next_batch(b)) CHECK(id[0] == 't');
    for (const auto& id : only_cotrain.next_batch(b)) CHECK(id[0] == 'c');
  }
  // An empty pool is fine when it can never be chosen.
  CHECK_NOTHROW(SampleStream(ids("t", 3), {}, 1.0, 1, 8));
  CHECK_NOTHROW(SampleStream({}, ids("c", 3), 0.0, 1, 8));
}

TEST_CASE("target fraction stays within three sigma") {
  for (double w : {0.3, 0.5, 0.7}) {
    const SampleStream s(ids("t", 20), ids("c", 80), w, 2024, 100);
    const auto st = stream_stats(s, 100);  // 10k draws
    REQUIRE(st.draws == 10000);
    const double sigma = std::sqrt(w * (1 - w) / 10000.0);
    INFO("omega " << w << " observed " << st.target_fraction);
    CHECK(std::abs(st.target_fraction - w) <= 3 * sigma);
    CHECK(st.target_fraction + st.cotrain_fraction == doctest::Approx(1.0));
  }
}

TEST_CASE("draws within a pool are uniform") {
  const SampleStream s(ids("t", 50), ids("c", 30), 0.5, 99, 1000);
  const auto st = stream_stats(s, 100);  // 1e5 draws
  CHECK(chi_square_uniform(st.target_counts) < chi2_critical_999(49));
  CHECK(chi_square_uniform(st.cotrain_counts) < chi2_critical_999(29));
  // A skewed table is rejected.
  std::map<std::string, std::size_t> skew{{"a", 600}, {"b", 200}, {"c", 200}};
  CHECK(chi_square_uniform(skew) > chi2_critical_999(2));
  CHECK(chi_square_uniform({{"a", 5}, {"b", 5}}) == 0.0);
}

TEST_CASE("batches are deterministic and order independent") {
  const SampleStream a(ids("t", 10), ids("c", 10), 0.4, 7, 32);
  const SampleStream b(ids("t", 10), ids("c", 10), 0.4, 7, 32);
  std::vector<std::vector<std::string>> forward, backward(20);
  for (std::uint64_t i = 0; i < 20; ++i) forward.push_back(a.next_batch(i));
  for (std::uint64_t i = 20; i-- > 0;) backward[i] = b.next_batch(i);
  CHECK(forward == backward);
  const SampleStream other(ids("t", 10), ids("c", 10), 0.4, 8, 32);
  CHECK(other.next_batch(0) != a.next_batch(0));
  CHECK(a.next_batch(3) != a.next_batch(4));
}

TEST_CASE("invalid configurations") {
  CHECK_THROWS_AS(SampleStream(ids("t", 1), ids("c", 1), -0.1, 1, 4), RangeError);
  CHECK_THROWS_AS(SampleStream(ids("t", 1), ids("c", 1), 1.5, 1, 4), RangeError);
  CHECK_THROWS_AS(SampleStream(ids("t", 1), ids("c", 1), 0.5, 1, 0), RangeError);
  CHECK_THROWS_AS(SampleStream({}, ids("c", 1), 0.5, 1, 4), EmptyPoolSelected);
  CHECK_THROWS_AS(SampleStream(ids("t", 1), {}, 0.5, 1, 4), EmptyPoolSelected);
  const SampleStream s(ids("t", 1), ids("c", 1), 0.5, 1, 4);
  CHECK_THROWS_AS(stream_stats(s, 0), RangeError);
}

TEST_CASE("stats account for every draw") {
  const SampleStream s(ids("t", 7), ids("c", 3), 0.6, 5, 13);
  const auto st = stream_stats(s, 17);
  CHECK(st.draws == 13 * 17);
  std::size_t t = 0, c = 0;
  for (const auto& [id, n] : st.target_counts) t += n;
  for (const auto& [id, n] : st.cotrain_counts) c += n;
  CHECK(t == st.target_draws);
  CHECK(t + c == st.draws);
  CHECK(st.target_counts.size() == 7);
  CHECK(st.cotrain_counts.size() == 3);
  // draws() and next_batch() describe the same batch.
  const auto d = s.draws(4);
  const auto names = s.next_batch(4);
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(names[i] == (d[i].target ? s.target_ids()[d[i].index] : s.cotrain_ids()[d[i].index]));
  const auto j = nlohmann::json::parse(stats_json(s, 17, st));
  CHECK(j.at("draws").get<std::size_t>() == st.draws);
  CHECK(stats_text(s, 17, st).find("0.6") != std::string::npos);
}
