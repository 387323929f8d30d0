#include "agtd/watermark.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "agtd/hashing.hpp"
#include "agtd/numerics.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace agtd;

namespace {

constexpr std::uint64_t kKey = 0x1234ABCDULL;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::vector<std::string> words(std::initializer_list<const char*> w) {
  return {w.begin(), w.end()};
}

}  // namespace

TEST_CASE("is_green is deterministic and matches the normative bit recipe") {
  for (int i = 0; i < 50; ++i) {
    const auto prev = static_cast<std::uint32_t>(i * 37);
    const auto tok = static_cast<std::uint32_t>(i * 101 + 7);
    CHECK(is_green(prev, tok, 0.3, kKey) == is_green(prev, tok, 0.3, kKey));
    // Recompute straight from the recipe.
    const std::uint64_t seed64 =
        splitmix64(kKey ^ (static_cast<std::uint64_t>(prev) *
                           0x9E3779B97F4A7C15ULL));
    const std::uint64_t u = splitmix64(seed64 ^ tok) % (1ULL << 53);
    const bool expect = static_cast<double>(u) / 9007199254740992.0 < 0.3;
    CHECK(is_green(prev, tok, 0.3, kKey) == expect);
  }
  CHECK_THROWS(is_green(0, 0, 0.0, kKey));
  CHECK_THROWS(is_green(0, 0, 1.0, kKey));
}

TEST_CASE("green fraction over the vocabulary concentrates near gamma") {
  const std::uint32_t vocab = 1000;
  const double gamma = 0.5;
  int green = 0;
  for (std::uint32_t t = 0; t < vocab; ++t)
    green += is_green(42, t, gamma, kKey);
  const double fraction = static_cast<double>(green) / vocab;
  // Per-token hashing gives a binomial count around gamma*V, not an exact
  // partition; 3 sigma at V=1000 is under 0.05.
  CHECK(fraction > 0.45);
  CHECK(fraction < 0.55);
}

TEST_CASE("key change flips membership for about 2*gamma*(1-gamma)") {
  const double gamma = 0.5;
  const std::uint32_t vocab = 1000;
  std::mt19937_64 rng(41);
  int flipped = 0;
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) {
    const auto prev = static_cast<std::uint32_t>(rng() % vocab);
    const auto tok = static_cast<std::uint32_t>(rng() % vocab);
    flipped += is_green(prev, tok, gamma, kKey) !=
               is_green(prev, tok, gamma, kKey ^ 0x5555AAAA5555AAAAULL);
  }
  const double fraction = static_cast<double>(flipped) / samples;
  const double expected = 2.0 * gamma * (1.0 - gamma);
  CHECK(fraction > 0.6 * expected);
  CHECK(fraction < 1.4 * expected);
}

TEST_CASE("detect report algebra") {
  SUBCASE("hand z and p values") {
    // t=100, gamma=0.5: green 50 -> z=0; green 65 -> z=3.
    CHECK((50.0 - 0.5 * 100.0) / std::sqrt(100.0 * 0.25) == 0.0);
    CHECK((65.0 - 50.0) / std::sqrt(25.0) == 3.0);
    CHECK(normal_upper_tail(3.0) == doctest::Approx(0.00135).epsilon(1e-2));
    // t=400, gamma=0.25, green 130 -> z = 30/sqrt(75).
    const double z = (130.0 - 0.25 * 400.0) / std::sqrt(400.0 * 0.25 * 0.75);
    CHECK(z == doctest::Approx(3.4641).epsilon(1e-4));
    CHECK(normal_upper_tail(z) == doctest::Approx(2.66e-4).epsilon(2e-2));
  }
  SUBCASE("report fields recompute exactly") {
    const TokenStream stream = simulate_stream(500, 150, 0.5, 2.0, kKey, 9);
    const WatermarkReport r = detect(stream, 0.5, kKey);
    CHECK(r.t == 149);
    std::int64_t green = 0;
    for (std::size_t i = 1; i < stream.tokens.size(); ++i)
      green += is_green(stream.tokens[i - 1], stream.tokens[i], 0.5, kKey);
    CHECK(r.green_count == green);
    const double t = static_cast<double>(r.t);
    CHECK(r.z == (green - 0.5 * t) / std::sqrt(t * 0.25));
    CHECK(r.p == normal_upper_tail(r.z));
    CHECK(r.detected == (r.p < 0.01));
  }
  SUBCASE("short stream is an error") {
    CHECK_THROWS(detect(TokenStream{{1}, 10}, 0.5, kKey));
  }
}

TEST_CASE("simulate_stream determinism and calibration") {
  SUBCASE("same seeds give identical streams") {
    const auto a = simulate_stream(300, 100, 0.5, 3.0, kKey, 77);
    const auto b = simulate_stream(300, 100, 0.5, 3.0, kKey, 77);
    CHECK(a.tokens == b.tokens);
    const auto c = simulate_stream(300, 100, 0.5, 3.0, kKey, 78);
    CHECK(a.tokens != c.tokens);
  }
  SUBCASE("delta=0 null z has mean ~0 and unit-ish variance") {
    std::vector<double> zs;
    for (int s = 0; s < 1000; ++s) {
      const auto stream = simulate_stream(500, 200, 0.5, 0.0, kKey,
                                          derive_seed(1000, s));
      zs.push_back(detect(stream, 0.5, kKey).z);
    }
    double mean = 0.0;
    for (double z : zs) mean += z;
    mean /= zs.size();
    double var = 0.0;
    for (double z : zs) var += (z - mean) * (z - mean);
    var /= zs.size();
    CHECK(std::abs(mean) < 0.1);
    CHECK(var > 0.8);
    CHECK(var < 1.2);
  }
  SUBCASE("delta=4 is detected nearly always") {
    int detected = 0;
    const int runs = 300;
    for (int s = 0; s < runs; ++s)
      detected += detect(simulate_stream(500, 200, 0.5, 4.0, kKey,
                                         derive_seed(2000, s)),
                         0.5, kKey)
                      .detected;
    CHECK(static_cast<double>(detected) / runs >= 0.98);
  }
  SUBCASE("mean z is nondecreasing in delta") {
    double last_mean = -1e9;
    for (double delta : {0.0, 1.0, 2.0, 4.0}) {
      double mean = 0.0;
      const int runs = 200;
      for (int s = 0; s < runs; ++s)
        mean += detect(simulate_stream(300, 150, 0.5, delta, kKey,
                                       derive_seed(6000, s)),
                       0.5, kKey)
                    .z;
      mean /= runs;
      CHECK(mean > last_mean);
      last_mean = mean;
    }
  }
}

TEST_CASE("perturb") {
  const auto stream = simulate_stream(400, 120, 0.5, 4.0, kKey, 5);
  SUBCASE("fraction 0 is the identity") {
    CHECK(perturb(stream, 0.0, 99).tokens == stream.tokens);
  }
  SUBCASE("exactly round(fraction*len) positions differ") {
    for (double fraction : {0.25, 0.5, 0.75, 1.0}) {
      const auto out = perturb(stream, fraction, 123);
      std::size_t differing = 0;
      for (std::size_t i = 0; i < stream.tokens.size(); ++i)
        differing += out.tokens[i] != stream.tokens[i];
      CHECK(differing == static_cast<std::size_t>(std::llround(
                             fraction * stream.tokens.size())));
    }
  }
  SUBCASE("full perturbation destroys the watermark") {
    std::vector<double> ps;
    for (int s = 0; s < 200; ++s) {
      const auto marked =
          simulate_stream(400, 200, 0.5, 4.0, kKey, derive_seed(3000, s));
      const auto scrambled = perturb(marked, 1.0, derive_seed(4000, s));
      ps.push_back(detect(scrambled, 0.5, kKey).p);
    }
    CHECK(median(ps) > 0.01);
  }
}

TEST_CASE("edit distance") {
  CHECK(edit_distance("abc", "abc") == 0);
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(edit_distance("", "abc") == 3);
  CHECK(edit_distance("abc", "") == 3);
  CHECK(edit_distance("नमस्ते", "नमस्ते") == 0);
  // One codepoint substitution in Devanagari counts as 1, not bytes.
  CHECK(edit_distance("राम", "रात") == 1);

  std::mt19937_64 rng(42);
  auto random_string = [&](std::size_t max_len) {
    const std::size_t len = rng() % (max_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i)
      s.push_back(static_cast<char>('a' + rng() % 6));
    return s;
  };
  SUBCASE("matches the full DP oracle") {
    for (int trial = 0; trial < 300; ++trial) {
      const auto a = random_string(50);
      const auto b = random_string(50);
      std::vector<std::uint32_t> ua(a.begin(), a.end());
      std::vector<std::uint32_t> ub(b.begin(), b.end());
      CHECK(edit_distance(a, b) == oracle::edit_distance_dp(ua, ub));
    }
  }
  SUBCASE("metric axioms on random triples") {
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = random_string(25);
      const auto b = random_string(25);
      const auto c = random_string(25);
      const auto dab = edit_distance(a, b);
      CHECK(dab == edit_distance(b, a));
      CHECK((dab == 0) == (a == b));
      CHECK(dab <= edit_distance(a, c) + edit_distance(c, b));
    }
  }
}

TEST_CASE("bleu") {
  SUBCASE("identity scores 1") {
    const auto x = words({"a", "b", "c", "d", "e"});
    CHECK(bleu(x, x) == doctest::Approx(1.0));
  }
  SUBCASE("disjoint token sets score ~0") {
    CHECK(bleu(words({"a", "b", "c"}), words({"x", "y", "z"})) < 1e-6);
  }
  SUBCASE("hand case with n capped at candidate length") {
    const double expect = std::exp(1.0 - 4.0 / 3.0);
    CHECK(bleu(words({"a", "b", "c"}), words({"a", "b", "c", "d"})) ==
          doctest::Approx(expect).epsilon(1e-6));
    CHECK(expect == doctest::Approx(0.7165).epsilon(1e-4));
  }
  SUBCASE("empty candidate scores 0") {
    CHECK(bleu({}, words({"a"})) == 0.0);
  }
  SUBCASE("always within [0, 1]") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::string> cand, ref;
      for (std::size_t i = 0; i < 1 + rng() % 10; ++i)
        cand.push_back(oracle::random_word(rng, 2));
      for (std::size_t i = 0; i < 1 + rng() % 10; ++i)
        ref.push_back(oracle::random_word(rng, 2));
      const double score = bleu(cand, ref);
      CHECK(score >= 0.0);
      CHECK(score <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("semantic similarity") {
  const std::vector<double> e1{1.0, 0.0, 0.0};
  const std::vector<double> e2{0.0, 1.0, 0.0};
  SUBCASE("identical lists") {
    CHECK(semantic_similarity({e1, e2}, {e1, e2}) == doctest::Approx(1.0));
  }
  SUBCASE("orthonormal singletons") {
    CHECK(semantic_similarity({e1}, {e2}) == doctest::Approx(0.0));
  }
  SUBCASE("hand F1") {
    CHECK(semantic_similarity({e1, e2}, {e1}) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  }
  SUBCASE("symmetry") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 50; ++trial) {
      auto vec = [&] {
        std::vector<double> v(4);
        for (auto& x : v)
          x = -1.0 + 2.0 * static_cast<double>(rng() >> 11) / 9007199254740992.0;
        return v;
      };
      const std::vector<std::vector<double>> a{vec(), vec(), vec()};
      const std::vector<std::vector<double>> b{vec(), vec()};
      CHECK(semantic_similarity(a, b) ==
            doctest::Approx(semantic_similarity(b, a)).epsilon(1e-12));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS(semantic_similarity({}, {e1}));
    CHECK_THROWS(semantic_similarity({e1}, {{1.0, 0.0}}));
    CHECK_THROWS(semantic_similarity({{0.0, 0.0, 0.0}}, {e1}));
  }
}

TEST_CASE("tradeoff curve") {
  std::vector<TokenStream> streams;
  for (int i = 0; i < 5; ++i)
    streams.push_back(
        simulate_stream(300, 100, 0.5, 4.0, kKey, derive_seed(5000, i)));

  SUBCASE("fraction 0 reproduces the unperturbed detection p") {
    const std::vector<double> fractions{0.0};
    const auto points = tradeoff_curve(streams, fractions, 0.5, kKey, 7);
    REQUIRE(points.size() == streams.size());
    for (std::size_t i = 0; i < streams.size(); ++i) {
      CHECK(points[i].p == detect(streams[i], 0.5, kKey).p);
      CHECK(points[i].edit_distance == 0);
      CHECK(points[i].bleu == doctest::Approx(1.0));
    }
  }
  SUBCASE("rows ordered by (stream, fraction); distortion kicks in") {
    const std::vector<double> fractions{0.0, 0.5};
    const auto points = tradeoff_curve(streams, fractions, 0.5, kKey, 7);
    REQUIRE(points.size() == 10);
    for (std::size_t i = 0; i < streams.size(); ++i) {
      CHECK(points[2 * i].stream_id == i);
      CHECK(points[2 * i].fraction == 0.0);
      CHECK(points[2 * i].edit_distance == 0);
      CHECK(points[2 * i + 1].fraction == 0.5);
      CHECK(points[2 * i + 1].edit_distance > 0);
      CHECK(points[2 * i + 1].bleu < 1.0);
    }
  }
  SUBCASE("threaded evaluation matches sequential") {
    const std::vector<double> fractions{0.0, 0.25, 0.5};
    const auto seq = tradeoff_curve(streams, fractions, 0.5, kKey, 7, 1);
    const auto par = tradeoff_curve(streams, fractions, 0.5, kKey, 7, 4);
    REQUIRE(seq.size() == par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      CHECK(seq[i].p == par[i].p);
      CHECK(seq[i].edit_distance == par[i].edit_distance);
    }
  }
}

TEST_CASE("token stream json round trip") {
  const auto stream = simulate_stream(128, 40, 0.5, 1.0, kKey, 3);
  const auto again = token_stream_from_json(token_stream_to_json(stream));
  CHECK(again.vocab_size == stream.vocab_size);
  CHECK(again.tokens == stream.tokens);
  CHECK_THROWS(token_stream_from_json("{\"tokens\": [1,2]}"));
  CHECK_THROWS(token_stream_from_json("{\"vocab_size\": 2, \"tokens\": [5]}"));
}
