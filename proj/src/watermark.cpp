#include "agtd/watermark.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "agtd/hashing.hpp"
#include "agtd/numerics.hpp"
#include "agtd/unicode.hpp"
#include "json.hpp"
#include "parallel.hpp"

namespace agtd {

namespace {

constexpr double kTwo53 = 9007199254740992.0;  // 2^53

// Uniform double in [0, 1) from the top 53 bits; bit-identical everywhere.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / kTwo53);
}

// Unbiased bounded draw via mask-and-reject.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::logic_error("bounded: n must be positive");
  std::uint64_t mask = n - 1;
  mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
  mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
  for (;;) {
    const std::uint64_t r = rng() & mask;
    if (r < n) return r;
  }
}

void check_stream(const TokenStream& stream) {
  if (stream.vocab_size < 2)
    throw std::invalid_argument("token stream: vocab_size must be >= 2");
  for (auto t : stream.tokens)
    if (t >= stream.vocab_size)
      throw std::invalid_argument("token stream: token id " +
                                  std::to_string(t) + " out of range");
}

}  // namespace

bool is_green(std::uint32_t prev_token, std::uint32_t token, double gamma,
              std::uint64_t key) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("is_green: gamma must be in (0, 1)");
  const std::uint64_t seed64 =
      splitmix64(key ^ (static_cast<std::uint64_t>(prev_token) *
                        0x9E3779B97F4A7C15ULL));
  const std::uint64_t u =
      splitmix64(seed64 ^ static_cast<std::uint64_t>(token)) &
      ((1ULL << 53) - 1);
  return static_cast<double>(u) / kTwo53 < gamma;
}

WatermarkReport detect(const TokenStream& stream, double gamma,
                       std::uint64_t key, double threshold) {
  check_stream(stream);
  if (stream.tokens.size() < 2)
    throw std::invalid_argument(
        "detect: stream must have at least 2 tokens (the first token has no "
        "predecessor)");
  WatermarkReport report;
  report.t = static_cast<std::int64_t>(stream.tokens.size()) - 1;
  report.gamma = gamma;
  for (std::size_t i = 1; i < stream.tokens.size(); ++i)
    if (is_green(stream.tokens[i - 1], stream.tokens[i], gamma, key))
      ++report.green_count;
  const double t = static_cast<double>(report.t);
  report.z = (static_cast<double>(report.green_count) - gamma * t) /
             std::sqrt(t * gamma * (1.0 - gamma));
  report.p = normal_upper_tail(report.z);
  report.detected = report.p < threshold;
  return report;
}

TokenStream simulate_stream(std::uint32_t vocab_size, std::size_t length,
                            double gamma, double delta, std::uint64_t key,
                            std::uint64_t rng_seed) {
  if (vocab_size < 2)
    throw std::invalid_argument("simulate_stream: vocab_size must be >= 2");
  if (length < 2)
    throw std::invalid_argument("simulate_stream: length must be >= 2");
  if (delta < 0.0)
    throw std::invalid_argument("simulate_stream: delta must be >= 0");

  std::mt19937_64 rng(rng_seed);
  TokenStream stream;
  stream.vocab_size = vocab_size;
  stream.tokens.reserve(length);
  stream.tokens.push_back(
      static_cast<std::uint32_t>(bounded(rng, vocab_size)));

  const double green_weight = std::exp(delta);
  std::vector<bool> green(vocab_size);
  for (std::size_t step = 1; step < length; ++step) {
    const std::uint32_t prev = stream.tokens.back();
    std::size_t green_count = 0;
    for (std::uint32_t t = 0; t < vocab_size; ++t) {
      green[t] = is_green(prev, t, gamma, key);
      green_count += green[t];
    }
    const double total = green_weight * static_cast<double>(green_count) +
                         static_cast<double>(vocab_size - green_count);
    double target = uniform01(rng) * total;
    std::uint32_t chosen = vocab_size - 1;
    for (std::uint32_t t = 0; t < vocab_size; ++t) {
      target -= green[t] ? green_weight : 1.0;
      if (target < 0.0) {
        chosen = t;
        break;
      }
    }
    stream.tokens.push_back(chosen);
  }
  return stream;
}

TokenStream perturb(const TokenStream& stream, double fraction,
                    std::uint64_t rng_seed) {
  check_stream(stream);
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::invalid_argument("perturb: fraction must be in [0, 1]");
  TokenStream out = stream;
  const std::size_t n = stream.tokens.size();
  const auto k = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(n)));
  if (k == 0) return out;

  std::mt19937_64 rng(rng_seed);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + bounded(rng, n - i);
    std::swap(idx[i], idx[j]);
    const std::size_t pos = idx[i];
    // Uniform over the vocabulary minus the current token.
    const auto r = static_cast<std::uint32_t>(
        bounded(rng, stream.vocab_size - 1));
    out.tokens[pos] = r >= out.tokens[pos] ? r + 1 : r;
  }
  return out;
}

std::int64_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<char32_t> ca = decode_utf8(a);
  std::vector<char32_t> cb = decode_utf8(b);

  // Strip common prefix/suffix before the DP.
  std::size_t pre = 0;
  while (pre < ca.size() && pre < cb.size() && ca[pre] == cb[pre]) ++pre;
  std::size_t sa = ca.size(), sb = cb.size();
  while (sa > pre && sb > pre && ca[sa - 1] == cb[sb - 1]) { --sa; --sb; }

  const std::size_t n = sa - pre, m = sb - pre;
  if (n == 0) return static_cast<std::int64_t>(m);
  if (m == 0) return static_cast<std::int64_t>(n);

  std::vector<std::int64_t> row(m + 1);
  std::iota(row.begin(), row.end(), 0);
  for (std::size_t i = 1; i <= n; ++i) {
    std::int64_t diag = row[0];
    row[0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::int64_t up = row[j];
      const std::int64_t cost = ca[pre + i - 1] == cb[pre + j - 1] ? 0 : 1;
      row[j] = std::min({row[j - 1] + 1, up + 1, diag + cost});
      diag = up;
    }
  }
  return row[m];
}

namespace {

// N-gram counts keyed by tokens joined with an unlikely separator.
std::unordered_map<std::string, std::int64_t> ngram_counts(
    std::span<const std::string> tokens, int n) {
  std::unordered_map<std::string, std::int64_t> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (int j = 0; j < n; ++j) {
      if (j) key.push_back('\x1f');
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

double bleu(std::span<const std::string> candidate,
            std::span<const std::string> reference, int max_n) {
  if (max_n < 1) throw std::invalid_argument("bleu: max_n must be >= 1");
  if (candidate.empty()) return 0.0;

  const int n_max = std::min<int>(max_n, static_cast<int>(candidate.size()));
  constexpr double kEpsilon = 1e-9;
  double log_sum = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    std::int64_t matched = 0, total = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    const double numerator =
        matched == 0 ? kEpsilon : static_cast<double>(matched);
    log_sum += std::log(numerator / static_cast<double>(total));
  }
  const double geo_mean = std::exp(log_sum / n_max);
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
  return brevity * geo_mean;
}

double semantic_similarity(const std::vector<std::vector<double>>& emb_a,
                           const std::vector<std::vector<double>>& emb_b) {
  if (emb_a.empty() || emb_b.empty())
    throw std::invalid_argument("semantic_similarity: empty embedding list");
  const std::size_t dim = emb_a.front().size();
  auto norm_of = [&](const std::vector<double>& v) {
    if (v.size() != dim)
      throw std::invalid_argument("semantic_similarity: dimension mismatch");
    double s = 0.0;
    for (double x : v) s += x * x;
    if (s <= 0.0)
      throw std::invalid_argument("semantic_similarity: zero vector");
    return std::sqrt(s);
  };
  std::vector<double> norm_a, norm_b;
  for (const auto& v : emb_a) norm_a.push_back(norm_of(v));
  for (const auto& v : emb_b) norm_b.push_back(norm_of(v));

  auto best_cosine = [&](const std::vector<double>& v, double vn,
                         const std::vector<std::vector<double>>& others,
                         const std::vector<double>& norms) {
    double best = -1.0;
    for (std::size_t j = 0; j < others.size(); ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dot += v[k] * others[j][k];
      best = std::max(best, dot / (vn * norms[j]));
    }
    return best;
  };

  double recall = 0.0;
  for (std::size_t i = 0; i < emb_a.size(); ++i)
    recall += best_cosine(emb_a[i], norm_a[i], emb_b, norm_b);
  recall /= static_cast<double>(emb_a.size());
  double precision = 0.0;
  for (std::size_t j = 0; j < emb_b.size(); ++j)
    precision += best_cosine(emb_b[j], norm_b[j], emb_a, norm_a);
  precision /= static_cast<double>(emb_b.size());

  const double denom = precision + recall;
  if (std::abs(denom) < 1e-300) return 0.0;
  return 2.0 * precision * recall / denom;
}

namespace {

std::string stringify_tokens(const TokenStream& stream) {
  std::string out;
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(stream.tokens[i]);
  }
  return out;
}

std::vector<std::string> token_words(const TokenStream& stream) {
  std::vector<std::string> words;
  words.reserve(stream.tokens.size());
  for (auto t : stream.tokens) words.push_back(std::to_string(t));
  return words;
}

}  // namespace

std::vector<TradeoffPoint> tradeoff_curve(std::span<const TokenStream> originals,
                                          std::span<const double> fractions,
                                          double gamma, std::uint64_t key,
                                          std::uint64_t rng_seed, int threads) {
  const std::size_t cells = originals.size() * fractions.size();
  std::vector<TradeoffPoint> points(cells);
  parallel_for(cells, threads, [&](std::size_t cell) {
    const std::size_t i = cell / fractions.size();
    const std::size_t j = cell % fractions.size();
    const TokenStream& original = originals[i];
    const TokenStream perturbed =
        perturb(original, fractions[j], derive_seed(rng_seed, i, j));
    const WatermarkReport report = detect(perturbed, gamma, key);
    TradeoffPoint& pt = points[cell];
    pt.stream_id = i;
    pt.fraction = fractions[j];
    pt.edit_distance =
        edit_distance(stringify_tokens(original), stringify_tokens(perturbed));
    pt.bleu = bleu(token_words(perturbed), token_words(original));
    pt.z = report.z;
    pt.p = report.p;
    pt.gamma = gamma;
  });
  return points;
}

std::string token_stream_to_json(const TokenStream& stream) {
  nlohmann::json obj{{"vocab_size", stream.vocab_size},
                     {"tokens", stream.tokens}};
  return obj.dump();
}

TokenStream token_stream_from_json(std::string_view json_text) {
  nlohmann::json obj = nlohmann::json::parse(json_text);
  TokenStream stream;
  if (!obj.contains("vocab_size") || !obj.contains("tokens"))
    throw std::runtime_error(
        "token stream JSON must contain \"vocab_size\" and \"tokens\"");
  stream.vocab_size = obj["vocab_size"].get<std::uint32_t>();
  stream.tokens = obj["tokens"].get<std::vector<std::uint32_t>>();
  check_stream(stream);
  return stream;
}

}  // namespace agtd
