#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agtd {

struct TokenStream {
  std::vector<std::uint32_t> tokens;
  std::uint32_t vocab_size = 0;
};

std::string token_stream_to_json(const TokenStream& stream);
TokenStream token_stream_from_json(std::string_view json_text);

/// Green-list membership. Normative bit recipe so detectors interoperate:
///   seed64 = splitmix64(key XOR (prev_token * 0x9E3779B97F4A7C15))
///   green iff (splitmix64(seed64 XOR token) mod 2^53) / 2^53 < gamma
bool is_green(std::uint32_t prev_token, std::uint32_t token, double gamma,
              std::uint64_t key);

struct WatermarkReport {
  std::int64_t t = 0;            // scored tokens (stream length - 1)
  std::int64_t green_count = 0;
  double gamma = 0.0;
  double z = 0.0;
  double p = 1.0;
  bool detected = false;         // p < threshold
};

/// Scores every token against its predecessor's green list and tests the
/// green count against the binomial null. Streams must have length >= 2.
WatermarkReport detect(const TokenStream& stream, double gamma,
                       std::uint64_t key, double threshold = 0.01);

/// Synthetic watermarked stream: each token is drawn from a distribution
/// that multiplies green-token mass by exp(delta) and renormalizes.
/// delta = 0 is unbiased uniform sampling. Fully reproducible from rng_seed.
TokenStream simulate_stream(std::uint32_t vocab_size, std::size_t length,
                            double gamma, double delta, std::uint64_t key,
                            std::uint64_t rng_seed);

/// Substitution proxy for paraphrase: replaces round(fraction * len)
/// uniformly chosen positions with tokens drawn uniformly from the rest of
/// the vocabulary (so every touched position actually changes).
TokenStream perturb(const TokenStream& stream, double fraction,
                    std::uint64_t rng_seed);

/// Character-level Levenshtein distance over Unicode scalar values.
std::int64_t edit_distance(std::string_view a, std::string_view b);

/// BLEU with uniform n-gram weights up to max_n (capped at the candidate
/// length), brevity penalty, and epsilon smoothing of zero-count precisions.
double bleu(std::span<const std::string> candidate,
            std::span<const std::string> reference, int max_n = 4);

/// Greedy-matching F1 over per-token embeddings (cosine similarity).
double semantic_similarity(const std::vector<std::vector<double>>& emb_a,
                           const std::vector<std::vector<double>>& emb_b);

struct TradeoffPoint {
  std::size_t stream_id = 0;
  double fraction = 0.0;
  std::int64_t edit_distance = 0;
  double bleu = 0.0;
  std::optional<double> semantic_sim;
  double z = 0.0;
  double p = 1.0;
  double gamma = 0.0;
};

/// One detection/distortion cell per (stream, fraction), ordered by
/// (stream index, fraction index).
std::vector<TradeoffPoint> tradeoff_curve(std::span<const TokenStream> originals,
                                          std::span<const double> fractions,
                                          double gamma, std::uint64_t key,
                                          std::uint64_t rng_seed,
                                          int threads = 1);

}  // namespace agtd
