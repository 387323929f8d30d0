#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agtd/corpus.hpp"
#include "agtd/numerics.hpp"

namespace agtd {

/// Word frequencies over a combined context vocabulary, normalized into a
/// probability distribution. Both sides of a word comparison share the same
/// ordered support.
struct ContextDistribution {
  std::vector<std::string> support;   // ordered, no duplicates
  std::vector<std::int64_t> counts;   // aligned with support
  Distribution distribution;          // counts normalized
};

enum class Band { easy_to_detect, detectable, difficult_to_detect };

std::string band_to_string(Band band);

struct DetectabilityScore {
  std::string model;
  double raw_mean_jsd = 0.0;
  double transformed = 0.0;
  double adi = 0.0;  // in [0, 100]; higher = harder to detect
  int rank = 0;      // 1 = highest adi
  Band band = Band::easy_to_detect;
  int pairs_used = 0;
  int pairs_skipped = 0;
};

struct ModelDivergence {
  std::string model;
  double raw_mean_jsd = 0.0;
  int pairs_used = 0;
  int pairs_skipped = 0;
};

struct SpectrumOptions {
  double band_easy_below = 33.3;        // adi below this: easy_to_detect
  double band_detectable_below = 66.6;  // below this: detectable
};

/// Context distributions of `word` inside one parallel pair: sentences of
/// each document containing the word are extracted, the combined vocabulary
/// of those sentences forms the shared support, and per-word frequencies are
/// normalized. The word must occur on both sides.
std::pair<ContextDistribution, ContextDistribution> word_context_distributions(
    const ParallelPair& pair, const std::string& word);

/// Mean JSD over the intersection vocabulary of the two documents, or
/// nullopt when the intersection is empty (a reported skip, not a failure).
std::optional<double> pair_divergence(const ParallelPair& pair);

/// Mean of pair_divergence over non-skipped pairs for one model.
/// Throws when every pair is skipped.
ModelDivergence corpus_adi(const std::string& model,
                           const std::vector<ParallelPair>& pairs,
                           int threads = 1);

/// Transforms per-model raw divergences into the 0-100 ADI spectrum:
/// Yeo-Johnson jointly over the raw means, then min-max scaling, oriented so
/// that lower divergence means higher ADI. Scores come back rank order
/// (rank 1 = highest ADI). Needs at least two models.
std::vector<DetectabilityScore> adi_spectrum(
    const std::vector<ModelDivergence>& raw, SpectrumOptions options = {});

}  // namespace agtd
