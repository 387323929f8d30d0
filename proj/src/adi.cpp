#include "agtd/adi.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "parallel.hpp"

namespace agtd {

std::string band_to_string(Band band) {
  switch (band) {
    case Band::easy_to_detect: return "easy_to_detect";
    case Band::detectable: return "detectable";
    case Band::difficult_to_detect: return "difficult_to_detect";
  }
  throw std::logic_error("unreachable band");
}

namespace {

using Sentence = std::vector<std::string>;

bool contains_word(const Sentence& sentence, const std::string& word) {
  return std::find(sentence.begin(), sentence.end(), word) != sentence.end();
}

// Sentences of `doc` containing `word`, as pointers into the document.
std::vector<const Sentence*> sentences_with(const Document& doc,
                                            const std::string& word) {
  std::vector<const Sentence*> hits;
  for (const auto& s : doc.sentences)
    if (contains_word(s, word)) hits.push_back(&s);
  return hits;
}

ContextDistribution make_context(const std::vector<std::string>& support,
                                 const std::vector<const Sentence*>& sentences) {
  std::unordered_map<std::string, std::int64_t> freq;
  for (const auto* s : sentences)
    for (const auto& token : *s) ++freq[token];
  ContextDistribution ctx;
  ctx.support = support;
  ctx.counts.reserve(support.size());
  for (const auto& w : support) {
    auto it = freq.find(w);
    ctx.counts.push_back(it == freq.end() ? 0 : it->second);
  }
  ctx.distribution = Distribution::from_counts(ctx.counts);
  return ctx;
}

}  // namespace

std::pair<ContextDistribution, ContextDistribution> word_context_distributions(
    const ParallelPair& pair, const std::string& word) {
  const auto human_sentences = sentences_with(pair.human, word);
  const auto ai_sentences = sentences_with(pair.ai, word);
  if (human_sentences.empty() || ai_sentences.empty())
    throw std::invalid_argument(
        "word_context_distributions: \"" + word +
        "\" must occur in both documents (use the intersection vocabulary)");

  std::set<std::string> combined;  // V_comb, ordered
  for (const auto* s : human_sentences) combined.insert(s->begin(), s->end());
  for (const auto* s : ai_sentences) combined.insert(s->begin(), s->end());
  const std::vector<std::string> support(combined.begin(), combined.end());

  return {make_context(support, human_sentences),
          make_context(support, ai_sentences)};
}

std::optional<double> pair_divergence(const ParallelPair& pair) {
  std::unordered_set<std::string> human_vocab;
  for (const auto& s : pair.human.sentences)
    human_vocab.insert(s.begin(), s.end());
  std::set<std::string> intersection;  // ordered for deterministic summation
  for (const auto& s : pair.ai.sentences)
    for (const auto& token : s)
      if (human_vocab.count(token)) intersection.insert(token);
  if (intersection.empty()) return std::nullopt;

  double sum = 0.0, comp = 0.0;  // Kahan
  for (const auto& word : intersection) {
    const auto [ph, pai] = word_context_distributions(pair, word);
    const double y = js_divergence(ph.distribution, pai.distribution) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(intersection.size());
}

ModelDivergence corpus_adi(const std::string& model,
                           const std::vector<ParallelPair>& pairs,
                           int threads) {
  std::vector<std::optional<double>> per_pair(pairs.size());
  parallel_for(pairs.size(), threads,
               [&](std::size_t i) { per_pair[i] = pair_divergence(pairs[i]); });

  ModelDivergence result;
  result.model = model;
  double sum = 0.0, comp = 0.0;
  for (const auto& d : per_pair) {
    if (!d) {
      ++result.pairs_skipped;
      continue;
    }
    ++result.pairs_used;
    const double y = *d - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  if (result.pairs_used == 0)
    throw std::runtime_error("corpus_adi: every pair skipped for model \"" +
                             model + "\" (no shared vocabulary)");
  result.raw_mean_jsd = sum / result.pairs_used;
  return result;
}

std::vector<DetectabilityScore> adi_spectrum(
    const std::vector<ModelDivergence>& raw, SpectrumOptions options) {
  if (raw.size() < 2)
    throw std::invalid_argument(
        "adi_spectrum: need at least two models for min-max scaling");

  // Model order must not influence anything downstream.
  std::vector<ModelDivergence> sorted(raw);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.model < b.model; });

  std::vector<double> raw_values;
  raw_values.reserve(sorted.size());
  for (const auto& m : sorted) raw_values.push_back(m.raw_mean_jsd);

  const PowerTransform transform = yeo_johnson(raw_values);
  // Negate before scaling: lower divergence => higher ADI.
  std::vector<double> negated(transform.transformed);
  for (double& v : negated) v = -v;
  const std::vector<double> scaled = min_max_scale(negated, 0.0, 100.0);

  std::vector<DetectabilityScore> scores(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto& s = scores[i];
    s.model = sorted[i].model;
    s.raw_mean_jsd = sorted[i].raw_mean_jsd;
    s.transformed = transform.transformed[i];
    s.adi = scaled[i];
    s.pairs_used = sorted[i].pairs_used;
    s.pairs_skipped = sorted[i].pairs_skipped;
    if (s.adi < options.band_easy_below)
      s.band = Band::easy_to_detect;
    else if (s.adi < options.band_detectable_below)
      s.band = Band::detectable;
    else
      s.band = Band::difficult_to_detect;
  }

  std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    if (a.adi != b.adi) return a.adi > b.adi;
    return a.model < b.model;
  });
  for (std::size_t i = 0; i < scores.size(); ++i)
    scores[i].rank = static_cast<int>(i) + 1;
  return scores;
}

}  // namespace agtd
