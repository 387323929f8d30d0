#pragma once

#include <array>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agtd/corpus.hpp"

namespace agtd {

// The canonical rewrite instruction list; rewrite order must match.
inline constexpr std::array<std::string_view, 6> kRaidarPrompts{
    "Concise this for me in Hindi only and keep all the information.",
    "Help me polish this in Hindi only.",
    "Make this fluent in Hindi only while making minimal changes.",
    "Refine the following paragraph for me in Hindi only.",
    "Revise this in Hindi only with your best efforts.",
    "Rewrite this in Hindi only.",
};

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;
  std::string doc_id;
};

/// One feature per rewrite prompt: character edit distance between the
/// original text and the rewrite, normalized by the original's length in
/// Unicode scalar values. Expects exactly six rewrites in prompt order.
FeatureVector rewrite_features(const Document& original,
                               std::span<const std::string> rewrites);

/// Fixed eight-feature stylometric vector: sentence-length and word-count
/// statistics, punctuation/danda/comma densities, digit-run groups and the
/// fraction of those groups matching date/time patterns.
FeatureVector stylometric_features(const Document& doc);

/// Names of the stylometric features, in emission order.
std::vector<std::string> stylometric_feature_names();

struct RewriterConfig {
  std::string command_template;  // "{prompt}" is replaced (shell-quoted)
  std::string cache_dir;
  double timeout_seconds = 120.0;
};

/// Runs a user-configured external rewriter: the prompt is substituted into
/// the command template, the text is piped to stdin, and stdout is the
/// rewrite. Results are cached on disk keyed by (sha256(text),
/// sha256(prompt)); cache hits spawn no process.
class ExternalRewriter {
 public:
  explicit ExternalRewriter(RewriterConfig config);

  std::string rewrite(const std::string& text, const std::string& prompt);

  /// Processes actually spawned (cache misses). Observable for testing the
  /// cache contract.
  int spawn_count() const { return spawn_count_; }

 private:
  RewriterConfig config_;
  int spawn_count_ = 0;
  std::mutex cache_mutex_;
};

}  // namespace agtd
