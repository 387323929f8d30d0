#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace agtd {

enum class Label { human, ai };

std::string label_to_string(Label label);
Label label_from_string(const std::string& s);

/// One labeled article. `sentences` is derived from `text` by sentence
/// splitting followed by tokenization and is recomputable at any time.
struct Document {
  std::string id;
  std::string source;
  Label label = Label::human;
  std::optional<std::string> model;  // generator name; required when label=ai
  std::string headline;
  std::string text;
  std::vector<std::vector<std::string>> sentences;
};

/// A human article and an AI article that share a headline key.
struct ParallelPair {
  Document human;
  Document ai;
  std::string pair_key;
};

struct PairingResult {
  std::vector<ParallelPair> pairs;
  std::vector<Document> unmatched_humans;
  std::vector<Document> unmatched_ais;
};

/// Word tokens: maximal runs of letter/digit/combining-mark codepoints.
/// ASCII letters are lowercased; all other scripts are preserved verbatim.
std::vector<std::string> tokenize(std::string_view text);

/// Sentence strings: splits where a run of terminators (danda, double danda,
/// '.', '?', '!') is followed by whitespace or end of text. The terminator
/// run is excluded; segments are trimmed and empty segments dropped.
std::vector<std::string> split_sentences(std::string_view text);

/// Parses a JSON-lines corpus. Each line is an object with keys id, source,
/// label, headline, text (model required when label="ai"). Documents come
/// back in file order with `sentences` populated.
std::vector<Document> parse_corpus(std::istream& stream);
std::vector<Document> parse_corpus_file(const std::string& path);

/// Serializes documents back to JSON-lines (derived fields omitted).
std::string serialize_corpus(const std::vector<Document>& docs);

/// Pairs human and AI documents by exact headline match. A human may pair
/// with several AI documents (one per model). Unmatched documents are
/// reported, never silently dropped. Two humans sharing a headline is an
/// error (ambiguous key).
PairingResult pair_documents(const std::vector<Document>& humans,
                             const std::vector<Document>& ais);

/// Recomputes the derived sentence/token structure of a document.
void populate_sentences(Document& doc);

}  // namespace agtd
