#include "agtd/corpus.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "agtd/unicode.hpp"
#include "json.hpp"

namespace agtd {

std::string label_to_string(Label label) {
  return label == Label::human ? "human" : "ai";
}

Label label_from_string(const std::string& s) {
  if (s == "human") return Label::human;
  if (s == "ai") return Label::ai;
  throw std::runtime_error("unknown label \"" + s +
                           "\" (expected \"human\" or \"ai\")");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : decode_utf8(text)) {
    if (is_word_cp(cp)) {
      if (cp >= U'A' && cp <= U'Z') cp += 0x20;
      append_utf8(current, cp);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> split_sentences(std::string_view text) {
  const auto cps = decode_utf8(text);
  std::vector<std::string> sentences;
  std::vector<char32_t> current;

  auto flush = [&] {
    std::size_t b = 0, e = current.size();
    while (b < e && is_space_cp(current[b])) ++b;
    while (e > b && is_space_cp(current[e - 1])) --e;
    if (e > b)
      sentences.push_back(
          encode_utf8(std::vector<char32_t>(current.begin() + b, current.begin() + e)));
    current.clear();
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_sentence_terminator_cp(cps[i])) {
      std::size_t j = i;
      while (j < cps.size() && is_sentence_terminator_cp(cps[j])) ++j;
      // A terminator run ends the sentence only before whitespace or EOT;
      // this keeps decimals like 3.14 intact.
      if (j == cps.size() || is_space_cp(cps[j])) {
        flush();
        i = j;
        continue;
      }
      current.insert(current.end(), cps.begin() + i, cps.begin() + j);
      i = j;
      continue;
    }
    current.push_back(cps[i]);
    ++i;
  }
  flush();
  return sentences;
}

void populate_sentences(Document& doc) {
  doc.sentences.clear();
  for (const auto& sentence : split_sentences(doc.text))
    doc.sentences.push_back(tokenize(sentence));
}

namespace {

std::string require_string(const nlohmann::json& obj, const char* key,
                           std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": missing required key \"" + key + "\"");
  if (!it->is_string())
    throw std::runtime_error("line " + std::to_string(line_no) + ": key \"" +
                             key + "\" must be a string");
  return it->get<std::string>();
}

bool blank_line(const std::string& line) {
  for (unsigned char c : line)
    if (!std::isspace(c)) return false;
  return true;
}

}  // namespace

std::vector<Document> parse_corpus(std::istream& stream) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (blank_line(line)) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": malformed JSON: " + e.what());
    }
    if (!obj.is_object())
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected a JSON object");
    Document doc;
    doc.id = require_string(obj, "id", line_no);
    doc.source = require_string(obj, "source", line_no);
    doc.label = label_from_string(require_string(obj, "label", line_no));
    doc.headline = require_string(obj, "headline", line_no);
    doc.text = require_string(obj, "text", line_no);
    if (obj.contains("model"))
      doc.model = require_string(obj, "model", line_no);
    if (doc.label == Label::ai && !doc.model)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": missing required key \"model\" (label=ai)");
    if (doc.id.empty())
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": \"id\" must be non-empty");
    if (!seen_ids.insert(doc.id).second)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": duplicate id \"" + doc.id + "\"");
    populate_sentences(doc);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> parse_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  return parse_corpus(in);
}

std::string serialize_corpus(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    nlohmann::json obj{{"id", doc.id},
                       {"source", doc.source},
                       {"label", label_to_string(doc.label)},
                       {"headline", doc.headline},
                       {"text", doc.text}};
    if (doc.model) obj["model"] = *doc.model;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

PairingResult pair_documents(const std::vector<Document>& humans,
                             const std::vector<Document>& ais) {
  std::unordered_map<std::string, const Document*> by_headline;
  for (const auto& h : humans) {
    if (!by_headline.emplace(h.headline, &h).second)
      throw std::runtime_error("ambiguous pairing key: two human documents "
                               "share the headline \"" +
                               h.headline + "\"");
  }
  PairingResult result;
  std::unordered_set<const Document*> matched_humans;
  for (const auto& a : ais) {
    auto it = by_headline.find(a.headline);
    if (it == by_headline.end()) {
      result.unmatched_ais.push_back(a);
      continue;
    }
    matched_humans.insert(it->second);
    result.pairs.push_back(ParallelPair{*it->second, a, a.headline});
  }
  for (const auto& h : humans)
    if (!matched_humans.count(&h)) result.unmatched_humans.push_back(h);
  return result;
}

}  // namespace agtd
