#include "agtd/corpus.hpp"

#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

using namespace agtd;

TEST_CASE("tokenize basics") {
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("Hello, World") == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("  a\tb\nc ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize("don't") == std::vector<std::string>{"don", "t"});
  CHECK(tokenize("v2.0") == std::vector<std::string>{"v2", "0"});
}

TEST_CASE("tokenize devanagari") {
  // Danda between two words separates them and never becomes a token.
  CHECK(tokenize("राम।श्याम") == std::vector<std::string>{"राम", "श्याम"});
  // Matras and virama stay inside the token.
  CHECK(tokenize("नमस्ते दुनिया") == std::vector<std::string>{"नमस्ते", "दुनिया"});
  // Devanagari digits are word characters; the abbreviation sign is not.
  CHECK(tokenize("१२३॰") == std::vector<std::string>{"१२३"});
  // No case folding outside ASCII.
  CHECK(tokenize("Ärger") == std::vector<std::string>{"Ärger"});
}

TEST_CASE("tokenize is idempotent on its own joined output") {
  std::mt19937_64 rng(21);
  const std::vector<std::string> corpus_bits{
      "Hello, WORLD!", "यह एक वाक्य है।", "a1 b2 c3", "मिश्रित Hindi text 42",
      "punct... (lots) [of] {it}"};
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    for (int i = 0; i < 4; ++i) {
      text += corpus_bits[rng() % corpus_bits.size()];
      text += ' ';
    }
    const auto once = tokenize(text);
    std::string joined;
    for (const auto& t : once) {
      joined += t;
      joined += ' ';
    }
    CHECK(tokenize(joined) == once);
  }
}

TEST_CASE("split_sentences basics") {
  CHECK(split_sentences("a. b.") == std::vector<std::string>{"a", "b"});
  CHECK(split_sentences("no terminator") ==
        std::vector<std::string>{"no terminator"});
  CHECK(split_sentences("") == std::vector<std::string>{});
  // Decimal points do not split.
  CHECK(split_sentences("pi is 3.14 exactly.") ==
        std::vector<std::string>{"pi is 3.14 exactly"});
  // A terminator run is consumed as one boundary.
  CHECK(split_sentences("what?! next.") ==
        std::vector<std::string>{"what", "next"});
}

TEST_CASE("split_sentences danda clauses") {
  const auto s = split_sentences("पहला वाक्य। दूसरा वाक्य। तीसरा वाक्य।");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == "पहला वाक्य");
  CHECK(s[1] == "दूसरा वाक्य");
  CHECK(s[2] == "तीसरा वाक्य");
  CHECK(split_sentences("एक॥ दो।").size() == 2);
}

namespace {

std::vector<Document> parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in);
}

const char* kHumanLine =
    R"({"id":"h1","source":"bbc","label":"human","headline":"headline one","text":"पहला वाक्य। दूसरा वाक्य।"})";

}  // namespace

TEST_CASE("parse_corpus basics") {
  CHECK(parse_text("").empty());

  const auto docs = parse_text(std::string(kHumanLine) + "\n");
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].id == "h1");
  CHECK(docs[0].label == Label::human);
  CHECK_FALSE(docs[0].model.has_value());
  REQUIRE(docs[0].sentences.size() == 2);
  CHECK(docs[0].sentences[0] == std::vector<std::string>{"पहला", "वाक्य"});
}

TEST_CASE("parse_corpus errors carry line numbers and key names") {
  // missing "text" at line 1
  CHECK_THROWS_WITH_AS(
      parse_text(R"({"id":"x","source":"s","label":"human","headline":"h"})"),
      doctest::Contains("\"text\""), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse_text(R"({"id":"x","source":"s","label":"human","headline":"h"})"),
      doctest::Contains("line 1"), std::runtime_error);
  // malformed JSON at line 2
  CHECK_THROWS_WITH_AS(parse_text(std::string(kHumanLine) + "\n{oops\n"),
                       doctest::Contains("line 2"), std::runtime_error);
  // ai without model
  CHECK_THROWS_WITH_AS(
      parse_text(
          R"({"id":"a","source":"s","label":"ai","headline":"h","text":"t"})"),
      doctest::Contains("\"model\""), std::runtime_error);
  // duplicate id
  CHECK_THROWS_WITH_AS(
      parse_text(std::string(kHumanLine) + "\n" + kHumanLine + "\n"),
      doctest::Contains("duplicate id"), std::runtime_error);
  // unknown label
  CHECK_THROWS(parse_text(
      R"({"id":"x","source":"s","label":"robot","headline":"h","text":"t"})"));
}

TEST_CASE("corpus round-trips through serialization") {
  std::string text = std::string(kHumanLine) + "\n" +
      R"({"id":"a1","source":"bbc","label":"ai","model":"gpt-4","headline":"headline one","text":"कुछ पाठ।"})" +
      "\n";
  const auto docs = parse_text(text);
  const auto again = parse_text(serialize_corpus(docs));
  REQUIRE(again.size() == docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    CHECK(again[i].id == docs[i].id);
    CHECK(again[i].source == docs[i].source);
    CHECK(again[i].label == docs[i].label);
    CHECK(again[i].model == docs[i].model);
    CHECK(again[i].headline == docs[i].headline);
    CHECK(again[i].text == docs[i].text);
    CHECK(again[i].sentences == docs[i].sentences);
  }
}

namespace {

Document make_doc(const std::string& id, Label label,
                  const std::string& headline,
                  const std::string& model = "") {
  Document d;
  d.id = id;
  d.source = "test";
  d.label = label;
  d.headline = headline;
  d.text = "text.";
  if (!model.empty()) d.model = model;
  populate_sentences(d);
  return d;
}

}  // namespace

TEST_CASE("pair_documents") {
  const auto h1 = make_doc("h1", Label::human, "alpha");
  const auto h2 = make_doc("h2", Label::human, "beta");
  const auto a1 = make_doc("a1", Label::ai, "alpha", "m1");
  const auto a2 = make_doc("a2", Label::ai, "alpha", "m2");
  const auto a3 = make_doc("a3", Label::ai, "gamma", "m1");

  SUBCASE("one-to-one") {
    const auto r = pair_documents({h1}, {a1});
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].pair_key == "alpha");
    CHECK(r.unmatched_humans.empty());
    CHECK(r.unmatched_ais.empty());
  }
  SUBCASE("one human, two models") {
    const auto r = pair_documents({h1}, {a1, a2});
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.pairs[0].ai.id == "a1");
    CHECK(r.pairs[1].ai.id == "a2");
  }
  SUBCASE("disjoint headlines: everything reported unmatched") {
    const auto r = pair_documents({h2}, {a3});
    CHECK(r.pairs.empty());
    CHECK(r.unmatched_humans.size() == 1);
    CHECK(r.unmatched_ais.size() == 1);
  }
  SUBCASE("ambiguous human headline is an error") {
    const auto h1b = make_doc("h1b", Label::human, "alpha");
    CHECK_THROWS_WITH_AS(pair_documents({h1, h1b}, {a1}),
                         doctest::Contains("ambiguous"), std::runtime_error);
  }
  SUBCASE("output size bounded by ais; members come from the inputs") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Document> humans, ais;
      for (int i = 0; i < 5; ++i)
        humans.push_back(make_doc("h" + std::to_string(i), Label::human,
                                  "head" + std::to_string(rng() % 8)));
      // Unique headlines on the human side.
      std::sort(humans.begin(), humans.end(),
                [](const Document& x, const Document& y) {
                  return x.headline < y.headline;
                });
      humans.erase(std::unique(humans.begin(), humans.end(),
                               [](const Document& x, const Document& y) {
                                 return x.headline == y.headline;
                               }),
                   humans.end());
      for (int i = 0; i < 6; ++i)
        ais.push_back(make_doc("a" + std::to_string(i), Label::ai,
                               "head" + std::to_string(rng() % 8), "m"));
      const auto r = pair_documents(humans, ais);
      CHECK(r.pairs.size() <= ais.size());
      CHECK(r.pairs.size() + r.unmatched_ais.size() == ais.size());
      for (const auto& p : r.pairs) {
        CHECK(p.human.label == Label::human);
        CHECK(p.ai.label == Label::ai);
        CHECK(p.human.headline == p.ai.headline);
      }
    }
  }
}
