#include "agtd/features.hpp"

#include <unistd.h>

#include <filesystem>
#include <random>

#include "agtd/watermark.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace agtd;

namespace {

Document make_doc(const std::string& id, const std::string& text,
                  Label label = Label::human) {
  Document d;
  d.id = id;
  d.source = "test";
  d.label = label;
  if (label == Label::ai) d.model = "m";
  d.headline = "h";
  d.text = text;
  populate_sentences(d);
  return d;
}

std::filesystem::path fresh_cache_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("agtd_cache_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("rewrite features") {
  SUBCASE("identical rewrites give all-zero features") {
    const auto doc = make_doc("d1", "कुछ पाठ यहाँ।");
    const std::vector<std::string> rewrites(6, doc.text);
    const auto fv = rewrite_features(doc, rewrites);
    REQUIRE(fv.names.size() == 6);
    CHECK(fv.names.front() == "raidar_p1");
    CHECK(fv.names.back() == "raidar_p6");
    for (double v : fv.values) CHECK(v == 0.0);
  }
  SUBCASE("normalization by original character count") {
    const auto doc = make_doc("d2", std::string(100, 'a'));
    std::vector<std::string> rewrites(6, doc.text);
    rewrites[2] = std::string(80, 'a');  // edit distance 20
    const auto fv = rewrite_features(doc, rewrites);
    CHECK(fv.values[2] == doctest::Approx(0.2));
  }
  SUBCASE("wrong rewrite count is an error") {
    const auto doc = make_doc("d3", "text");
    CHECK_THROWS(rewrite_features(doc, std::vector<std::string>(5, "x")));
    CHECK_THROWS(rewrite_features(doc, std::vector<std::string>(7, "x")));
  }
  SUBCASE("values bounded by the insert-everything case") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 30; ++trial) {
      std::string text, rewrite;
      for (int w = 0; w < 8; ++w) text += oracle::random_word(rng, 5) + " ";
      for (int w = 0; w < 12; ++w) rewrite += oracle::random_word(rng, 5) + " ";
      const auto doc = make_doc("d", text);
      const auto fv =
          rewrite_features(doc, std::vector<std::string>(6, rewrite));
      const double bound =
          static_cast<double>(rewrite.size() + text.size()) / text.size();
      for (double v : fv.values) {
        CHECK(v >= 0.0);
        CHECK(v <= bound);
      }
    }
  }
}

TEST_CASE("raidar direction fixture: AI rewrites change less") {
  // AI documents get near-copy rewrites, human documents heavy rewrites.
  std::mt19937_64 rng(62);
  double ai_mean = 0.0, human_mean = 0.0;
  for (int i = 0; i < 10; ++i) {
    std::string text;
    for (int w = 0; w < 30; ++w) text += oracle::random_word(rng, 6) + " ";

    const auto ai_doc =
        make_doc("ai" + std::to_string(i), text, Label::ai);
    std::string near_copy = text;
    near_copy[3] = near_copy[3] == 'a' ? 'b' : 'a';  // one-character touch
    const auto ai_fv =
        rewrite_features(ai_doc, std::vector<std::string>(6, near_copy));

    const auto human_doc = make_doc("h" + std::to_string(i), text);
    std::string heavy;
    for (int w = 0; w < 30; ++w) heavy += oracle::random_word(rng, 6) + " ";
    const auto human_fv =
        rewrite_features(human_doc, std::vector<std::string>(6, heavy));

    for (double v : ai_fv.values) ai_mean += v;
    for (double v : human_fv.values) human_mean += v;
  }
  CHECK(ai_mean / 60.0 < human_mean / 60.0);
}

TEST_CASE("stylometric features") {
  SUBCASE("names are stable") {
    const auto names = stylometric_feature_names();
    const std::vector<std::string> expected{
        "mean_words_per_sentence", "leading_paragraph_words",
        "total_words",             "punct_density",
        "danda_density",           "comma_density",
        "digit_run_count",         "datetime_fraction"};
    CHECK(names == expected);
    CHECK(stylometric_features(make_doc("d", "x")).names == expected);
  }
  SUBCASE("empty text gives all zeros") {
    const auto fv = stylometric_features(make_doc("d", ""));
    for (double v : fv.values) CHECK(v == 0.0);
  }
  SUBCASE("hand counts") {
    const auto fv = stylometric_features(make_doc("d", "a b. c d."));
    CHECK(fv.values[0] == doctest::Approx(2.0));  // mean words per sentence
    CHECK(fv.values[1] == doctest::Approx(2.0));  // leading = first sentence
    CHECK(fv.values[2] == doctest::Approx(4.0));  // total words
    CHECK(fv.values[3] == doctest::Approx(2.0 / 9.0));  // two dots, 9 chars
  }
  SUBCASE("leading paragraph via blank line") {
    const auto fv =
        stylometric_features(make_doc("d", "one two three\n\nrest here. more."));
    CHECK(fv.values[1] == doctest::Approx(3.0));
  }
  SUBCASE("date pattern") {
    const auto fv = stylometric_features(make_doc("d", "घटना 12/05/2024 की है।"));
    CHECK(fv.values[6] == doctest::Approx(1.0));  // one digit group
    CHECK(fv.values[7] == doctest::Approx(1.0));  // all groups match
  }
  SUBCASE("time and plain numbers") {
    const auto fv =
        stylometric_features(make_doc("d", "at 09:30 we saw 1200 birds"));
    CHECK(fv.values[6] == doctest::Approx(2.0));
    CHECK(fv.values[7] == doctest::Approx(0.5));
  }
  SUBCASE("danda and comma densities") {
    const auto fv = stylometric_features(make_doc("d", "क, ख। ग॥"));
    // 8 codepoints total: danda+double danda = 2/8, comma 1/8.
    CHECK(fv.values[4] == doctest::Approx(2.0 / 8.0));
    CHECK(fv.values[5] == doctest::Approx(1.0 / 8.0));
  }
  SUBCASE("determinism") {
    const auto doc = make_doc("d", "कुछ पाठ। 12/05/2024, ठीक 09:30 बजे।");
    const auto a = stylometric_features(doc);
    const auto b = stylometric_features(doc);
    CHECK(a.values == b.values);
    CHECK(a.names == b.names);
  }
}

TEST_CASE("external rewriter") {
  SUBCASE("identity filter returns the input") {
    RewriterConfig config{"cat", fresh_cache_dir("id").string(), 30.0};
    ExternalRewriter rewriter(config);
    const std::string text = "नमस्तेини world\nline two\n";
    CHECK(rewriter.rewrite(text, "any prompt") == text);
    CHECK(rewriter.spawn_count() == 1);
  }
  SUBCASE("cache serves repeats without spawning") {
    RewriterConfig config{"cat", fresh_cache_dir("cache").string(), 30.0};
    ExternalRewriter rewriter(config);
    const auto first = rewriter.rewrite("some text", "p");
    const auto second = rewriter.rewrite("some text", "p");
    CHECK(first == second);
    CHECK(rewriter.spawn_count() == 1);
    rewriter.rewrite("some text", "другой prompt");
    CHECK(rewriter.spawn_count() == 2);
  }
  SUBCASE("prompt substitution reaches the command") {
    RewriterConfig config{"echo -n {prompt}", fresh_cache_dir("sub").string(),
                          30.0};
    ExternalRewriter rewriter(config);
    CHECK(rewriter.rewrite("ignored", "hello 'quoted' prompt") ==
          "hello 'quoted' prompt");
  }
  SUBCASE("non-zero exit carries the status") {
    RewriterConfig config{"exit 3", fresh_cache_dir("fail").string(), 30.0};
    ExternalRewriter rewriter(config);
    CHECK_THROWS_WITH_AS(rewriter.rewrite("text", "p"),
                         doctest::Contains("status 3"), std::runtime_error);
  }
  SUBCASE("empty output is an error") {
    RewriterConfig config{"true", fresh_cache_dir("empty").string(), 30.0};
    ExternalRewriter rewriter(config);
    CHECK_THROWS_WITH_AS(rewriter.rewrite("text", "p"),
                         doctest::Contains("no output"), std::runtime_error);
  }
  SUBCASE("timeout kills the process") {
    RewriterConfig config{"sleep 5", fresh_cache_dir("slow").string(), 0.2};
    ExternalRewriter rewriter(config);
    CHECK_THROWS_WITH_AS(rewriter.rewrite("text", "p"),
                         doctest::Contains("timed out"), std::runtime_error);
  }
  SUBCASE("empty text is rejected up front") {
    RewriterConfig config{"cat", fresh_cache_dir("pre").string(), 30.0};
    ExternalRewriter rewriter(config);
    CHECK_THROWS(rewriter.rewrite("", "p"));
  }
  SUBCASE("large payloads do not deadlock the pipes") {
    RewriterConfig config{"cat", fresh_cache_dir("big").string(), 30.0};
    ExternalRewriter rewriter(config);
    const std::string big(1 << 20, 'x');
    CHECK(rewriter.rewrite(big, "p") == big);
  }
  SUBCASE("child exiting mid-write surfaces the status, not SIGPIPE") {
    RewriterConfig config{"exit 4", fresh_cache_dir("pipe").string(), 30.0};
    ExternalRewriter rewriter(config);
    const std::string big(1 << 20, 'y');
    CHECK_THROWS_WITH_AS(rewriter.rewrite(big, "p"),
                         doctest::Contains("status 4"), std::runtime_error);
  }
}

TEST_CASE("raidar prompt list is the canonical six") {
  REQUIRE(kRaidarPrompts.size() == 6);
  CHECK(kRaidarPrompts[0] ==
        "Concise this for me in Hindi only and keep all the information.");
  CHECK(kRaidarPrompts[5] == "Rewrite this in Hindi only.");
}
