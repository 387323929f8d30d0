#include "agtd/cli.hpp"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"
#include "agtd/adi.hpp"
#include "agtd/classify.hpp"
#include "agtd/corpus.hpp"
#include "agtd/features.hpp"
#include "agtd/geometry.hpp"
#include "agtd/hashing.hpp"
#include "agtd/report.hpp"
#include "agtd/watermark.hpp"
#include "json.hpp"

#ifndef AGTD_VERSION
#define AGTD_VERSION "0.0.0"
#endif

namespace agtd {

std::string tool_version() { return std::string("agtd ") + AGTD_VERSION; }

namespace {

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects everything a manifest needs while a subcommand runs.
class ManifestBuilder {
 public:
  explicit ManifestBuilder(std::string command)
      : command_(std::move(command)), started_(iso8601_utc_now()) {}

  void set(const std::string& key, const std::string& value) {
    config_[key] = value;
  }
  void set(const std::string& key, double value) {
    config_[key] = format_fixed(value);
  }
  void set(const std::string& key, std::int64_t value) {
    config_[key] = std::to_string(value);
  }
  void set_seed(std::uint64_t seed) {
    seed_ = seed;
    config_["seed"] = std::to_string(seed);
  }
  void add_input(const std::string& path) {
    input_hashes_[path] = sha256_file_hex(path);
  }

  void write(const std::string& next_to_output) const {
    RunManifest manifest;
    manifest.command = command_;
    manifest.config = config_;
    manifest.input_hashes = input_hashes_;
    manifest.seed = seed_;
    manifest.tool_version = tool_version();
    manifest.started = started_;
    manifest.finished = iso8601_utc_now();
    write_file(next_to_output + ".manifest.json", manifest_to_json(manifest));
  }

 private:
  std::string command_;
  std::string started_;
  std::map<std::string, std::string> config_;
  std::map<std::string, std::string> input_hashes_;
  std::uint64_t seed_ = 0;
};

std::vector<double> parse_fraction_list(const std::string& csv) {
  std::vector<double> fractions;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    fractions.push_back(std::stod(item));
  }
  if (fractions.empty())
    throw CLI::ValidationError("--fractions", "expected at least one value");
  return fractions;
}

void split_corpus_by_label(const std::vector<Document>& docs,
                           std::vector<Document>& humans,
                           std::vector<Document>& ais) {
  for (const auto& doc : docs)
    (doc.label == Label::human ? humans : ais).push_back(doc);
}

// ---------------------------------------------------------------------------
// adi
// ---------------------------------------------------------------------------

struct AdiArgs {
  std::string human_path, ai_path, pairs_path, out_path, csv_path, svg_path;
  double band_easy = 33.3, band_detectable = 66.6;
  std::uint64_t seed = 0;
  int threads = 1;
};

int run_adi(const AdiArgs& args) {
  if (args.pairs_path.empty() && (args.human_path.empty() || args.ai_path.empty()))
    throw CLI::ValidationError("adi",
                               "need --pairs or both --human and --ai");
  ManifestBuilder manifest("adi");
  manifest.set("band_easy_below", args.band_easy);
  manifest.set("band_detectable_below", args.band_detectable);
  manifest.set("threads", static_cast<std::int64_t>(args.threads));
  manifest.set_seed(args.seed);

  std::vector<Document> humans, ais;
  if (!args.pairs_path.empty()) {
    // One mixed-label corpus; both sides come out of it.
    manifest.add_input(args.pairs_path);
    manifest.set("pairs", args.pairs_path);
    split_corpus_by_label(parse_corpus_file(args.pairs_path), humans, ais);
  } else {
    manifest.add_input(args.human_path);
    manifest.add_input(args.ai_path);
    manifest.set("human", args.human_path);
    manifest.set("ai", args.ai_path);
    std::vector<Document> ignored;
    split_corpus_by_label(parse_corpus_file(args.human_path), humans, ignored);
    if (!ignored.empty())
      std::cerr << "warning: " << ignored.size()
                << " ai-labeled document(s) in --human ignored\n";
    std::vector<Document> ignored_humans;
    split_corpus_by_label(parse_corpus_file(args.ai_path), ignored_humans, ais);
    if (!ignored_humans.empty())
      std::cerr << "warning: " << ignored_humans.size()
                << " human-labeled document(s) in --ai ignored\n";
  }
  if (humans.empty()) throw std::runtime_error("no human documents found");
  if (ais.empty()) throw std::runtime_error("no ai documents found");

  std::map<std::string, std::vector<Document>> by_model;
  for (auto& doc : ais) by_model[*doc.model].push_back(std::move(doc));

  std::vector<ModelDivergence> raw;
  for (const auto& [model, model_docs] : by_model) {
    const PairingResult pairing = pair_documents(humans, model_docs);
    if (!pairing.unmatched_ais.empty() || !pairing.unmatched_humans.empty())
      std::cerr << "model " << model << ": " << pairing.unmatched_humans.size()
                << " unmatched human, " << pairing.unmatched_ais.size()
                << " unmatched ai document(s)\n";
    if (pairing.pairs.empty())
      throw std::runtime_error("model " + model + ": no headline matches");
    raw.push_back(corpus_adi(model, pairing.pairs, args.threads));
  }

  SpectrumOptions options;
  options.band_easy_below = args.band_easy;
  options.band_detectable_below = args.band_detectable;
  const auto scores = adi_spectrum(raw, options);

  write_file(args.out_path, spectrum_to_json(scores));
  if (!args.csv_path.empty()) write_file(args.csv_path, spectrum_to_csv(scores));
  if (!args.svg_path.empty()) write_file(args.svg_path, spectrum_to_svg(scores));
  manifest.write(args.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// watermark
// ---------------------------------------------------------------------------

struct WatermarkSimArgs {
  std::uint32_t vocab = 1000;
  std::size_t length = 200;
  double gamma = 0.5, delta = 2.0;
  std::uint64_t key = 0, seed = 0;
  std::string out_path;
};

int run_watermark_simulate(const WatermarkSimArgs& args) {
  ManifestBuilder manifest("watermark simulate");
  manifest.set("vocab", static_cast<std::int64_t>(args.vocab));
  manifest.set("length", static_cast<std::int64_t>(args.length));
  manifest.set("gamma", args.gamma);
  manifest.set("delta", args.delta);
  manifest.set("key", static_cast<std::int64_t>(args.key));
  manifest.set_seed(args.seed);
  const TokenStream stream = simulate_stream(args.vocab, args.length,
                                             args.gamma, args.delta, args.key,
                                             args.seed);
  write_file(args.out_path, token_stream_to_json(stream) + "\n");
  manifest.write(args.out_path);
  return 0;
}

struct WatermarkDetectArgs {
  std::string in_path, out_path;
  double gamma = 0.5, threshold = 0.01;
  std::uint64_t key = 0;
};

int run_watermark_detect(const WatermarkDetectArgs& args) {
  ManifestBuilder manifest("watermark detect");
  manifest.add_input(args.in_path);
  manifest.set("in", args.in_path);
  manifest.set("gamma", args.gamma);
  manifest.set("threshold", args.threshold);
  manifest.set("key", static_cast<std::int64_t>(args.key));
  const TokenStream stream = token_stream_from_json(read_file(args.in_path));
  const WatermarkReport report =
      detect(stream, args.gamma, args.key, args.threshold);
  const std::string body = watermark_report_to_json(report);
  if (args.out_path.empty()) {
    std::cout << body;
  } else {
    write_file(args.out_path, body);
    manifest.write(args.out_path);
  }
  return 0;
}

struct WatermarkTradeoffArgs {
  int streams = 20;
  std::uint32_t vocab = 1000;
  std::size_t length = 200;
  double gamma = 0.5, delta = 4.0;
  std::uint64_t key = 0, seed = 0;
  std::string fractions = "0,0.25,0.5,0.75,1.0";
  std::string out_path, json_path, svg_path;
  int threads = 1;
};

int run_watermark_tradeoff(const WatermarkTradeoffArgs& args) {
  ManifestBuilder manifest("watermark tradeoff");
  manifest.set("streams", static_cast<std::int64_t>(args.streams));
  manifest.set("vocab", static_cast<std::int64_t>(args.vocab));
  manifest.set("length", static_cast<std::int64_t>(args.length));
  manifest.set("gamma", args.gamma);
  manifest.set("delta", args.delta);
  manifest.set("key", static_cast<std::int64_t>(args.key));
  manifest.set("fractions", args.fractions);
  manifest.set("threads", static_cast<std::int64_t>(args.threads));
  manifest.set_seed(args.seed);

  const auto fractions = parse_fraction_list(args.fractions);
  // Independent seed spaces for stream generation and cell perturbation.
  const std::uint64_t stream_base = derive_seed(args.seed, 0x73747265616DULL);
  const std::uint64_t cell_base = derive_seed(args.seed, 0x7065727475ULL);
  std::vector<TokenStream> streams;
  streams.reserve(static_cast<std::size_t>(args.streams));
  for (int i = 0; i < args.streams; ++i)
    streams.push_back(simulate_stream(
        args.vocab, args.length, args.gamma, args.delta, args.key,
        derive_seed(stream_base, static_cast<std::uint64_t>(i))));

  const auto points = tradeoff_curve(streams, fractions, args.gamma, args.key,
                                     cell_base, args.threads);
  write_file(args.out_path, tradeoff_to_csv(points));
  if (!args.json_path.empty())
    write_file(args.json_path, tradeoff_to_json(points));
  if (!args.svg_path.empty())
    write_file(args.svg_path, tradeoff_to_svg(points));
  manifest.write(args.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// intrinsic-dim
// ---------------------------------------------------------------------------

struct IntrinsicArgs {
  std::string in_path, out_path;
  int k = 20, min_subset = 40, n_sizes = 8, repeats = 3;
  std::uint64_t seed = 0;
};

int run_intrinsic(const IntrinsicArgs& args) {
  ManifestBuilder manifest("intrinsic-dim");
  manifest.add_input(args.in_path);
  manifest.set("in", args.in_path);
  manifest.set("k", static_cast<std::int64_t>(args.k));
  manifest.set("min_subset", static_cast<std::int64_t>(args.min_subset));
  manifest.set("n_sizes", static_cast<std::int64_t>(args.n_sizes));
  manifest.set("repeats", static_cast<std::int64_t>(args.repeats));
  manifest.set_seed(args.seed);
  const PointCloud cloud = load_point_cloud(args.in_path);
  const IntrinsicDimReport report = intrinsic_dim_report(
      cloud, args.k, args.min_subset, args.n_sizes, args.repeats, args.seed);
  write_file(args.out_path, intrinsic_report_to_json(report));
  manifest.write(args.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

struct FeatureArgs {
  std::string in_path, out_path;
  std::string rewrites_path;   // raidar: precomputed rewrites JSONL
  std::string rewriter_cmd;    // raidar: external command template
  std::string cache_dir;
  double timeout = 120.0;
};

LabeledFeatures stylo_features_for(const std::vector<Document>& docs) {
  LabeledFeatures features;
  for (const auto& doc : docs) {
    features.rows.push_back(stylometric_features(doc));
    features.labels.push_back(doc.label == Label::ai ? 1 : 0);
  }
  return features;
}

int run_features_stylo(const FeatureArgs& args) {
  ManifestBuilder manifest("features stylo");
  manifest.add_input(args.in_path);
  manifest.set("in", args.in_path);
  const auto docs = parse_corpus_file(args.in_path);
  write_file(args.out_path, features_to_csv(stylo_features_for(docs)));
  manifest.write(args.out_path);
  return 0;
}

std::unordered_map<std::string, std::vector<std::string>> load_rewrites(
    const std::string& path) {
  std::unordered_map<std::string, std::vector<std::string>> rewrites;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("rewrites line " + std::to_string(line_no) +
                               ": malformed JSON: " + e.what());
    }
    if (!obj.contains("id") || !obj.contains("rewrites"))
      throw std::runtime_error("rewrites line " + std::to_string(line_no) +
                               ": need keys \"id\" and \"rewrites\"");
    rewrites[obj["id"].get<std::string>()] =
        obj["rewrites"].get<std::vector<std::string>>();
  }
  return rewrites;
}

int run_features_raidar(const FeatureArgs& args) {
  ManifestBuilder manifest("features raidar");
  manifest.add_input(args.in_path);
  manifest.set("in", args.in_path);
  const auto docs = parse_corpus_file(args.in_path);

  LabeledFeatures features;
  if (!args.rewrites_path.empty()) {
    manifest.add_input(args.rewrites_path);
    manifest.set("rewrites", args.rewrites_path);
    const auto rewrites = load_rewrites(args.rewrites_path);
    for (const auto& doc : docs) {
      auto it = rewrites.find(doc.id);
      if (it == rewrites.end())
        throw std::runtime_error("no rewrites for document \"" + doc.id +
                                 "\"");
      features.rows.push_back(rewrite_features(doc, it->second));
      features.labels.push_back(doc.label == Label::ai ? 1 : 0);
    }
  } else if (!args.rewriter_cmd.empty()) {
    manifest.set("rewriter_cmd", args.rewriter_cmd);
    manifest.set("cache_dir", args.cache_dir);
    manifest.set("timeout", args.timeout);
    RewriterConfig config;
    config.command_template = args.rewriter_cmd;
    config.cache_dir = args.cache_dir;
    config.timeout_seconds = args.timeout;
    ExternalRewriter rewriter(config);
    for (const auto& doc : docs) {
      std::vector<std::string> rewrites;
      for (const auto prompt : kRaidarPrompts)
        rewrites.push_back(rewriter.rewrite(doc.text, std::string(prompt)));
      features.rows.push_back(rewrite_features(doc, rewrites));
      features.labels.push_back(doc.label == Label::ai ? 1 : 0);
    }
  } else {
    throw CLI::ValidationError(
        "features raidar", "need either --rewrites or --rewriter-cmd");
  }
  write_file(args.out_path, features_to_csv(features));
  manifest.write(args.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// train / eval / cross-grid
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string features_path, out_path;
  TrainOptions options;
};

int run_train(const TrainArgs& args) {
  ManifestBuilder manifest("train");
  manifest.add_input(args.features_path);
  manifest.set("features", args.features_path);
  manifest.set("l2", args.options.l2);
  manifest.set("epochs", static_cast<std::int64_t>(args.options.epochs));
  manifest.set("lr", args.options.lr);
  manifest.set_seed(args.options.seed);
  const auto features = features_from_csv(read_file(args.features_path));
  const LinearModel model = train(dataset_from_features(features), args.options);
  write_file(args.out_path, model_to_json(model) + "\n");
  manifest.write(args.out_path);
  return 0;
}

struct EvalArgs {
  std::string model_path, features_path, out_path, svg_path;
  double threshold = 0.5;
};

int run_eval(const EvalArgs& args) {
  ManifestBuilder manifest("eval");
  manifest.add_input(args.model_path);
  manifest.add_input(args.features_path);
  manifest.set("model", args.model_path);
  manifest.set("features", args.features_path);
  manifest.set("threshold", args.threshold);
  const LinearModel model = model_from_json(read_file(args.model_path));
  const auto features = features_from_csv(read_file(args.features_path));
  const EvalReport report =
      evaluate(model, dataset_from_features(features), args.threshold);
  write_file(args.out_path, eval_report_to_json(report));
  if (!args.svg_path.empty())
    write_file(args.svg_path, eval_report_to_svg(report));
  manifest.write(args.out_path);
  return 0;
}

struct GridArgs {
  std::vector<std::string> dataset_specs;  // key=path
  std::string out_path, csv_prefix, svg_path;
  std::uint64_t seed = 0;
  int threads = 1;
  TrainOptions options;
};

int run_cross_grid(const GridArgs& args) {
  ManifestBuilder manifest("cross-grid");
  manifest.set_seed(args.seed);
  manifest.set("threads", static_cast<std::int64_t>(args.threads));
  manifest.set("l2", args.options.l2);
  manifest.set("epochs", static_cast<std::int64_t>(args.options.epochs));
  manifest.set("lr", args.options.lr);

  std::map<std::string, Dataset> datasets;
  for (const auto& spec : args.dataset_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw CLI::ValidationError("--dataset", "expected key=path, got \"" +
                                                  spec + "\"");
    const std::string key = spec.substr(0, eq);
    const std::string path = spec.substr(eq + 1);
    if (datasets.count(key))
      throw CLI::ValidationError("--dataset", "duplicate key \"" + key + "\"");
    manifest.add_input(path);
    manifest.set("dataset." + key, path);
    datasets[key] = dataset_from_features(features_from_csv(read_file(path)));
  }

  TrainOptions options = args.options;
  options.seed = args.seed;
  const auto grid = cross_grid(datasets, args.seed, options, args.threads);
  write_file(args.out_path, grid_to_json(grid));
  if (!args.csv_prefix.empty())
    for (const std::string metric : {"accuracy", "precision", "recall", "f1"})
      write_file(args.csv_prefix + "_" + metric + ".csv",
                 grid_to_csv_pivot(grid, metric));
  if (!args.svg_path.empty()) write_file(args.svg_path, grid_to_svg(grid));
  manifest.write(args.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
  std::string in_path, out_path, format = "svg";
};

int run_report(const ReportArgs& args) {
  ManifestBuilder manifest("report");
  manifest.add_input(args.in_path);
  manifest.set("in", args.in_path);
  manifest.set("format", args.format);
  const std::string rendered = render_report(read_file(args.in_path),
                                             args.format);
  write_file(args.out_path, rendered);
  manifest.write(args.out_path);
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"AI-generated-text forensics toolkit"};
  app.set_config("--config");
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  // adi
  AdiArgs adi_args;
  auto* adi_cmd = app.add_subcommand(
      "adi", "Detectability spectrum from a paired human/ai corpus");
  auto* human_opt =
      adi_cmd->add_option("--human", adi_args.human_path,
                          "Human JSON-lines corpus");
  auto* ai_opt =
      adi_cmd->add_option("--ai", adi_args.ai_path, "AI JSON-lines corpus");
  auto* pairs_opt = adi_cmd->add_option(
      "--pairs", adi_args.pairs_path,
      "Mixed-label JSON-lines corpus (alternative to --human/--ai)");
  human_opt->needs(ai_opt);
  ai_opt->needs(human_opt);
  pairs_opt->excludes(human_opt)->excludes(ai_opt);
  adi_cmd->add_option("--out", adi_args.out_path, "Spectrum JSON output")
      ->required();
  adi_cmd->add_option("--csv", adi_args.csv_path, "Also write a CSV");
  adi_cmd->add_option("--svg", adi_args.svg_path, "Also write an SVG chart");
  adi_cmd->add_option("--band-easy", adi_args.band_easy,
                      "ADI below this is easy_to_detect");
  adi_cmd->add_option("--band-detectable", adi_args.band_detectable,
                      "ADI below this is detectable");
  adi_cmd->add_option("--seed", adi_args.seed, "Master seed");
  adi_cmd->add_option("--threads", adi_args.threads, "Worker threads");

  // watermark
  auto* wm_cmd = app.add_subcommand("watermark", "Green-list watermarking");
  wm_cmd->require_subcommand(1);

  WatermarkSimArgs sim_args;
  auto* sim_cmd =
      wm_cmd->add_subcommand("simulate", "Generate a watermarked stream");
  sim_cmd->add_option("--vocab", sim_args.vocab, "Vocabulary size");
  sim_cmd->add_option("--length", sim_args.length, "Stream length");
  sim_cmd->add_option("--gamma", sim_args.gamma, "Green-list fraction");
  sim_cmd->add_option("--delta", sim_args.delta, "Green bias strength");
  sim_cmd->add_option("--key", sim_args.key, "Watermark key");
  sim_cmd->add_option("--seed", sim_args.seed, "Sampling seed");
  sim_cmd->add_option("--out", sim_args.out_path, "Stream JSON output")
      ->required();

  WatermarkDetectArgs det_args;
  auto* det_cmd = wm_cmd->add_subcommand("detect", "Score a stream");
  det_cmd->add_option("--in", det_args.in_path, "Stream JSON input")
      ->required();
  det_cmd->add_option("--gamma", det_args.gamma, "Green-list fraction");
  det_cmd->add_option("--key", det_args.key, "Watermark key");
  det_cmd->add_option("--threshold", det_args.threshold, "Detection p cutoff");
  det_cmd->add_option("--out", det_args.out_path,
                      "Report JSON output (stdout when omitted)");

  WatermarkTradeoffArgs trade_args;
  auto* trade_cmd = wm_cmd->add_subcommand(
      "tradeoff", "Distortion vs detectability table");
  trade_cmd->add_option("--streams", trade_args.streams, "Stream count");
  trade_cmd->add_option("--vocab", trade_args.vocab, "Vocabulary size");
  trade_cmd->add_option("--length", trade_args.length, "Stream length");
  trade_cmd->add_option("--gamma", trade_args.gamma, "Green-list fraction");
  trade_cmd->add_option("--delta", trade_args.delta, "Green bias strength");
  trade_cmd->add_option("--key", trade_args.key, "Watermark key");
  trade_cmd->add_option("--seed", trade_args.seed, "Master seed");
  trade_cmd->add_option("--fractions", trade_args.fractions,
                        "Comma-separated perturbation fractions");
  trade_cmd->add_option("--out", trade_args.out_path, "CSV output")
      ->required();
  trade_cmd->add_option("--json", trade_args.json_path, "Also write JSON");
  trade_cmd->add_option("--svg", trade_args.svg_path, "Also write an SVG");
  trade_cmd->add_option("--threads", trade_args.threads, "Worker threads");

  // intrinsic-dim
  IntrinsicArgs dim_args;
  auto* dim_cmd = app.add_subcommand(
      "intrinsic-dim", "MLE and PHD intrinsic dimension of a point cloud");
  dim_cmd->add_option("--in", dim_args.in_path, "Point cloud file")
      ->required();
  dim_cmd->add_option("--out", dim_args.out_path, "Report JSON output")
      ->required();
  dim_cmd->add_option("--k", dim_args.k, "Nearest neighbors for MLE");
  dim_cmd->add_option("--min-subset", dim_args.min_subset,
                      "Smallest PHD subset size");
  dim_cmd->add_option("--sizes", dim_args.n_sizes, "PHD subset size count");
  dim_cmd->add_option("--repeats", dim_args.repeats, "PHD resamples per size");
  dim_cmd->add_option("--seed", dim_args.seed, "Resampling seed");

  // features
  auto* feat_cmd = app.add_subcommand("features", "Feature extraction");
  feat_cmd->require_subcommand(1);

  FeatureArgs stylo_args;
  auto* stylo_cmd =
      feat_cmd->add_subcommand("stylo", "Stylometric features");
  stylo_cmd->add_option("--in", stylo_args.in_path, "JSON-lines corpus")
      ->required();
  stylo_cmd->add_option("--out", stylo_args.out_path, "Feature CSV output")
      ->required();

  FeatureArgs raidar_args;
  auto* raidar_cmd =
      feat_cmd->add_subcommand("raidar", "Rewrite-distance features");
  raidar_cmd->add_option("--in", raidar_args.in_path, "JSON-lines corpus")
      ->required();
  raidar_cmd->add_option("--out", raidar_args.out_path, "Feature CSV output")
      ->required();
  raidar_cmd->add_option("--rewrites", raidar_args.rewrites_path,
                         "Precomputed rewrites JSONL (id, rewrites[6])");
  raidar_cmd->add_option("--rewriter-cmd", raidar_args.rewriter_cmd,
                         "External rewriter command template ({prompt})");
  raidar_cmd
      ->add_option("--cache-dir", raidar_args.cache_dir,
                   "Rewriter cache directory")
      ->envname("AGTD_CACHE_DIR");
  raidar_cmd->add_option("--timeout", raidar_args.timeout,
                         "Rewriter timeout in seconds");

  // train / eval / cross-grid
  TrainArgs train_args;
  auto* train_cmd =
      app.add_subcommand("train", "Train a logistic classifier");
  train_cmd->add_option("--features", train_args.features_path, "Feature CSV")
      ->required();
  train_cmd->add_option("--out", train_args.out_path, "Model JSON output")
      ->required();
  train_cmd->add_option("--l2", train_args.options.l2, "L2 penalty");
  train_cmd->add_option("--epochs", train_args.options.epochs, "GD epochs");
  train_cmd->add_option("--lr", train_args.options.lr, "Learning rate");
  train_cmd->add_option("--seed", train_args.options.seed, "Training seed");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained model");
  eval_cmd->add_option("--model", eval_args.model_path, "Model JSON")
      ->required();
  eval_cmd->add_option("--features", eval_args.features_path, "Feature CSV")
      ->required();
  eval_cmd->add_option("--out", eval_args.out_path, "Report JSON output")
      ->required();
  eval_cmd->add_option("--svg", eval_args.svg_path,
                       "Also write a confusion-matrix SVG");
  eval_cmd->add_option("--threshold", eval_args.threshold,
                       "Positive-class probability cutoff");

  GridArgs grid_args;
  auto* grid_cmd =
      app.add_subcommand("cross-grid", "Train/test grid over datasets");
  grid_cmd
      ->add_option("--dataset", grid_args.dataset_specs,
                   "Dataset as key=feature.csv (repeatable)")
      ->required()
      ->expected(-2);
  grid_cmd->add_option("--out", grid_args.out_path, "Grid JSON output")
      ->required();
  grid_cmd->add_option("--csv-prefix", grid_args.csv_prefix,
                       "Write <prefix>_<metric>.csv pivots");
  grid_cmd->add_option("--svg", grid_args.svg_path, "Also write an F1 SVG");
  grid_cmd->add_option("--seed", grid_args.seed, "Master seed");
  grid_cmd->add_option("--threads", grid_args.threads, "Worker threads");
  grid_cmd->add_option("--l2", grid_args.options.l2, "L2 penalty");
  grid_cmd->add_option("--epochs", grid_args.options.epochs, "GD epochs");
  grid_cmd->add_option("--lr", grid_args.options.lr, "Learning rate");

  ReportArgs report_args;
  auto* report_cmd =
      app.add_subcommand("report", "Re-render a report file");
  report_cmd->add_option("--in", report_args.in_path, "Report JSON input")
      ->required();
  report_cmd->add_option("--format", report_args.format,
                         "Output format: json, csv or svg")
      ->check(CLI::IsMember({"json", "csv", "svg"}));
  report_cmd->add_option("--out", report_args.out_path, "Output path")
      ->required();

  std::vector<char*> argv;
  std::vector<std::string> owned{"agtd"};
  owned.insert(owned.end(), args.begin(), args.end());
  for (auto& s : owned) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (adi_cmd->parsed()) return run_adi(adi_args);
    if (sim_cmd->parsed()) return run_watermark_simulate(sim_args);
    if (det_cmd->parsed()) return run_watermark_detect(det_args);
    if (trade_cmd->parsed()) return run_watermark_tradeoff(trade_args);
    if (dim_cmd->parsed()) return run_intrinsic(dim_args);
    if (stylo_cmd->parsed()) return run_features_stylo(stylo_args);
    if (raidar_cmd->parsed()) return run_features_raidar(raidar_args);
    if (train_cmd->parsed()) return run_train(train_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (grid_cmd->parsed()) return run_cross_grid(grid_args);
    if (report_cmd->parsed()) return run_report(report_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand given\n";
  return 1;
}

}  // namespace agtd
