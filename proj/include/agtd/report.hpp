#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agtd/adi.hpp"
#include "agtd/classify.hpp"
#include "agtd/features.hpp"
#include "agtd/geometry.hpp"
#include "agtd/watermark.hpp"

namespace agtd {

// Canonical float formats: fixed six decimals everywhere, except classifier
// metrics which serialize as percentages with three decimals.
std::string format_fixed(double v);
std::string format_percent(double fraction);

std::string json_escape(std::string_view s);

// --- spectrum ---
std::string spectrum_to_json(std::span<const DetectabilityScore> scores);
std::string spectrum_to_csv(std::span<const DetectabilityScore> scores);
std::string spectrum_to_svg(std::span<const DetectabilityScore> scores);
std::vector<DetectabilityScore> spectrum_from_json(const std::string& text);

// --- watermark tradeoff ---
std::string tradeoff_to_json(std::span<const TradeoffPoint> points);
std::string tradeoff_to_csv(std::span<const TradeoffPoint> points);
std::string tradeoff_to_svg(std::span<const TradeoffPoint> points);
std::vector<TradeoffPoint> tradeoff_from_json(const std::string& text);

std::string watermark_report_to_json(const WatermarkReport& report);

// --- intrinsic dimension ---
std::string intrinsic_report_to_json(const IntrinsicDimReport& report);

// --- classifier ---
std::string eval_report_to_json(const EvalReport& report);
std::string eval_report_to_svg(const EvalReport& report);
EvalReport eval_report_from_json(const std::string& text);

std::string grid_to_json(std::span<const GridCell> grid);
/// Long form: one row per (train_key, test_key) cell.
std::string grid_to_csv(std::span<const GridCell> grid);
/// Pivot table (train keys as rows, test keys as columns) for one metric:
/// "accuracy", "precision", "recall" or "f1".
std::string grid_to_csv_pivot(std::span<const GridCell> grid,
                              const std::string& metric);
std::string grid_to_svg(std::span<const GridCell> grid);
std::vector<GridCell> grid_from_json(const std::string& text);

// --- feature matrices ---
struct LabeledFeatures {
  std::vector<FeatureVector> rows;
  std::vector<int> labels;  // aligned with rows; 0 = human, 1 = ai
};

std::string features_to_csv(const LabeledFeatures& features);
LabeledFeatures features_from_csv(const std::string& text);
Dataset dataset_from_features(const LabeledFeatures& features);

// --- run manifest ---
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> input_hashes;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string started;
  std::string finished;
};

std::string manifest_to_json(const RunManifest& manifest);

/// Reads a JSON report, recognizes its schema (spectrum, tradeoff, grid or
/// eval report) and renders it in the requested format ("json", "csv",
/// "svg"). Unknown schemas are an error.
std::string render_report(const std::string& report_json,
                          const std::string& format);

void write_file(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace agtd
