#include "agtd/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace agtd {

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", fraction * 100.0);
  return buf;
}

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  return out;
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

std::string spectrum_to_json(std::span<const DetectabilityScore> scores) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores[i];
    out += "  {\"adi\": " + format_fixed(s.adi);
    out += ", \"band\": \"" + band_to_string(s.band) + "\"";
    out += ", \"model\": \"" + json_escape(s.model) + "\"";
    out += ", \"pairs_skipped\": " + std::to_string(s.pairs_skipped);
    out += ", \"pairs_used\": " + std::to_string(s.pairs_used);
    out += ", \"rank\": " + std::to_string(s.rank);
    out += ", \"raw_mean_jsd\": " + format_fixed(s.raw_mean_jsd);
    out += ", \"transformed\": " + format_fixed(s.transformed) + "}";
    out += i + 1 < scores.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::string spectrum_to_csv(std::span<const DetectabilityScore> scores) {
  std::string out = "model,raw,transformed,adi,rank,band\n";
  for (const auto& s : scores) {
    out += s.model + "," + format_fixed(s.raw_mean_jsd) + "," +
           format_fixed(s.transformed) + "," + format_fixed(s.adi) + "," +
           std::to_string(s.rank) + "," + band_to_string(s.band) + "\n";
  }
  return out;
}

std::vector<DetectabilityScore> spectrum_from_json(const std::string& text) {
  nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<DetectabilityScore> scores;
  for (const auto& obj : arr) {
    DetectabilityScore s;
    s.adi = obj.at("adi").get<double>();
    const std::string band = obj.at("band").get<std::string>();
    if (band == "easy_to_detect") s.band = Band::easy_to_detect;
    else if (band == "detectable") s.band = Band::detectable;
    else if (band == "difficult_to_detect") s.band = Band::difficult_to_detect;
    else throw std::runtime_error("unknown band: " + band);
    s.model = obj.at("model").get<std::string>();
    s.pairs_skipped = obj.at("pairs_skipped").get<int>();
    s.pairs_used = obj.at("pairs_used").get<int>();
    s.rank = obj.at("rank").get<int>();
    s.raw_mean_jsd = obj.at("raw_mean_jsd").get<double>();
    s.transformed = obj.at("transformed").get<double>();
    scores.push_back(std::move(s));
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Tradeoff
// ---------------------------------------------------------------------------

std::string tradeoff_to_json(std::span<const TradeoffPoint> points) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    out += "  {\"bleu\": " + format_fixed(p.bleu);
    out += ", \"edit_distance\": " + std::to_string(p.edit_distance);
    out += ", \"fraction\": " + format_fixed(p.fraction);
    out += ", \"gamma\": " + format_fixed(p.gamma);
    out += ", \"p\": " + format_fixed(p.p);
    out += ", \"semantic_sim\": " +
           (p.semantic_sim ? format_fixed(*p.semantic_sim) : "null");
    out += ", \"stream_id\": " + std::to_string(p.stream_id);
    out += ", \"z\": " + format_fixed(p.z) + "}";
    out += i + 1 < points.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::string tradeoff_to_csv(std::span<const TradeoffPoint> points) {
  std::string out = "fraction,stream_id,edit_distance,bleu,semantic_sim,z,p\n";
  for (const auto& p : points) {
    out += format_fixed(p.fraction) + "," + std::to_string(p.stream_id) + "," +
           std::to_string(p.edit_distance) + "," + format_fixed(p.bleu) + "," +
           (p.semantic_sim ? format_fixed(*p.semantic_sim) : "") + "," +
           format_fixed(p.z) + "," + format_fixed(p.p) + "\n";
  }
  return out;
}

std::vector<TradeoffPoint> tradeoff_from_json(const std::string& text) {
  nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<TradeoffPoint> points;
  for (const auto& obj : arr) {
    TradeoffPoint p;
    p.bleu = obj.at("bleu").get<double>();
    p.edit_distance = obj.at("edit_distance").get<std::int64_t>();
    p.fraction = obj.at("fraction").get<double>();
    p.gamma = obj.at("gamma").get<double>();
    p.p = obj.at("p").get<double>();
    if (!obj.at("semantic_sim").is_null())
      p.semantic_sim = obj.at("semantic_sim").get<double>();
    p.stream_id = obj.at("stream_id").get<std::size_t>();
    p.z = obj.at("z").get<double>();
    points.push_back(p);
  }
  return points;
}

std::string watermark_report_to_json(const WatermarkReport& r) {
  std::string out = "{\"detected\": ";
  out += r.detected ? "true" : "false";
  out += ", \"gamma\": " + format_fixed(r.gamma);
  out += ", \"green_count\": " + std::to_string(r.green_count);
  out += ", \"p\": " + format_fixed(r.p);
  out += ", \"t\": " + std::to_string(r.t);
  out += ", \"z\": " + format_fixed(r.z) + "}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Intrinsic dimension
// ---------------------------------------------------------------------------

std::string intrinsic_report_to_json(const IntrinsicDimReport& r) {
  std::string out = "{\"mle\": " + format_fixed(r.mle);
  out += ", \"n_used\": " + std::to_string(r.n_used);
  out += ", \"phd\": " + format_fixed(r.phd);
  out += ", \"phd_r2\": " + format_fixed(r.phd_r2);
  out += ", \"phd_slope\": " + format_fixed(r.phd_slope) + "}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Classifier reports
// ---------------------------------------------------------------------------

namespace {

std::string confusion_json(const Confusion& c) {
  return "{\"fn\": " + std::to_string(c.fn) + ", \"fp\": " +
         std::to_string(c.fp) + ", \"tn\": " + std::to_string(c.tn) +
         ", \"tp\": " + std::to_string(c.tp) + "}";
}

std::string eval_json_body(const EvalReport& r) {
  return "{\"accuracy\": " + format_percent(r.accuracy) +
         ", \"confusion\": " + confusion_json(r.confusion) +
         ", \"f1\": " + format_percent(r.f1) +
         ", \"precision\": " + format_percent(r.precision) +
         ", \"recall\": " + format_percent(r.recall) + "}";
}

}  // namespace

std::string eval_report_to_json(const EvalReport& r) {
  return eval_json_body(r) + "\n";
}

EvalReport eval_report_from_json(const std::string& text) {
  nlohmann::json obj = nlohmann::json::parse(text);
  EvalReport r;
  r.accuracy = obj.at("accuracy").get<double>() / 100.0;
  r.precision = obj.at("precision").get<double>() / 100.0;
  r.recall = obj.at("recall").get<double>() / 100.0;
  r.f1 = obj.at("f1").get<double>() / 100.0;
  const auto& c = obj.at("confusion");
  r.confusion.fn = c.at("fn").get<std::int64_t>();
  r.confusion.fp = c.at("fp").get<std::int64_t>();
  r.confusion.tn = c.at("tn").get<std::int64_t>();
  r.confusion.tp = c.at("tp").get<std::int64_t>();
  return r;
}

std::string grid_to_json(std::span<const GridCell> grid) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& cell = grid[i];
    out += "  {\"accuracy\": " + format_percent(cell.report.accuracy);
    out += ", \"confusion\": " + confusion_json(cell.report.confusion);
    out += ", \"f1\": " + format_percent(cell.report.f1);
    out += ", \"precision\": " + format_percent(cell.report.precision);
    out += ", \"recall\": " + format_percent(cell.report.recall);
    out += ", \"test_key\": \"" + json_escape(cell.test_key) + "\"";
    out += ", \"train_key\": \"" + json_escape(cell.train_key) + "\"}";
    out += i + 1 < grid.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::vector<GridCell> grid_from_json(const std::string& text) {
  nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<GridCell> grid;
  for (const auto& obj : arr) {
    GridCell cell;
    cell.train_key = obj.at("train_key").get<std::string>();
    cell.test_key = obj.at("test_key").get<std::string>();
    cell.report.accuracy = obj.at("accuracy").get<double>() / 100.0;
    cell.report.precision = obj.at("precision").get<double>() / 100.0;
    cell.report.recall = obj.at("recall").get<double>() / 100.0;
    cell.report.f1 = obj.at("f1").get<double>() / 100.0;
    const auto& c = obj.at("confusion");
    cell.report.confusion.fn = c.at("fn").get<std::int64_t>();
    cell.report.confusion.fp = c.at("fp").get<std::int64_t>();
    cell.report.confusion.tn = c.at("tn").get<std::int64_t>();
    cell.report.confusion.tp = c.at("tp").get<std::int64_t>();
    grid.push_back(std::move(cell));
  }
  return grid;
}

namespace {

double metric_value(const EvalReport& r, const std::string& metric) {
  if (metric == "accuracy") return r.accuracy;
  if (metric == "precision") return r.precision;
  if (metric == "recall") return r.recall;
  if (metric == "f1") return r.f1;
  throw std::invalid_argument("unknown metric: " + metric);
}

std::vector<std::string> grid_keys(std::span<const GridCell> grid) {
  std::set<std::string> keys;
  for (const auto& cell : grid) {
    keys.insert(cell.train_key);
    keys.insert(cell.test_key);
  }
  return {keys.begin(), keys.end()};
}

const GridCell* find_cell(std::span<const GridCell> grid,
                          const std::string& train, const std::string& test) {
  for (const auto& cell : grid)
    if (cell.train_key == train && cell.test_key == test) return &cell;
  return nullptr;
}

}  // namespace

std::string grid_to_csv(std::span<const GridCell> grid) {
  std::string out =
      "train_key,test_key,accuracy,precision,recall,f1,tp,fp,tn,fn\n";
  for (const auto& cell : grid) {
    out += cell.train_key + "," + cell.test_key + "," +
           format_percent(cell.report.accuracy) + "," +
           format_percent(cell.report.precision) + "," +
           format_percent(cell.report.recall) + "," +
           format_percent(cell.report.f1) + "," +
           std::to_string(cell.report.confusion.tp) + "," +
           std::to_string(cell.report.confusion.fp) + "," +
           std::to_string(cell.report.confusion.tn) + "," +
           std::to_string(cell.report.confusion.fn) + "\n";
  }
  return out;
}

std::string grid_to_csv_pivot(std::span<const GridCell> grid,
                              const std::string& metric) {
  const auto keys = grid_keys(grid);
  std::string out = "train\\test";
  for (const auto& k : keys) out += "," + k;
  out += "\n";
  for (const auto& train : keys) {
    out += train;
    for (const auto& test : keys) {
      const GridCell* cell = find_cell(grid, train, test);
      out += ",";
      if (cell) out += format_percent(metric_value(cell->report, metric));
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG rendering
// ---------------------------------------------------------------------------

namespace {

constexpr int kSvgWidth = 820;
constexpr int kSvgHeight = 460;

std::string svg_open(std::string_view title) {
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
      std::to_string(kSvgWidth) + "\" height=\"" + std::to_string(kSvgHeight) +
      "\" viewBox=\"0 0 " + std::to_string(kSvgWidth) + " " +
      std::to_string(kSvgHeight) + "\">\n";
  out += "<style>text{font-family:sans-serif;font-size:11px}"
         ".title{font-size:14px;font-weight:bold}</style>\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text class=\"title\" x=\"16\" y=\"22\">" + std::string(title) +
         "</text>\n";
  return out;
}

std::string data_comment(const std::string& csv) {
  std::string safe = csv;
  // "--" is not allowed inside an XML comment.
  std::size_t pos = 0;
  while ((pos = safe.find("--", pos)) != std::string::npos)
    safe.replace(pos, 2, "- -");
  return "<!--data\n" + safe + "-->\n";
}

// Green (good) .. red heat color for v in [0, 1].
std::string heat_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255.0 * (1.0 - v)));
  const int g = static_cast<int>(std::lround(200.0 * v + 40.0 * (1.0 - v)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x50", r, g);
  return buf;
}

}  // namespace

std::string spectrum_to_svg(std::span<const DetectabilityScore> scores) {
  std::string out = svg_open("ADI spectrum");
  out += data_comment(spectrum_to_csv(scores));
  const double left = 70, right = 30, top = 50, bottom = 90;
  const double plot_w = kSvgWidth - left - right;
  const double plot_h = kSvgHeight - top - bottom;

  // Band separators at the configured default thresholds.
  for (double y_val : {33.3, 66.6}) {
    const double y = top + plot_h * (1.0 - y_val / 100.0);
    out += "<line x1=\"" + format_fixed(left) + "\" y1=\"" + format_fixed(y) +
           "\" x2=\"" + format_fixed(left + plot_w) + "\" y2=\"" +
           format_fixed(y) + "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  out += "<text class=\"band-label\" x=\"" + format_fixed(left + 4) +
         "\" y=\"" + format_fixed(top + plot_h * 0.05 + 10) +
         "\">difficult_to_detect</text>\n";
  out += "<text class=\"band-label\" x=\"" + format_fixed(left + 4) +
         "\" y=\"" + format_fixed(top + plot_h * 0.45) +
         "\">detectable</text>\n";
  out += "<text class=\"band-label\" x=\"" + format_fixed(left + 4) +
         "\" y=\"" + format_fixed(top + plot_h * 0.95) +
         "\">easy_to_detect</text>\n";

  const std::size_t m = scores.size();
  const double slot = m > 0 ? plot_w / static_cast<double>(m) : plot_w;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& s = scores[i];
    const double h = plot_h * s.adi / 100.0;
    const double x = left + slot * static_cast<double>(i) + slot * 0.15;
    const double y = top + plot_h - h;
    out += "<rect class=\"bar\" x=\"" + format_fixed(x) + "\" y=\"" +
           format_fixed(y) + "\" width=\"" + format_fixed(slot * 0.7) +
           "\" height=\"" + format_fixed(h) + "\" fill=\"" +
           heat_color(s.adi / 100.0) + "\"/>\n";
    out += "<text x=\"" + format_fixed(x) + "\" y=\"" +
           format_fixed(top + plot_h + 14) + "\" transform=\"rotate(35 " +
           format_fixed(x) + " " + format_fixed(top + plot_h + 14) + ")\">" +
           json_escape(s.model) + "</text>\n";
  }
  // Axis.
  out += "<line x1=\"" + format_fixed(left) + "\" y1=\"" + format_fixed(top) +
         "\" x2=\"" + format_fixed(left) + "\" y2=\"" +
         format_fixed(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 100; tick += 25) {
    const double y = top + plot_h * (1.0 - tick / 100.0);
    out += "<text x=\"36\" y=\"" + format_fixed(y + 4) + "\">" +
           std::to_string(tick) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string tradeoff_to_svg(std::span<const TradeoffPoint> points) {
  std::string out = svg_open("Watermark distortion vs detectability");
  out += data_comment(tradeoff_to_csv(points));
  const double left = 70, right = 30, top = 50, bottom = 60;
  const double plot_w = kSvgWidth - left - right;
  const double plot_h = kSvgHeight - top - bottom;

  double max_ed = 1.0;
  for (const auto& p : points)
    max_ed = std::max(max_ed, static_cast<double>(p.edit_distance));
  const double log_floor = -20.0;  // p rendered on log10 scale, clipped

  for (const auto& p : points) {
    const double x = left + plot_w * static_cast<double>(p.edit_distance) / max_ed;
    const double logp =
        std::max(log_floor, std::log10(std::max(p.p, 1e-300)));
    const double y = top + plot_h * (logp - 0.0) / (log_floor - 0.0);
    out += "<circle class=\"pt\" cx=\"" + format_fixed(x) + "\" cy=\"" +
           format_fixed(y) + "\" r=\"3.5\" fill=\"" +
           heat_color(p.fraction) + "\" fill-opacity=\"0.75\"/>\n";
  }
  // p = 0.01 reference line.
  const double ref_y = top + plot_h * (std::log10(0.01) / log_floor);
  out += "<line x1=\"" + format_fixed(left) + "\" y1=\"" + format_fixed(ref_y) +
         "\" x2=\"" + format_fixed(left + plot_w) + "\" y2=\"" +
         format_fixed(ref_y) + "\" stroke=\"#c33\" stroke-dasharray=\"5 3\"/>\n";
  out += "<text x=\"" + format_fixed(left + plot_w - 64) + "\" y=\"" +
         format_fixed(ref_y - 4) + "\">p = 0.01</text>\n";
  out += "<text x=\"" + format_fixed(left + plot_w / 2 - 40) + "\" y=\"" +
         format_fixed(top + plot_h + 32) + "\">edit distance</text>\n";
  out += "<text x=\"16\" y=\"" + format_fixed(top + plot_h / 2) +
         "\" transform=\"rotate(-90 16 " + format_fixed(top + plot_h / 2) +
         ")\">log10 p</text>\n";
  out += "<line x1=\"" + format_fixed(left) + "\" y1=\"" + format_fixed(top) +
         "\" x2=\"" + format_fixed(left) + "\" y2=\"" +
         format_fixed(top + plot_h) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + format_fixed(left) + "\" y1=\"" +
         format_fixed(top + plot_h) + "\" x2=\"" + format_fixed(left + plot_w) +
         "\" y2=\"" + format_fixed(top + plot_h) + "\" stroke=\"black\"/>\n";
  out += "</svg>\n";
  return out;
}

std::string eval_report_to_svg(const EvalReport& report) {
  std::string out = svg_open("Confusion matrix (positive class: ai)");
  out += data_comment("tp,fp,tn,fn\n" + std::to_string(report.confusion.tp) +
                      "," + std::to_string(report.confusion.fp) + "," +
                      std::to_string(report.confusion.tn) + "," +
                      std::to_string(report.confusion.fn) + "\n");
  const double total = static_cast<double>(
      report.confusion.tp + report.confusion.fp + report.confusion.tn +
      report.confusion.fn);
  struct CellSpec {
    const char* label;
    std::int64_t count;
    double x, y;
  };
  const double cell = 150, ox = 180, oy = 80;
  const CellSpec cells[4] = {
      {"tp", report.confusion.tp, ox, oy},
      {"fn", report.confusion.fn, ox + cell, oy},
      {"fp", report.confusion.fp, ox, oy + cell},
      {"tn", report.confusion.tn, ox + cell, oy + cell},
  };
  for (const auto& c : cells) {
    const double frac = total > 0 ? static_cast<double>(c.count) / total : 0.0;
    out += "<rect class=\"cell\" x=\"" + format_fixed(c.x) + "\" y=\"" +
           format_fixed(c.y) + "\" width=\"" + format_fixed(cell) +
           "\" height=\"" + format_fixed(cell) + "\" fill=\"" +
           heat_color(frac) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + format_fixed(c.x + cell / 2 - 20) + "\" y=\"" +
           format_fixed(c.y + cell / 2) + "\">" + c.label + " = " +
           std::to_string(c.count) + "</text>\n";
  }
  out += "<text x=\"" + format_fixed(ox) + "\" y=\"" + format_fixed(oy - 10) +
         "\">gold ai</text>\n";
  out += "<text x=\"" + format_fixed(ox + cell) + "\" y=\"" +
         format_fixed(oy - 10) + "\">gold human</text>\n";
  out += "<text x=\"" + format_fixed(ox - 110) + "\" y=\"" +
         format_fixed(oy + cell / 2) + "\">predicted ai</text>\n";
  out += "<text x=\"" + format_fixed(ox - 110) + "\" y=\"" +
         format_fixed(oy + cell * 1.5) + "\">predicted human</text>\n";
  out += "<text x=\"" + format_fixed(ox) + "\" y=\"" +
         format_fixed(oy + 2 * cell + 40) + "\">accuracy " +
         format_percent(report.accuracy) + "  precision " +
         format_percent(report.precision) + "  recall " +
         format_percent(report.recall) + "  f1 " + format_percent(report.f1) +
         "</text>\n";
  out += "</svg>\n";
  return out;
}

std::string grid_to_svg(std::span<const GridCell> grid) {
  std::string out = svg_open("Cross-evaluation F1 grid");
  out += data_comment(grid_to_csv_pivot(grid, "f1"));
  const auto keys = grid_keys(grid);
  const double left = 150, top = 70;
  const double avail = std::min<double>(kSvgWidth - left - 30,
                                        kSvgHeight - top - 30);
  const double cell =
      keys.empty() ? avail : avail / static_cast<double>(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t j = 0; j < keys.size(); ++j) {
      const GridCell* gc = find_cell(grid, keys[i], keys[j]);
      if (!gc) continue;
      const double x = left + cell * static_cast<double>(j);
      const double y = top + cell * static_cast<double>(i);
      out += "<rect class=\"cell\" x=\"" + format_fixed(x) + "\" y=\"" +
             format_fixed(y) + "\" width=\"" + format_fixed(cell) +
             "\" height=\"" + format_fixed(cell) + "\" fill=\"" +
             heat_color(gc->report.f1) + "\" stroke=\"white\"/>\n";
      out += "<text x=\"" + format_fixed(x + 4) + "\" y=\"" +
             format_fixed(y + cell / 2 + 4) + "\">" +
             format_percent(gc->report.f1) + "</text>\n";
    }
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out += "<text x=\"10\" y=\"" +
           format_fixed(top + cell * static_cast<double>(i) + cell / 2) +
           "\">" + json_escape(keys[i]) + "</text>\n";
    out += "<text x=\"" +
           format_fixed(left + cell * static_cast<double>(i) + 4) + "\" y=\"" +
           format_fixed(top - 8) + "\">" + json_escape(keys[i]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

// ---------------------------------------------------------------------------
// Feature matrices
// ---------------------------------------------------------------------------

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

std::string features_to_csv(const LabeledFeatures& features) {
  if (features.rows.size() != features.labels.size())
    throw std::invalid_argument("features_to_csv: row/label count mismatch");
  std::string out = "doc_id,label";
  if (!features.rows.empty())
    for (const auto& name : features.rows.front().names) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < features.rows.size(); ++i) {
    const auto& row = features.rows[i];
    if (!features.rows.empty() && row.names != features.rows.front().names)
      throw std::invalid_argument("features_to_csv: inconsistent feature names");
    out += csv_escape(row.doc_id);
    out += features.labels[i] == 1 ? ",ai" : ",human";
    for (double v : row.values) out += "," + format_fixed(v);
    out += "\n";
  }
  return out;
}

LabeledFeatures features_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("feature CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "doc_id" || header[1] != "label")
    throw std::runtime_error(
        "feature CSV: header must start with doc_id,label");
  const std::vector<std::string> names(header.begin() + 2, header.end());

  LabeledFeatures features;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error("feature CSV line " + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) +
                               " fields, got " + std::to_string(fields.size()));
    FeatureVector fv;
    fv.doc_id = fields[0];
    fv.names = names;
    for (std::size_t i = 2; i < fields.size(); ++i)
      fv.values.push_back(std::stod(fields[i]));
    if (fields[1] != "ai" && fields[1] != "human")
      throw std::runtime_error("feature CSV line " + std::to_string(line_no) +
                               ": label must be ai or human");
    features.labels.push_back(fields[1] == "ai" ? 1 : 0);
    features.rows.push_back(std::move(fv));
  }
  return features;
}

Dataset dataset_from_features(const LabeledFeatures& features) {
  Dataset data;
  if (features.rows.empty())
    throw std::invalid_argument("dataset_from_features: no rows");
  data.feature_names = features.rows.front().names;
  data.labels = features.labels;
  data.x.rows = features.rows.size();
  data.x.cols = data.feature_names.size();
  data.x.values.reserve(data.x.rows * data.x.cols);
  for (const auto& row : features.rows) {
    if (row.names != data.feature_names)
      throw std::invalid_argument(
          "dataset_from_features: inconsistent feature names");
    data.x.values.insert(data.x.values.end(), row.values.begin(),
                         row.values.end());
  }
  return data;
}

// ---------------------------------------------------------------------------
// Manifest & report dispatch
// ---------------------------------------------------------------------------

std::string manifest_to_json(const RunManifest& manifest) {
  std::string out = "{\n";
  out += "  \"command\": \"" + json_escape(manifest.command) + "\",\n";
  out += "  \"config\": {";
  bool first = true;
  for (const auto& [key, value] : manifest.config) {
    if (!first) out += ", ";
    first = false;
    out += "\"" + json_escape(key) + "\": \"" + json_escape(value) + "\"";
  }
  out += "},\n";
  out += "  \"finished\": \"" + json_escape(manifest.finished) + "\",\n";
  out += "  \"input_hashes\": {";
  first = true;
  for (const auto& [path, hash] : manifest.input_hashes) {
    if (!first) out += ", ";
    first = false;
    out += "\"" + json_escape(path) + "\": \"" + json_escape(hash) + "\"";
  }
  out += "},\n";
  out += "  \"seed\": " + std::to_string(manifest.seed) + ",\n";
  out += "  \"started\": \"" + json_escape(manifest.started) + "\",\n";
  out += "  \"tool_version\": \"" + json_escape(manifest.tool_version) +
         "\"\n}\n";
  return out;
}

std::string render_report(const std::string& report_json,
                          const std::string& format) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(report_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("report: not valid JSON: ") +
                             e.what());
  }

  auto is_schema = [&](const char* field) {
    if (parsed.is_array())
      return parsed.empty() ||
             (parsed.front().is_object() && parsed.front().contains(field));
    return parsed.is_object() && parsed.contains(field);
  };

  if (parsed.is_array() && !parsed.empty() && parsed.front().contains("adi")) {
    const auto scores = spectrum_from_json(report_json);
    if (format == "json") return spectrum_to_json(scores);
    if (format == "csv") return spectrum_to_csv(scores);
    if (format == "svg") return spectrum_to_svg(scores);
  } else if (parsed.is_array() &&
             (parsed.empty() || parsed.front().contains("fraction"))) {
    const auto points = tradeoff_from_json(report_json);
    if (format == "json") return tradeoff_to_json(points);
    if (format == "csv") return tradeoff_to_csv(points);
    if (format == "svg") return tradeoff_to_svg(points);
  } else if (parsed.is_array() && parsed.front().contains("train_key")) {
    const auto grid = grid_from_json(report_json);
    if (format == "json") return grid_to_json(grid);
    if (format == "csv") return grid_to_csv(grid);
    if (format == "svg") return grid_to_svg(grid);
  } else if (is_schema("confusion")) {
    const auto report = eval_report_from_json(report_json);
    if (format == "json") return eval_report_to_json(report);
    if (format == "csv") {
      return "accuracy,precision,recall,f1,tp,fp,tn,fn\n" +
             format_percent(report.accuracy) + "," +
             format_percent(report.precision) + "," +
             format_percent(report.recall) + "," + format_percent(report.f1) +
             "," + std::to_string(report.confusion.tp) + "," +
             std::to_string(report.confusion.fp) + "," +
             std::to_string(report.confusion.tn) + "," +
             std::to_string(report.confusion.fn) + "\n";
    }
    if (format == "svg") return eval_report_to_svg(report);
  } else {
    throw std::runtime_error("report: unrecognized report schema");
  }
  throw std::runtime_error("report: unknown format \"" + format +
                           "\" (expected json, csv or svg)");
}

}  // namespace agtd
