#include "agtd/classify.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>

#include "agtd/hashing.hpp"
#include "json.hpp"
#include "parallel.hpp"

namespace agtd {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_dataset(const Dataset& data) {
  if (data.x.rows != data.labels.size())
    throw std::invalid_argument("dataset: row/label count mismatch");
  if (data.x.cols != data.feature_names.size())
    throw std::invalid_argument("dataset: column/name count mismatch");
  for (double v : data.x.values)
    if (!std::isfinite(v))
      throw std::invalid_argument("dataset: non-finite feature value");
  for (int label : data.labels)
    if (label != 0 && label != 1)
      throw std::invalid_argument("dataset: labels must be 0 or 1");
}

}  // namespace

double LinearModel::predict_proba(const double* row) const {
  double score = bias;
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const double z = (row[kept[j]] - means[j]) / stddevs[j];
    score += weights[j] * z;
  }
  return sigmoid(score);
}

EvalReport eval_from_confusion(const Confusion& c) {
  EvalReport r;
  r.confusion = c;
  const double total = static_cast<double>(c.tp + c.fp + c.tn + c.fn);
  r.accuracy = total > 0 ? static_cast<double>(c.tp + c.tn) / total : 0.0;
  r.precision = (c.tp + c.fp) > 0
                    ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                    : 0.0;
  r.recall = (c.tp + c.fn) > 0
                 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                 : 0.0;
  r.f1 = (r.precision + r.recall) > 0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

LinearModel train(const Dataset& data, TrainOptions options) {
  check_dataset(data);
  const std::size_t n = data.x.rows;
  const auto positives = static_cast<std::size_t>(
      std::count(data.labels.begin(), data.labels.end(), 1));
  if (positives < 2 || n - positives < 2)
    throw std::invalid_argument(
        "train: need at least two examples of each class (got " +
        std::to_string(n - positives) + " human, " +
        std::to_string(positives) + " ai)");

  LinearModel model;
  model.input_names = data.feature_names;
  model.seed = options.seed;

  // Column statistics; constant columns are dropped.
  for (std::size_t c = 0; c < data.x.cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += data.x.at(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = data.x.at(r, c) - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    if (var <= 0.0) {
      model.dropped_names.push_back(data.feature_names[c]);
      continue;
    }
    model.kept.push_back(c);
    model.means.push_back(mean);
    model.stddevs.push_back(std::sqrt(var));
  }
  if (!model.dropped_names.empty()) {
    std::cerr << "warning: dropped " << model.dropped_names.size()
              << " constant feature column(s)";
    for (const auto& name : model.dropped_names) std::cerr << " " << name;
    std::cerr << "\n";
  }
  if (model.kept.empty())
    throw std::invalid_argument("train: every feature column is constant");

  const std::size_t m = model.kept.size();
  std::vector<double> z(n * m);  // standardized design matrix
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < m; ++j)
      z[r * m + j] =
          (data.x.at(r, model.kept[j]) - model.means[j]) / model.stddevs[j];

  model.weights.assign(m, 0.0);
  model.bias = 0.0;
  std::vector<double> grad(m);
  double loss = 0.0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double score = model.bias;
      for (std::size_t j = 0; j < m; ++j)
        score += model.weights[j] * z[r * m + j];
      const double p = sigmoid(score);
      const double y = static_cast<double>(data.labels[r]);
      const double err = p - y;
      for (std::size_t j = 0; j < m; ++j) grad[j] += err * z[r * m + j];
      grad_b += err;
      // Numerically stable log-loss: log(1 + exp(-|s|)) + max(0, -ys')
      const double margin = y > 0.5 ? score : -score;
      loss += margin >= 0.0 ? std::log1p(std::exp(-margin))
                            : -margin + std::log1p(std::exp(margin));
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    double reg = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      grad[j] = grad[j] * inv_n + options.l2 * model.weights[j];
      reg += model.weights[j] * model.weights[j];
      model.weights[j] -= options.lr * grad[j];
    }
    model.bias -= options.lr * grad_b * inv_n;
    loss = loss * inv_n + 0.5 * options.l2 * reg;
  }
  model.final_loss = loss;
  return model;
}

EvalReport evaluate(const LinearModel& model, const Dataset& data,
                    double threshold) {
  check_dataset(data);
  if (data.feature_names != model.input_names)
    throw std::invalid_argument(
        "evaluate: feature names do not match the model's training columns");
  Confusion c;
  for (std::size_t r = 0; r < data.x.rows; ++r) {
    const double p = model.predict_proba(&data.x.values[r * data.x.cols]);
    const bool predicted_ai = p >= threshold;
    const bool gold_ai = data.labels[r] == 1;
    if (predicted_ai && gold_ai) ++c.tp;
    else if (predicted_ai) ++c.fp;
    else if (gold_ai) ++c.fn;
    else ++c.tn;
  }
  return eval_from_confusion(c);
}

namespace {

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t mask = n - 1;
  mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
  mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
  for (;;) {
    const std::uint64_t r = rng() & mask;
    if (r < n) return r;
  }
}

Dataset subset_rows(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.x.rows = rows.size();
  out.x.cols = data.x.cols;
  out.x.values.reserve(rows.size() * data.x.cols);
  for (std::size_t r : rows) {
    const double* begin = &data.x.values[r * data.x.cols];
    out.x.values.insert(out.x.values.end(), begin, begin + data.x.cols);
    out.labels.push_back(data.labels[r]);
  }
  return out;
}

}  // namespace

std::vector<GridCell> cross_grid(const std::map<std::string, Dataset>& datasets,
                                 std::uint64_t seed, TrainOptions options,
                                 int threads) {
  if (datasets.size() < 2)
    throw std::invalid_argument("cross_grid: need at least two datasets");

  std::vector<std::string> keys;
  for (const auto& [key, _] : datasets) keys.push_back(key);  // sorted (map)

  // One model and one holdout per training key, from a seeded 80/20 split.
  struct TrainedCell {
    LinearModel model;
    Dataset holdout;
  };
  std::vector<TrainedCell> trained(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t i) {
    const Dataset& full = datasets.at(keys[i]);
    std::mt19937_64 rng(derive_seed(seed, fnv1a64(keys[i])));
    std::vector<std::size_t> order(full.x.rows);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t j = 0; j + 1 < order.size(); ++j) {
      const std::size_t k = j + bounded(rng, order.size() - j);
      std::swap(order[j], order[k]);
    }
    const std::size_t n_train = full.x.rows * 4 / 5;
    TrainOptions cell_options = options;
    cell_options.seed = derive_seed(seed, fnv1a64(keys[i]), 1);
    trained[i].model = train(
        subset_rows(full, {order.data(), n_train}), cell_options);
    trained[i].holdout =
        subset_rows(full, {order.data() + n_train, order.size() - n_train});
  });

  std::vector<GridCell> grid(keys.size() * keys.size());
  parallel_for(grid.size(), threads, [&](std::size_t cell) {
    const std::size_t i = cell / keys.size();
    const std::size_t j = cell % keys.size();
    GridCell& out = grid[cell];
    out.train_key = keys[i];
    out.test_key = keys[j];
    out.report = i == j ? evaluate(trained[i].model, trained[i].holdout)
                        : evaluate(trained[i].model, datasets.at(keys[j]));
  });
  return grid;
}

std::string model_to_json(const LinearModel& model) {
  nlohmann::json obj{{"input_names", model.input_names},
                     {"kept", model.kept},
                     {"dropped_names", model.dropped_names},
                     {"weights", model.weights},
                     {"bias", model.bias},
                     {"means", model.means},
                     {"stddevs", model.stddevs},
                     {"final_loss", model.final_loss},
                     {"seed", model.seed}};
  return obj.dump(2);
}

LinearModel model_from_json(const std::string& json_text) {
  nlohmann::json obj = nlohmann::json::parse(json_text);
  LinearModel model;
  model.input_names = obj.at("input_names").get<std::vector<std::string>>();
  model.kept = obj.at("kept").get<std::vector<std::size_t>>();
  model.dropped_names =
      obj.at("dropped_names").get<std::vector<std::string>>();
  model.weights = obj.at("weights").get<std::vector<double>>();
  model.bias = obj.at("bias").get<double>();
  model.means = obj.at("means").get<std::vector<double>>();
  model.stddevs = obj.at("stddevs").get<std::vector<double>>();
  model.final_loss = obj.at("final_loss").get<double>();
  model.seed = obj.at("seed").get<std::uint64_t>();
  if (model.weights.size() != model.kept.size() ||
      model.means.size() != model.kept.size() ||
      model.stddevs.size() != model.kept.size())
    throw std::runtime_error("model JSON: inconsistent array lengths");
  for (double s : model.stddevs)
    if (!(s > 0.0)) throw std::runtime_error("model JSON: stddev must be > 0");
  return model;
}

}  // namespace agtd
