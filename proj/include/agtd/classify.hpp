#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace agtd {

/// Row-major feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

struct Dataset {
  FeatureMatrix x;
  std::vector<int> labels;  // 0 = human, 1 = ai
  std::vector<std::string> feature_names;
};

/// Standardized logistic-regression model. Constant feature columns are
/// dropped at training time (their names are recorded); weights, means and
/// stddevs cover only the kept columns, indexed into the original ordering
/// via `kept`.
struct LinearModel {
  std::vector<std::string> input_names;  // full training-time column order
  std::vector<std::size_t> kept;         // indices into input_names
  std::vector<std::string> dropped_names;
  std::vector<double> weights;           // per kept column
  double bias = 0.0;
  std::vector<double> means;             // per kept column
  std::vector<double> stddevs;           // per kept column, all > 0
  double final_loss = 0.0;
  std::uint64_t seed = 0;

  /// P(label = ai) for one row laid out in input_names order.
  double predict_proba(const double* row) const;
};

struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;
};

/// Metrics in [0, 1]; serialized reports scale them to percentages.
/// Positive class is "ai".
struct EvalReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

EvalReport eval_from_confusion(const Confusion& c);

struct TrainOptions {
  double l2 = 1e-3;
  int epochs = 500;
  double lr = 0.1;
  std::uint64_t seed = 0;
};

/// Full-batch gradient descent on L2-regularized logistic loss over
/// standardized features. Deterministic given options. Requires at least
/// two examples of each class.
LinearModel train(const Dataset& data, TrainOptions options = {});

/// Evaluates a model on a dataset whose feature names match the model's
/// training-time names exactly (order included).
EvalReport evaluate(const LinearModel& model, const Dataset& data,
                    double threshold = 0.5);

struct GridCell {
  std::string train_key;
  std::string test_key;
  EvalReport report;
};

/// Trains one model per dataset (on a seeded 80/20 split) and evaluates it
/// against every dataset: the diagonal uses the held-out 20%, off-diagonal
/// cells use the full foreign set. Cells are ordered by (train_key,
/// test_key), keys sorted.
std::vector<GridCell> cross_grid(const std::map<std::string, Dataset>& datasets,
                                 std::uint64_t seed, TrainOptions options = {},
                                 int threads = 1);

std::string model_to_json(const LinearModel& model);
LinearModel model_from_json(const std::string& json_text);

}  // namespace agtd
