#include "agtd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace agtd {

Distribution Distribution::from_weights(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0))
      throw std::invalid_argument("distribution weights must be >= 0");
    total += w;
  }
  if (total <= 0.0)
    throw std::invalid_argument("distribution weights must not all be zero");
  Distribution d;
  d.probs.reserve(weights.size());
  for (double w : weights) d.probs.push_back(w / total);
  return d;
}

Distribution Distribution::from_counts(std::span<const std::int64_t> counts) {
  std::vector<double> weights(counts.begin(), counts.end());
  return from_weights(weights);
}

Distribution Distribution::validated(std::vector<double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0))
      throw std::invalid_argument("distribution entries must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("distribution entries must sum to 1");
  Distribution d;
  d.probs = std::move(probs);
  return d;
}

static void check_same_support(const Distribution& p, const Distribution& q) {
  if (p.probs.size() != q.probs.size())
    throw std::invalid_argument("divergence: support length mismatch (" +
                                std::to_string(p.probs.size()) + " vs " +
                                std::to_string(q.probs.size()) + ")");
}

KlDivergence kl_divergence(const Distribution& p, const Distribution& q) {
  check_same_support(p, q);
  KlDivergence result;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) {
    const double pi = p.probs[i];
    if (pi <= 0.0) continue;
    const double qi = q.probs[i];
    if (qi <= 0.0) {
      result.finite = false;
      result.bits = std::numeric_limits<double>::infinity();
      return result;
    }
    sum += pi * std::log2(pi / qi);
  }
  result.bits = sum;
  return result;
}

double js_divergence(const Distribution& p, const Distribution& q) {
  check_same_support(p, q);
  // KL(p||m) with m the pointwise mean; m_i = 0 implies p_i = 0, so both
  // halves are finite by construction.
  double sum = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) {
    const double pi = p.probs[i];
    const double qi = q.probs[i];
    const double mi = 0.5 * (pi + qi);
    if (pi > 0.0) sum += 0.5 * pi * std::log2(pi / mi);
    if (qi > 0.0) sum += 0.5 * qi * std::log2(qi / mi);
  }
  return std::max(0.0, sum);
}

double yeo_johnson_apply(double x, double lambda) {
  if (x >= 0.0) {
    if (std::abs(lambda) < 1e-12) return std::log1p(x);
    return (std::pow(x + 1.0, lambda) - 1.0) / lambda;
  }
  if (std::abs(lambda - 2.0) < 1e-12) return -std::log1p(-x);
  const double two_ml = 2.0 - lambda;
  return -(std::pow(-x + 1.0, two_ml) - 1.0) / two_ml;
}

namespace {

// Gaussian profile log-likelihood of the transformed sample, including the
// Jacobian term (lambda - 1) * sum sign(x) * log(|x| + 1).
double yj_log_likelihood(std::span<const double> values, double lambda,
                         double jacobian_sum, std::vector<double>& scratch) {
  scratch.clear();
  for (double x : values) scratch.push_back(yeo_johnson_apply(x, lambda));
  const double n = static_cast<double>(scratch.size());
  double mean = 0.0;
  for (double t : scratch) mean += t;
  mean /= n;
  double var = 0.0;
  for (double t : scratch) var += (t - mean) * (t - mean);
  var /= n;
  if (!(var > 0.0) || !std::isfinite(var))
    return -std::numeric_limits<double>::infinity();
  return -0.5 * n * std::log(var) + (lambda - 1.0) * jacobian_sum;
}

}  // namespace

PowerTransform yeo_johnson(std::span<const double> values) {
  if (values.empty())
    throw std::invalid_argument("yeo_johnson: empty input");
  const bool constant =
      std::all_of(values.begin(), values.end(),
                  [&](double v) { return v == values.front(); });
  if (constant) {
    return PowerTransform{{values.begin(), values.end()}, 1.0};
  }

  double jacobian_sum = 0.0;
  for (double x : values) {
    const double term = std::log1p(std::abs(x));
    jacobian_sum += x < 0.0 ? -term : term;
  }

  double best_lambda = 1.0;
  double best_ll = -std::numeric_limits<double>::infinity();
  std::vector<double> scratch;
  scratch.reserve(values.size());
  for (int step = 0; step <= 1000; ++step) {
    const double lambda = -5.0 + 0.01 * step;
    const double ll = yj_log_likelihood(values, lambda, jacobian_sum, scratch);
    if (ll > best_ll) {
      best_ll = ll;
      best_lambda = lambda;
    }
  }

  PowerTransform result;
  result.lambda = best_lambda;
  result.transformed.reserve(values.size());
  for (double x : values)
    result.transformed.push_back(yeo_johnson_apply(x, best_lambda));
  return result;
}

std::vector<double> min_max_scale(std::span<const double> values, double lo,
                                  double hi) {
  if (values.empty())
    throw std::invalid_argument("min_max_scale: empty input");
  if (!(hi > lo))
    throw std::invalid_argument("min_max_scale: hi must exceed lo");
  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double mn = *mn_it, mx = *mx_it;
  std::vector<double> out;
  out.reserve(values.size());
  if (mx == mn) {
    out.assign(values.size(), lo);
    return out;
  }
  const double scale = (hi - lo) / (mx - mn);
  for (double v : values) {
    // Endpoints map exactly; interior values never overshoot them.
    if (v == mx) out.push_back(hi);
    else if (v == mn) out.push_back(lo);
    else out.push_back(std::clamp(lo + (v - mn) * scale, lo, hi));
  }
  return out;
}

double normal_upper_tail(double z) {
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace agtd
