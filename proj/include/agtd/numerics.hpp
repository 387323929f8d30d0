#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace agtd {

/// A probability distribution over an ordered support.
struct Distribution {
  std::vector<double> probs;

  /// Normalizes non-negative weights (sum > 0) into a distribution.
  static Distribution from_weights(std::span<const double> weights);
  static Distribution from_counts(std::span<const std::int64_t> counts);

  /// Validates the invariants: entries >= 0, sum within 1e-9 of 1.
  static Distribution validated(std::vector<double> probs);
};

/// KL divergence is an extended real: it is infinite exactly when p puts
/// mass where q has none. Reports substitute the sentinel 1000 for plotting;
/// the sentinel never participates in computation.
struct KlDivergence {
  double bits = 0.0;
  bool finite = true;

  static constexpr double kReportSentinel = 1000.0;
  double report_value() const { return finite ? bits : kReportSentinel; }
};

/// Sum over p_i > 0 of p_i * log2(p_i / q_i).
KlDivergence kl_divergence(const Distribution& p, const Distribution& q);

/// Jensen-Shannon divergence in bits: always finite, 0 iff p = q,
/// 1 iff the supports are disjoint.
double js_divergence(const Distribution& p, const Distribution& q);

struct PowerTransform {
  std::vector<double> transformed;
  double lambda = 1.0;
};

/// The Yeo-Johnson map psi(x; lambda), strictly increasing in x.
double yeo_johnson_apply(double x, double lambda);

/// Applies Yeo-Johnson with lambda chosen by maximizing the Gaussian profile
/// log-likelihood over the grid lambda in [-5, 5] step 0.01. A constant
/// input is returned unchanged with lambda = 1 (degenerate likelihood).
PowerTransform yeo_johnson(std::span<const double> values);

/// Affine map sending min -> lo and max -> hi; a constant input maps to lo.
std::vector<double> min_max_scale(std::span<const double> values,
                                  double lo = 0.0, double hi = 100.0);

/// 1 - Phi(z), evaluated via erfc.
double normal_upper_tail(double z);

}  // namespace agtd
