#include "agtd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace agtd {

namespace {

constexpr std::size_t kMstMaxPoints = 4000;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t mask = n - 1;
  mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
  mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
  for (;;) {
    const std::uint64_t r = rng() & mask;
    if (r < n) return r;
  }
}

// Prim over an index subset; O(|subset|^2) time, O(|subset|) memory.
double mst_length_subset(const PointCloud& cloud,
                         std::span<const std::size_t> subset) {
  const std::size_t m = subset.size();
  std::vector<double> best(m, std::numeric_limits<double>::infinity());
  std::vector<bool> in_tree(m, false);
  best[0] = 0.0;
  double total = 0.0;
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t u = m;
    double u_best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
      if (!in_tree[i] && best[i] < u_best) {
        u_best = best[i];
        u = i;
      }
    in_tree[u] = true;
    total += std::sqrt(best[u]);
    const auto pu = cloud.point(subset[u]);
    for (std::size_t i = 0; i < m; ++i) {
      if (in_tree[i]) continue;
      const double d2 = squared_distance(pu, cloud.point(subset[i]));
      if (d2 < best[i]) best[i] = d2;
    }
  }
  return total;
}

}  // namespace

PointCloud make_point_cloud(const std::vector<std::vector<double>>& rows,
                            std::size_t* dropped_duplicates) {
  if (rows.empty()) throw std::invalid_argument("point cloud: no rows");
  const std::size_t d = rows.front().size();
  if (d == 0) throw std::invalid_argument("point cloud: zero-dimensional rows");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != d)
      throw std::invalid_argument("point cloud: row " + std::to_string(r + 1) +
                                  " has " + std::to_string(rows[r].size()) +
                                  " values, expected " + std::to_string(d));
    for (double v : rows[r])
      if (!std::isfinite(v))
        throw std::invalid_argument("point cloud: non-finite value at row " +
                                    std::to_string(r + 1));
  }

  PointCloud cloud;
  cloud.d = d;
  std::size_t dropped = 0;
  std::vector<std::span<const double>> kept;
  for (const auto& row : rows) {
    const std::span<const double> candidate(row.data(), d);
    bool duplicate = false;
    for (const auto& existing : kept) {
      if (squared_distance(existing, candidate) <= 1e-24) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      ++dropped;
      continue;
    }
    kept.push_back(candidate);
    cloud.data.insert(cloud.data.end(), candidate.begin(), candidate.end());
  }
  cloud.n = kept.size();
  if (dropped_duplicates) *dropped_duplicates = dropped;
  if (cloud.n < 2)
    throw std::invalid_argument(
        "point cloud: need at least 2 distinct points");
  return cloud;
}

double mle_dimension(const PointCloud& cloud, int k) {
  if (k < 2) throw std::invalid_argument("mle_dimension: k must be >= 2");
  if (cloud.n <= static_cast<std::size_t>(k))
    throw std::invalid_argument("mle_dimension: need n > k (n=" +
                                std::to_string(cloud.n) +
                                ", k=" + std::to_string(k) + ")");
  const std::size_t n = cloud.n;
  const auto ks = static_cast<std::size_t>(k);
  double inverse_sum = 0.0;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = cloud.point(i);
    for (std::size_t j = 0; j < n; ++j)
      d2[j] = j == i ? std::numeric_limits<double>::infinity()
                     : squared_distance(pi, cloud.point(j));
    std::nth_element(d2.begin(), d2.begin() + (ks - 1), d2.end());
    std::sort(d2.begin(), d2.begin() + ks);
    // ln(T_k/T_j) = 0.5 * ln(d2_k / d2_j)
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < ks; ++j)
      s += 0.5 * std::log(d2[ks - 1] / d2[j]);
    inverse_sum += s / static_cast<double>(k - 1);
  }
  return static_cast<double>(n) / inverse_sum;
}

double mst_total_length(const PointCloud& cloud) {
  if (cloud.n > kMstMaxPoints)
    throw std::invalid_argument(
        "mst_total_length: " + std::to_string(cloud.n) +
        " points exceeds the dense-MST cutoff of " +
        std::to_string(kMstMaxPoints) + "; pre-subsample the cloud");
  std::vector<std::size_t> all(cloud.n);
  std::iota(all.begin(), all.end(), 0);
  return mst_length_subset(cloud, all);
}

PhdResult phd_dimension(const PointCloud& cloud, int min_subset, int n_sizes,
                        int repeats, std::uint64_t rng_seed) {
  if (min_subset < 2)
    throw std::invalid_argument("phd_dimension: min_subset must be >= 2");
  if (n_sizes < 2)
    throw std::invalid_argument("phd_dimension: n_sizes must be >= 2");
  if (repeats < 1)
    throw std::invalid_argument("phd_dimension: repeats must be >= 1");
  if (cloud.n < 2 * static_cast<std::size_t>(min_subset))
    throw std::invalid_argument("phd_dimension: need n >= 2 * min_subset");
  if (cloud.n > kMstMaxPoints)
    throw std::invalid_argument(
        "phd_dimension: " + std::to_string(cloud.n) +
        " points exceeds the dense-MST cutoff of " +
        std::to_string(kMstMaxPoints) + "; pre-subsample the cloud");

  // Geometrically spaced subset sizes from min_subset up to n.
  std::vector<std::size_t> sizes;
  const double lo = static_cast<double>(min_subset);
  const double ratio = static_cast<double>(cloud.n) / lo;
  for (int i = 0; i < n_sizes; ++i) {
    const double f = static_cast<double>(i) / (n_sizes - 1);
    const auto s = static_cast<std::size_t>(
        std::llround(lo * std::pow(ratio, f)));
    if (sizes.empty() || s != sizes.back()) sizes.push_back(s);
  }

  std::mt19937_64 rng(rng_seed);
  std::vector<std::size_t> indices(cloud.n);
  std::iota(indices.begin(), indices.end(), 0);

  std::vector<double> log_size, log_length;
  for (const std::size_t s : sizes) {
    std::vector<double> lengths;
    lengths.reserve(repeats);
    for (int r = 0; r < repeats; ++r) {
      // Partial Fisher-Yates: the first s entries become the sample.
      for (std::size_t i = 0; i < s; ++i) {
        const std::size_t j = i + bounded(rng, cloud.n - i);
        std::swap(indices[i], indices[j]);
      }
      lengths.push_back(
          mst_length_subset(cloud, {indices.data(), s}));
    }
    std::sort(lengths.begin(), lengths.end());
    const std::size_t mid = lengths.size() / 2;
    const double median = lengths.size() % 2
                              ? lengths[mid]
                              : 0.5 * (lengths[mid - 1] + lengths[mid]);
    log_size.push_back(std::log(static_cast<double>(s)));
    log_length.push_back(std::log(median));
  }

  // Least-squares line through (ln size, ln E).
  const auto m = static_cast<double>(log_size.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < log_size.size(); ++i) {
    sx += log_size[i];
    sy += log_length[i];
    sxx += log_size[i] * log_size[i];
    sxy += log_size[i] * log_length[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / m;
  double ss_res = 0.0, ss_tot = 0.0;
  const double y_mean = sy / m;
  for (std::size_t i = 0; i < log_size.size(); ++i) {
    const double fit = slope * log_size[i] + intercept;
    ss_res += (log_length[i] - fit) * (log_length[i] - fit);
    ss_tot += (log_length[i] - y_mean) * (log_length[i] - y_mean);
  }

  if (slope >= 1.0)
    throw std::runtime_error("phd_dimension: non-physical slope " +
                             std::to_string(slope) + " (degenerate cloud)");
  PhdResult result;
  result.slope = slope;
  result.dimension = 1.0 / (1.0 - slope);
  result.r2 = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 0.0;
  return result;
}

IntrinsicDimReport intrinsic_dim_report(const PointCloud& cloud, int k,
                                        int min_subset, int n_sizes,
                                        int repeats, std::uint64_t rng_seed) {
  IntrinsicDimReport report;
  report.mle = mle_dimension(cloud, k);
  const PhdResult phd = phd_dimension(cloud, min_subset, n_sizes, repeats,
                                      rng_seed);
  report.phd = phd.dimension;
  report.phd_slope = phd.slope;
  report.phd_r2 = phd.r2;
  report.n_used = cloud.n;
  return report;
}

namespace {

PointCloud load_json_cloud(const std::string& contents) {
  nlohmann::json obj = nlohmann::json::parse(contents);
  if (!obj.contains("points") || !obj["points"].is_array())
    throw std::runtime_error("point cloud JSON must contain \"points\"");
  std::vector<std::vector<double>> rows;
  std::size_t row_no = 0;
  for (const auto& row : obj["points"]) {
    ++row_no;
    if (!row.is_array())
      throw std::runtime_error("point cloud JSON: row " +
                               std::to_string(row_no) + " is not an array");
    rows.push_back(row.get<std::vector<double>>());
  }
  std::size_t dropped = 0;
  PointCloud cloud = make_point_cloud(rows, &dropped);
  if (dropped > 0)
    std::cerr << "warning: dropped " << dropped
              << " duplicate point(s) on load\n";
  return cloud;
}

PointCloud load_text_cloud(const std::string& contents) {
  std::istringstream in(contents);
  std::size_t n = 0, d = 0;
  if (!(in >> n >> d) || n == 0 || d == 0)
    throw std::runtime_error(
        "point cloud: expected header \"n d\" with positive counts");
  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  std::string token;
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> row;
    row.reserve(d);
    for (std::size_t c = 0; c < d; ++c) {
      if (!(in >> token))
        throw std::runtime_error("point cloud: row " + std::to_string(r + 1) +
                                 " has " + std::to_string(c) +
                                 " values, expected " + std::to_string(d));
      try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        row.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error("point cloud: cannot parse \"" + token +
                                 "\" at row " + std::to_string(r + 1));
      }
    }
    rows.push_back(std::move(row));
  }
  if (in >> token)
    throw std::runtime_error("point cloud: trailing data after " +
                             std::to_string(n) + " rows");
  std::size_t dropped = 0;
  PointCloud cloud = make_point_cloud(rows, &dropped);
  if (dropped > 0)
    std::cerr << "warning: dropped " << dropped
              << " duplicate point(s) on load\n";
  return cloud;
}

}  // namespace

PointCloud load_point_cloud(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open point cloud file: " + path);
  std::string contents((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  const auto first = contents.find_first_not_of(" \t\r\n");
  if (first == std::string::npos)
    throw std::runtime_error("point cloud file is empty: " + path);
  return contents[first] == '{' ? load_json_cloud(contents)
                                : load_text_cloud(contents);
}

}  // namespace agtd
