#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace agtd {

/// An n x d point cloud, row-major. Construct through `make_point_cloud`,
/// which enforces finiteness and removes near-duplicate points (within
/// 1e-12 Euclidean) so the estimators never see zero distances.
struct PointCloud {
  std::vector<double> data;
  std::size_t n = 0;
  std::size_t d = 0;

  std::span<const double> point(std::size_t i) const {
    return {data.data() + i * d, d};
  }
};

/// Builds a cloud from rows, deduplicating near-identical points.
/// `dropped_duplicates`, when given, receives the number of removed rows.
PointCloud make_point_cloud(const std::vector<std::vector<double>>& rows,
                            std::size_t* dropped_duplicates = nullptr);

struct IntrinsicDimReport {
  double mle = 0.0;
  double phd = 0.0;
  double phd_slope = 0.0;
  double phd_r2 = 0.0;
  std::size_t n_used = 0;
};

struct PhdResult {
  double dimension = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

/// Levina-Bickel k-NN estimator with inverse-averaged aggregation:
/// per-point inverse estimates are averaged, then inverted.
double mle_dimension(const PointCloud& cloud, int k = 20);

/// Total Euclidean edge weight of the minimum spanning tree (Prim over the
/// dense metric). Inputs above 4000 points must be pre-subsampled; larger
/// clouds are an explicit error.
double mst_total_length(const PointCloud& cloud);

/// Persistence-homology dimension from the power-law growth of MST length
/// with sample size: subsets geometrically spaced in [min_subset, n],
/// `repeats` resamples each, median length per size, least-squares fit of
/// ln E against ln size, and d = 1 / (1 - slope). Deterministic per seed.
PhdResult phd_dimension(const PointCloud& cloud, int min_subset = 40,
                        int n_sizes = 8, int repeats = 3,
                        std::uint64_t rng_seed = 0);

/// Runs both estimators over one cloud.
IntrinsicDimReport intrinsic_dim_report(const PointCloud& cloud, int k = 20,
                                        int min_subset = 40, int n_sizes = 8,
                                        int repeats = 3,
                                        std::uint64_t rng_seed = 0);

/// Loads either the text format ("n d" header, then n rows of d reals) or
/// JSON {"points": [[...], ...]}. The format is sniffed from the first
/// non-whitespace byte.
PointCloud load_point_cloud(const std::string& path);

}  // namespace agtd
