#include "agtd/geometry.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace agtd;

namespace {

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path =
      (std::filesystem::temp_directory_path() / ("agtd_geom_" + name)).string();
  std::ofstream out(path, std::ios::binary);
  out << contents;
  return path;
}

std::vector<std::vector<double>> rotate_xy_translate(
    const std::vector<std::vector<double>>& rows, double angle,
    double shift) {
  auto out = rows;
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& row : out) {
    const double x = row[0], y = row[1];
    row[0] = c * x - s * y + shift;
    row[1] = s * x + c * y - shift;
    for (std::size_t k = 2; k < row.size(); ++k) row[k] += shift;
  }
  return out;
}

}  // namespace

TEST_CASE("make_point_cloud validates and deduplicates") {
  CHECK_THROWS(make_point_cloud({}));
  CHECK_THROWS(make_point_cloud({{1.0, 2.0}, {1.0}}));
  CHECK_THROWS(make_point_cloud({{1.0, std::nan("")}, {0.0, 0.0}}));
  CHECK_THROWS(make_point_cloud({{1.0, 1.0}, {1.0, 1.0}}));  // < 2 distinct

  std::size_t dropped = 0;
  const auto cloud =
      make_point_cloud({{0, 0}, {1, 1}, {0, 0}, {2, 2}}, &dropped);
  CHECK(cloud.n == 3);
  CHECK(dropped == 1);
}

TEST_CASE("mst total length") {
  SUBCASE("two points") {
    const auto cloud = make_point_cloud({{0, 0}, {3, 4}});
    CHECK(mst_total_length(cloud) == doctest::Approx(5.0));
  }
  SUBCASE("three collinear points") {
    const auto cloud = make_point_cloud({{0.0}, {1.0}, {3.0}});
    CHECK(mst_total_length(cloud) == doctest::Approx(3.0));
  }
  SUBCASE("random clouds match the Kruskal oracle") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 10; ++trial) {
      const auto rows = oracle::cube_cloud(50, 3, 3, rng());
      CHECK(mst_total_length(make_point_cloud(rows)) ==
            doctest::Approx(oracle::mst_kruskal(rows)).epsilon(1e-9));
    }
    for (int trial = 0; trial < 3; ++trial) {
      const auto rows = oracle::cube_cloud(200, 4, 4, rng());
      CHECK(mst_total_length(make_point_cloud(rows)) ==
            doctest::Approx(oracle::mst_kruskal(rows)).epsilon(1e-9));
    }
  }
  SUBCASE("dense cutoff is an explicit error") {
    const auto rows = oracle::cube_cloud(4001, 1, 1, 7);
    CHECK_THROWS_WITH_AS(mst_total_length(make_point_cloud(rows)),
                         doctest::Contains("pre-subsample"),
                         std::invalid_argument);
  }
}

TEST_CASE("mle dimension on synthetic manifolds") {
  SUBCASE("unit square in 10-dim ambient space") {
    const auto cloud = make_point_cloud(oracle::cube_cloud(2000, 2, 10, 101));
    const double d = mle_dimension(cloud, 20);
    CHECK(d > 1.7);
    CHECK(d < 2.3);
  }
  SUBCASE("5-cube") {
    const auto cloud = make_point_cloud(oracle::cube_cloud(2000, 5, 5, 102));
    const double d = mle_dimension(cloud, 20);
    CHECK(d > 4.2);
    CHECK(d < 5.8);
  }
  SUBCASE("line segment") {
    const auto cloud = make_point_cloud(oracle::cube_cloud(500, 1, 3, 103));
    const double d = mle_dimension(cloud, 20);
    CHECK(d > 0.85);
    CHECK(d < 1.15);
  }
  SUBCASE("needs n > k") {
    const auto cloud = make_point_cloud(oracle::cube_cloud(10, 2, 2, 104));
    CHECK_THROWS(mle_dimension(cloud, 10));
    CHECK_THROWS(mle_dimension(cloud, 1));
  }
}

TEST_CASE("estimator invariances") {
  const auto rows = oracle::cube_cloud(600, 2, 4, 105);
  const auto cloud = make_point_cloud(rows);
  const double base_mle = mle_dimension(cloud, 15);
  const auto base_phd = phd_dimension(cloud, 40, 6, 3, 999);

  SUBCASE("scaling all coordinates") {
    auto scaled = rows;
    for (auto& row : scaled)
      for (auto& v : row) v *= 37.5;
    const auto scaled_cloud = make_point_cloud(scaled);
    CHECK(std::abs(mle_dimension(scaled_cloud, 15) - base_mle) < 1e-9);
    const auto phd = phd_dimension(scaled_cloud, 40, 6, 3, 999);
    CHECK(std::abs(phd.dimension - base_phd.dimension) < 1e-9);
    CHECK(std::abs(phd.slope - base_phd.slope) < 1e-9);
  }
  SUBCASE("rotation and translation") {
    const auto moved_cloud =
        make_point_cloud(rotate_xy_translate(rows, 0.7, 11.0));
    CHECK(std::abs(mle_dimension(moved_cloud, 15) - base_mle) < 1e-9);
    const auto phd = phd_dimension(moved_cloud, 40, 6, 3, 999);
    CHECK(std::abs(phd.dimension - base_phd.dimension) < 1e-9);
  }
}

TEST_CASE("phd dimension") {
  SUBCASE("2-cube") {
    const auto cloud = make_point_cloud(oracle::cube_cloud(1600, 2, 2, 106));
    const auto r = phd_dimension(cloud, 40, 8, 3, 1);
    CHECK(r.dimension > 1.6);
    CHECK(r.dimension < 2.4);
    CHECK(r.r2 > 0.9);
    CHECK(r.slope == doctest::Approx(1.0 - 1.0 / r.dimension).epsilon(1e-12));
  }
  SUBCASE("same seed is bit-identical, different seed is not forced to be") {
    const auto cloud = make_point_cloud(oracle::cube_cloud(400, 3, 3, 107));
    const auto a = phd_dimension(cloud, 40, 6, 3, 42);
    const auto b = phd_dimension(cloud, 40, 6, 3, 42);
    CHECK(a.dimension == b.dimension);
    CHECK(a.slope == b.slope);
    CHECK(a.r2 == b.r2);
  }
  SUBCASE("non-physical slope is an error") {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 100; ++i) rows.push_back({std::exp(1.0 * i)});
    const auto cloud = make_point_cloud(rows);
    CHECK_THROWS_WITH_AS(phd_dimension(cloud, 10, 6, 3, 0),
                         doctest::Contains("non-physical"),
                         std::runtime_error);
  }
  SUBCASE("needs n >= 2 * min_subset") {
    const auto cloud = make_point_cloud(oracle::cube_cloud(60, 2, 2, 108));
    CHECK_THROWS(phd_dimension(cloud, 40, 6, 3, 0));
  }
}

TEST_CASE("load_point_cloud") {
  SUBCASE("text format") {
    const auto path = temp_file("ok.txt", "2 3\n0 0 0\n1.5 2.5 3.5\n");
    const auto cloud = load_point_cloud(path);
    CHECK(cloud.n == 2);
    CHECK(cloud.d == 3);
    CHECK(cloud.point(1)[2] == 3.5);
  }
  SUBCASE("row with too few values") {
    const auto path = temp_file("short.txt", "2 3\n0 0 0\n1 2\n");
    CHECK_THROWS_WITH_AS(load_point_cloud(path), doctest::Contains("row 2"),
                         std::runtime_error);
  }
  SUBCASE("non-finite values named") {
    const auto path = temp_file("nan.txt", "2 2\n0 0\n1 nan\n");
    CHECK_THROWS_WITH_AS(load_point_cloud(path),
                         doctest::Contains("non-finite"), std::exception);
  }
  SUBCASE("trailing data is an error") {
    const auto path = temp_file("extra.txt", "2 2\n0 0\n1 1\n2 2\n");
    CHECK_THROWS(load_point_cloud(path));
  }
  SUBCASE("json format") {
    const auto path =
        temp_file("ok.json", R"({"points": [[0,0],[1,0],[0,1]]})");
    const auto cloud = load_point_cloud(path);
    CHECK(cloud.n == 3);
    CHECK(cloud.d == 2);
  }
  SUBCASE("missing file") {
    CHECK_THROWS(load_point_cloud("/nonexistent/cloud.txt"));
  }
}

TEST_CASE("intrinsic_dim_report combines both estimators") {
  const auto cloud = make_point_cloud(oracle::cube_cloud(400, 2, 2, 109));
  const auto report = intrinsic_dim_report(cloud, 15, 40, 6, 3, 3);
  CHECK(report.n_used == 400);
  CHECK(report.mle > 1.5);
  CHECK(report.mle < 2.5);
  CHECK(report.phd == doctest::Approx(1.0 / (1.0 - report.phd_slope)));
  CHECK(report.phd_r2 >= 0.0);
  CHECK(report.phd_r2 <= 1.0);
}
