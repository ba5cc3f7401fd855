#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "bandsel/baselines.hpp"
#include "bandsel/error.hpp"
#include "test_util.hpp"

namespace bandsel::baselines {
namespace {

using testing::gaussian_bands;
using testing::gaussian_vector;

bool is_permutation_of_range(std::vector<std::size_t> v, std::size_t n) {
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != i) return false;
  return v.size() == n;
}

std::vector<double> centered(std::vector<double> v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
  return v;
}

TEST(Lp, FullSelectionIsPermutation) {
  std::mt19937_64 gen(1);
  const BandMatrix bm = gaussian_bands(gen, 20, 7);
  EXPECT_TRUE(is_permutation_of_range(lp_select(bm, 7), 7));
}

TEST(Lp, ExactLinearCombinationIsSkipped) {
  // b0 and b1 are orthogonal and zero-mean, b2 = b0 + b1, b3 mostly b0 plus
  // independent noise.
  const std::vector<double> b0{1, -1, 1, -1, 0, 0};
  const std::vector<double> b1{1, 1, -1, -1, 0, 0};
  std::vector<double> b2(6), b3(6);
  const std::vector<double> noise{0.1, 0.3, -0.2, 0.05, 0.4, -0.35};
  for (int i = 0; i < 6; ++i) {
    b2[i] = b0[i] + b1[i];
    b3[i] = 0.8 * b0[i] + noise[i];
  }
  const BandMatrix bm = BandMatrix::from_columns({b0, b1, b2, b3});
  const auto sel = lp_select(bm, 3);
  ASSERT_EQ(sel.size(), 3u);
  EXPECT_EQ(std::set<std::size_t>(sel.begin(), sel.begin() + 2), (std::set<std::size_t>{0, 1}));
  EXPECT_EQ(sel[2], 3u);
}

TEST(Lp, InitialPairAvoidsIdenticalBands) {
  std::mt19937_64 gen(2);
  const auto a = gaussian_vector(gen, 15);
  const auto c = gaussian_vector(gen, 15);
  const BandMatrix bm = BandMatrix::from_columns({a, a, c});
  const auto sel = lp_select(bm, 2);
  EXPECT_EQ(std::count(sel.begin(), sel.end(), 2u), 1);
}

TEST(Lp, RandomInitIsSeeded) {
  std::mt19937_64 gen(3);
  const BandMatrix bm = gaussian_bands(gen, 12, 8);
  LpOptions opt{LpInit::random, 17};
  const auto a = lp_select(bm, 4, opt);
  EXPECT_EQ(a, lp_select(bm, 4, opt));
  EXPECT_NE(a[0], a[1]);
}

TEST(Lp, Errors) {
  std::mt19937_64 gen(4);
  const BandMatrix bm = gaussian_bands(gen, 5, 4);
  EXPECT_THROW(lp_select(bm, 1), InvalidArgument);
  EXPECT_THROW(lp_select(bm, 5), InvalidArgument);
}

TEST(Osp, OrthogonalBandsComeOutByNorm) {
  // Orthogonal columns with norms 1, 3, 2, 4.
  const BandMatrix bm = BandMatrix::from_columns(
      {{1, 0, 0, 0}, {0, 3, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, 4}});
  EXPECT_EQ(osp_select(bm, 4), (std::vector<std::size_t>{3, 1, 2, 0}));
  EXPECT_EQ(osp_select(bm, 1), (std::vector<std::size_t>{3}));
}

TEST(Osp, DuplicateIsSelectedLast) {
  std::mt19937_64 gen(5);
  auto b0 = gaussian_vector(gen, 10);
  for (double& v : b0) v *= 5.0;
  const BandMatrix bm =
      BandMatrix::from_columns({b0, gaussian_vector(gen, 10), b0, gaussian_vector(gen, 10)});
  const auto sel = osp_select(bm, 4);
  EXPECT_EQ(sel.front(), 0u);
  EXPECT_EQ(sel.back(), 2u);
  EXPECT_THROW(osp_select(bm, 0), InvalidArgument);
}

TEST(Cluster, FullAndSingleCluster) {
  std::mt19937_64 gen(6);
  const BandMatrix bm = gaussian_bands(gen, 25, 6);
  EXPECT_EQ(cluster_select(bm, 6), (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));

  const auto d = correlation_distance(bm);
  std::size_t medoid = 0;
  double best = 1e300;
  for (std::size_t i = 0; i < 6; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < 6; ++j) s += d(i, j);
    if (s < best) {
      best = s;
      medoid = i;
    }
  }
  EXPECT_EQ(cluster_select(bm, 1), (std::vector<std::size_t>{medoid}));
}

TEST(Cluster, OnePerTightGroup) {
  std::mt19937_64 gen(7);
  const auto g1 = gaussian_vector(gen, 40);
  const auto g2 = gaussian_vector(gen, 40);
  std::normal_distribution<double> small(0, 0.01);
  std::vector<std::vector<double>> cols;
  std::vector<int> group;
  for (int k = 0; k < 8; ++k) {
    const auto& src = k % 2 ? g2 : g1;
    std::vector<double> c(40);
    for (int i = 0; i < 40; ++i) c[i] = src[i] + small(gen);
    cols.push_back(c);
    group.push_back(k % 2);
  }
  const BandMatrix bm = BandMatrix::from_columns(cols);
  const auto sel = cluster_select(bm, 2);
  ASSERT_EQ(sel.size(), 2u);
  EXPECT_NE(group[sel[0]], group[sel[1]]);
}

TEST(Cluster, ConstantBandIsFarFromEverything) {
  std::mt19937_64 gen(8);
  const auto a = gaussian_vector(gen, 10);
  const BandMatrix bm = BandMatrix::from_columns({a, std::vector<double>(10, 3.0), a});
  const auto d = correlation_distance(bm);
  EXPECT_EQ(d(0, 1), 1.0);
  EXPECT_EQ(d(1, 2), 1.0);
  EXPECT_NEAR(d(0, 2), 0.0, 1e-12);
  EXPECT_EQ(cluster_select(bm, 2), (std::vector<std::size_t>{0, 1}));
}

TEST(Cluster, LinkageVariantsReturnValidSelections) {
  std::mt19937_64 gen(9);
  const BandMatrix bm = gaussian_bands(gen, 30, 10);
  for (auto linkage : {Linkage::single, Linkage::complete, Linkage::average}) {
    const auto sel = cluster_select(bm, 4, {linkage});
    EXPECT_EQ(sel.size(), 4u);
    EXPECT_TRUE(std::is_sorted(sel.begin(), sel.end()));
    EXPECT_EQ(std::set<std::size_t>(sel.begin(), sel.end()).size(), 4u);
  }
}

TEST(Pca, IsotropicHadamardData) {
  // Rows of a 4x4 Hadamard matrix, mirrored: zero mean, covariance = c * I.
  const std::vector<std::vector<double>> h{
      {1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}};
  std::vector<std::vector<double>> cols(4, std::vector<double>(8));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cols[c][r] = h[r][c];
      cols[c][r + 4] = -h[r][c];
    }
  const PcaModel m = fit_pca(BandMatrix::from_columns(cols), 4);
  for (double ratio : m.explained_variance_ratio()) EXPECT_NEAR(ratio, 0.25, 1e-12);
}

TEST(Pca, RankOneData) {
  std::mt19937_64 gen(10);
  const auto base = gaussian_vector(gen, 30);
  std::vector<std::vector<double>> cols;
  for (double s : {1.0, -2.0, 0.5, 3.0}) {
    std::vector<double> c(30);
    for (int i = 0; i < 30; ++i) c[i] = s * base[i] + 7.0;
    cols.push_back(c);
  }
  const PcaModel m = fit_pca(BandMatrix::from_columns(cols), 2);
  EXPECT_NEAR(m.components[0].value, m.total_variance, 1e-8 * m.total_variance);
  EXPECT_NEAR(m.components[1].value, 0.0, 1e-8 * m.total_variance);
}

TEST(Pca, FullBasisReconstructsCenteredData) {
  std::mt19937_64 gen(11);
  const BandMatrix bm = gaussian_bands(gen, 25, 5);
  const PcaModel m = fit_pca(bm, 5);
  const auto proj = m.project(bm);
  for (std::size_t r = 0; r < 25; ++r)
    for (std::size_t b = 0; b < 5; ++b) {
      double acc = 0;
      for (std::size_t k = 0; k < 5; ++k) acc += proj(r, k) * m.components[k].vector[b];
      EXPECT_NEAR(acc, bm.at(r, b) - m.mean[b], 1e-6);
    }
}

TEST(Pca, ProjectedColumnsAreUncorrelated) {
  std::mt19937_64 gen(12);
  const BandMatrix raw = gaussian_bands(gen, 50, 6);
  std::vector<std::vector<double>> cols;
  for (std::size_t b = 0; b < 6; ++b) {
    std::vector<double> c(50);
    for (std::size_t r = 0; r < 50; ++r) c[r] = raw.at(r, b) + 0.7 * raw.at(r, 0);
    cols.push_back(c);
  }
  const auto proj = pca_extract(BandMatrix::from_columns(cols), 6);
  std::vector<std::vector<double>> pc(6, std::vector<double>(50));
  for (std::size_t r = 0; r < 50; ++r)
    for (std::size_t k = 0; k < 6; ++k) pc[k][r] = proj(r, k);
  for (auto& c : pc) c = centered(c);
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a + 1; b < 6; ++b) {
      const double scale = numerics::norm2(pc[a]) * numerics::norm2(pc[b]);
      EXPECT_LE(std::abs(numerics::dot(pc[a], pc[b])), 1e-6 * scale);
    }
}

TEST(Pca, Errors) {
  std::mt19937_64 gen(13);
  const BandMatrix bm = gaussian_bands(gen, 5, 3);
  EXPECT_THROW(fit_pca(bm, 4), InvalidArgument);
  EXPECT_THROW(fit_pca(bm, 0), InvalidArgument);
  EXPECT_THROW(fit_pca(gaussian_bands(gen, 1, 3), 1), InvalidArgument);
  EXPECT_THROW(fit_pca(bm, 2).project(gaussian_bands(gen, 5, 4)), InvalidArgument);
}

TEST(Baselines, PropertyValidIndicesAndScaleInvariance) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    std::mt19937_64 gen(seed);
    const std::size_t b = 4 + seed % 9;
    const BandMatrix bm = gaussian_bands(gen, 15, b);
    const std::size_t n = 2 + seed % (b - 1);
    for (auto method : {Method::lp, Method::osp, Method::cluster}) {
      const auto sel = run_selector(bm, {method, n, seed});
      EXPECT_EQ(sel.size(), n);
      EXPECT_EQ(std::set<std::size_t>(sel.begin(), sel.end()).size(), n);
      for (std::size_t s : sel) EXPECT_LT(s, b);
    }
    const BandMatrix scaled = bm.scaled(4.2);
    EXPECT_EQ(lp_select(bm, n), lp_select(scaled, n));
    EXPECT_EQ(osp_select(bm, n), osp_select(scaled, n));
  }
  std::mt19937_64 gen(0);
  EXPECT_THROW(run_selector(gaussian_bands(gen, 5, 3), {Method::pca, 2, 0}), InvalidArgument);
  EXPECT_EQ(parse_method("osp"), Method::osp);
  EXPECT_THROW(parse_method("svm"), InvalidArgument);
}

}  // namespace
}  // namespace bandsel::baselines
