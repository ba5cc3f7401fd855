#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bandsel/hypercube.hpp"
#include "bandsel/numerics.hpp"

namespace bandsel::baselines {

enum class Method { lp, osp, cluster, pca };

Method parse_method(const std::string& name);
const char* to_string(Method m);

struct BaselineConfig {
  Method method = Method::lp;
  std::size_t n_select = 10;
  std::uint64_t seed = 0;
};

enum class LpInit {
  // The pair with the largest 1 - |pearson|; ties take the lowest (i, j).
  max_dissimilarity,
  // Two distinct bands drawn from the seed.
  random,
};

struct LpOptions {
  LpInit init = LpInit::max_dissimilarity;
  std::uint64_t seed = 0;
};

// Linear-prediction selection. After the initial pair, each step fits every
// unselected band as an affine combination of the selected ones and adds the
// band with the largest residual norm. Returns bands in selection order.
std::vector<std::size_t> lp_select(const BandMatrix& bm, std::size_t n,
                                   const LpOptions& options = {});

// Orthogonal-subspace-projection selection. Starts from the band of largest
// L2 norm, then adds the band with the largest component orthogonal to the
// span of the selected bands. Returns bands in selection order.
std::vector<std::size_t> osp_select(const BandMatrix& bm, std::size_t n);

enum class Linkage { single, complete, average };

struct ClusterOptions {
  Linkage linkage = Linkage::average;
};

// Pairwise band distance 1 - |pearson|. A constant band is at distance 1 from
// every other band.
numerics::DenseMatrix correlation_distance(const BandMatrix& bm);

// Agglomerative clustering of bands under correlation distance, cut at n
// clusters; each cluster contributes the member with the smallest summed
// distance to its co-members. Returned ascending by band index.
std::vector<std::size_t> cluster_select(const BandMatrix& bm, std::size_t n,
                                        const ClusterOptions& options = {});

struct PcaModel {
  std::vector<double> mean;                 // per band
  std::vector<numerics::EigenPair> components;  // descending eigenvalue
  double total_variance = 0.0;              // trace of the covariance

  numerics::DenseMatrix project(const BandMatrix& bm) const;
  std::vector<double> explained_variance_ratio() const;
};

// Band covariance uses the unbiased (rows - 1) denominator.
PcaModel fit_pca(const BandMatrix& bm, std::size_t n);

// Projections of bm's own pixels onto its top-n principal components.
numerics::DenseMatrix pca_extract(const BandMatrix& bm, std::size_t n);

// Dispatch for the three selection methods (pca is a transform, not a
// selection, and is rejected here).
std::vector<std::size_t> run_selector(const BandMatrix& bm, const BaselineConfig& config);

}  // namespace bandsel::baselines
