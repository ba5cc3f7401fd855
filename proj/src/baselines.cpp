#include "bandsel/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bandsel/error.hpp"
#include "bandsel/parallel.hpp"
#include "bandsel/random.hpp"

namespace bandsel::baselines {

namespace {

void check_count(const BandMatrix& bm, std::size_t n, std::size_t min_n, const char* who) {
  if (n < min_n || n > bm.cols()) {
    throw InvalidArgument(std::string(who) + ": cannot select " + std::to_string(n) +
                          " of " + std::to_string(bm.cols()) + " bands" +
                          (min_n > 1 ? " (needs at least " + std::to_string(min_n) + ")"
                                     : std::string{}));
  }
}

// Design matrix whose columns are the selected bands, optionally preceded by
// a column of ones.
numerics::DenseMatrix design(const BandMatrix& bm, const std::vector<std::size_t>& cols,
                             bool intercept) {
  const std::size_t m = cols.size() + (intercept ? 1 : 0);
  numerics::DenseMatrix a(bm.rows(), m);
  for (std::size_t r = 0; r < bm.rows(); ++r) {
    std::size_t c = 0;
    if (intercept) a(r, c++) = 1.0;
    for (std::size_t b : cols) a(r, c++) = bm.at(r, b);
  }
  return a;
}

// Repeatedly adds the unselected band with the largest least-squares
// residual against the current selection. Lowest index wins ties.
void greedy_by_residual(const BandMatrix& bm, std::size_t n, bool intercept,
                        std::vector<std::size_t>& selected) {
  std::vector<bool> taken(bm.cols(), false);
  for (std::size_t b : selected) taken[b] = true;
  std::vector<double> score(bm.cols());
  while (selected.size() < n) {
    const numerics::LeastSquares solver(design(bm, selected, intercept));
    parallel_for(bm.cols(), [&](std::size_t b) {
      score[b] = taken[b] ? -1.0 : solver.residual_norm(bm.col(b));
    });
    std::size_t best = bm.cols();
    for (std::size_t b = 0; b < bm.cols(); ++b) {
      if (taken[b]) continue;
      if (best == bm.cols() || score[b] > score[best]) best = b;
    }
    taken[best] = true;
    selected.push_back(best);
  }
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "lp") return Method::lp;
  if (name == "osp") return Method::osp;
  if (name == "cluster") return Method::cluster;
  if (name == "pca") return Method::pca;
  throw InvalidArgument("unknown baseline '" + name + "'");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::lp: return "lp";
    case Method::osp: return "osp";
    case Method::cluster: return "cluster";
    case Method::pca: return "pca";
  }
  return "unknown";
}

numerics::DenseMatrix correlation_distance(const BandMatrix& bm) {
  const std::size_t bands = bm.cols();
  numerics::DenseMatrix d(bands, bands, 0.0);
  parallel_for(bands, [&](std::size_t i) {
    for (std::size_t j = 0; j < bands; ++j) {
      if (i == j) continue;
      double dist = 1.0;
      try {
        dist = 1.0 - std::abs(numerics::pearson(bm.col(i), bm.col(j)));
      } catch (const DegenerateInput&) {
      }
      d(i, j) = dist;
    }
  });
  return d;
}

std::vector<std::size_t> lp_select(const BandMatrix& bm, std::size_t n,
                                   const LpOptions& options) {
  check_count(bm, n, 2, "lp_select");
  std::vector<std::size_t> selected;
  if (options.init == LpInit::random) {
    Rng rng(options.seed);
    const std::size_t first = rng.uniform_index(bm.cols());
    std::size_t second = rng.uniform_index(bm.cols() - 1);
    if (second >= first) ++second;
    selected = {first, second};
  } else {
    const auto d = correlation_distance(bm);
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < bm.cols(); ++i)
      for (std::size_t j = i + 1; j < bm.cols(); ++j)
        if (d(i, j) > d(bi, bj)) {
          bi = i;
          bj = j;
        }
    selected = {bi, bj};
  }
  greedy_by_residual(bm, n, true, selected);
  return selected;
}

std::vector<std::size_t> osp_select(const BandMatrix& bm, std::size_t n) {
  check_count(bm, n, 1, "osp_select");
  std::size_t first = 0;
  double best = -1.0;
  for (std::size_t b = 0; b < bm.cols(); ++b) {
    const double len = numerics::norm2(bm.col(b));
    if (len > best) {
      best = len;
      first = b;
    }
  }
  std::vector<std::size_t> selected{first};
  greedy_by_residual(bm, n, false, selected);
  return selected;
}

std::vector<std::size_t> cluster_select(const BandMatrix& bm, std::size_t n,
                                        const ClusterOptions& options) {
  check_count(bm, n, 1, "cluster_select");
  const std::size_t bands = bm.cols();
  const auto dist = correlation_distance(bm);

  // Linkage distances between active clusters, indexed by slot. A cluster
  // lives in the slot of its lowest member.
  numerics::DenseMatrix link = dist;
  std::vector<std::vector<std::size_t>> members(bands);
  for (std::size_t i = 0; i < bands; ++i) members[i] = {i};
  std::vector<bool> active(bands, true);

  for (std::size_t clusters = bands; clusters > n; --clusters) {
    std::size_t ma = 0, mb = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < bands; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < bands; ++j) {
        if (active[j] && link(i, j) < best) {
          best = link(i, j);
          ma = i;
          mb = j;
        }
      }
    }
    const double sa = static_cast<double>(members[ma].size());
    const double sb = static_cast<double>(members[mb].size());
    for (std::size_t k = 0; k < bands; ++k) {
      if (!active[k] || k == ma || k == mb) continue;
      double merged = 0.0;
      switch (options.linkage) {
        case Linkage::single: merged = std::min(link(ma, k), link(mb, k)); break;
        case Linkage::complete: merged = std::max(link(ma, k), link(mb, k)); break;
        case Linkage::average:
          merged = (sa * link(ma, k) + sb * link(mb, k)) / (sa + sb);
          break;
      }
      link(ma, k) = merged;
      link(k, ma) = merged;
    }
    members[ma].insert(members[ma].end(), members[mb].begin(), members[mb].end());
    members[mb].clear();
    active[mb] = false;
  }

  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < bands; ++c) {
    if (!active[c]) continue;
    std::size_t rep = members[c].front();
    double rep_cost = std::numeric_limits<double>::infinity();
    for (std::size_t candidate : members[c]) {
      double cost = 0.0;
      for (std::size_t other : members[c]) cost += dist(candidate, other);
      if (cost < rep_cost || (cost == rep_cost && candidate < rep)) {
        rep_cost = cost;
        rep = candidate;
      }
    }
    out.push_back(rep);
  }
  std::sort(out.begin(), out.end());
  return out;
}

numerics::DenseMatrix PcaModel::project(const BandMatrix& bm) const {
  if (bm.cols() != mean.size()) throw InvalidArgument("pca: band count differs from model");
  numerics::DenseMatrix out(bm.rows(), components.size());
  std::vector<double> centered(bm.cols());
  for (std::size_t r = 0; r < bm.rows(); ++r) {
    for (std::size_t b = 0; b < bm.cols(); ++b) centered[b] = bm.at(r, b) - mean[b];
    for (std::size_t k = 0; k < components.size(); ++k) {
      out(r, k) = numerics::dot(centered, components[k].vector);
    }
  }
  return out;
}

std::vector<double> PcaModel::explained_variance_ratio() const {
  std::vector<double> out;
  for (const auto& c : components) {
    out.push_back(total_variance > 0 ? c.value / total_variance : 0.0);
  }
  return out;
}

PcaModel fit_pca(const BandMatrix& bm, std::size_t n) {
  if (n == 0 || n > bm.cols()) {
    throw InvalidArgument("pca: cannot extract " + std::to_string(n) + " components from " +
                          std::to_string(bm.cols()) + " bands");
  }
  if (bm.rows() < 2) throw InvalidArgument("pca: need at least 2 pixels");
  const std::size_t bands = bm.cols();
  const double rows = static_cast<double>(bm.rows());

  PcaModel model;
  model.mean.resize(bands);
  std::vector<std::vector<double>> centered(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    const auto col = bm.col(b);
    model.mean[b] = std::accumulate(col.begin(), col.end(), 0.0) / rows;
    centered[b].resize(col.size());
    for (std::size_t r = 0; r < col.size(); ++r) centered[b][r] = col[r] - model.mean[b];
  }
  numerics::DenseMatrix cov(bands, bands);
  parallel_for(bands, [&](std::size_t i) {
    for (std::size_t j = 0; j < bands; ++j) {
      cov(i, j) = numerics::dot(centered[i], centered[j]) / (rows - 1.0);
    }
  });
  for (std::size_t b = 0; b < bands; ++b) model.total_variance += cov(b, b);
  model.components = numerics::sym_eig(cov, n);
  return model;
}

numerics::DenseMatrix pca_extract(const BandMatrix& bm, std::size_t n) {
  return fit_pca(bm, n).project(bm);
}

std::vector<std::size_t> run_selector(const BandMatrix& bm, const BaselineConfig& config) {
  switch (config.method) {
    case Method::lp: return lp_select(bm, config.n_select);
    case Method::osp: return osp_select(bm, config.n_select);
    case Method::cluster: return cluster_select(bm, config.n_select);
    case Method::pca:
      throw InvalidArgument("pca is a feature transform, not a band selector");
  }
  throw InvalidArgument("unknown baseline");
}

}  // namespace bandsel::baselines
