#include "bandsel/sparse_select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "bandsel/error.hpp"
#include "bandsel/numerics.hpp"
#include "bandsel/parallel.hpp"

namespace bandsel::sparse {

namespace {

// Normalized correlations at or below this fraction of ||y|| are treated as
// zero; an exact fit leaves only rounding noise in the residual.
constexpr double kCorrelationFloor = 1e-12;

}  // namespace

Dictionary::Dictionary(std::shared_ptr<const BandMatrix> base, std::size_t excluded)
    : base_(std::move(base)), excluded_(excluded) {
  if (!base_) throw InvalidArgument("dictionary base is null");
  if (excluded_ >= base_->cols()) {
    throw InvalidArgument("excluded band " + std::to_string(excluded_) +
                          " out of range [0, " + std::to_string(base_->cols()) + ")");
  }
  zero_atom_.assign(base_->rows(), 0.0);
}

std::span<const double> Dictionary::atom(std::size_t j) const {
  if (j >= atoms()) throw InvalidArgument("atom index out of range");
  if (j == excluded_) return zero_atom_;
  return base_->col(j);
}

Dictionary build_dictionary(std::shared_ptr<const BandMatrix> yhat, std::size_t i) {
  if (!yhat) throw InvalidArgument("dictionary base is null");
  if (yhat->rows() >= yhat->cols()) {
    throw NotOvercomplete("dictionary needs fewer sampled pixels than bands (N = " +
                          std::to_string(yhat->rows()) +
                          ", B = " + std::to_string(yhat->cols()) + ")");
  }
  return Dictionary(std::move(yhat), i);
}

SparseCoefficients omp(const Dictionary& dict, std::span<const double> y, std::size_t k0,
                       double tol) {
  if (k0 == 0) throw InvalidArgument("omp: sparsity level must be positive");
  if (tol < 0 || !std::isfinite(tol)) throw InvalidArgument("omp: tol must be finite and >= 0");
  if (y.size() != dict.dim()) throw InvalidArgument("omp: signal length differs from atom length");
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidArgument("omp: signal has non-finite entries");
  }

  const std::size_t n = dict.dim();
  const std::size_t atoms = dict.atoms();
  std::vector<double> inv_norm(atoms, 0.0);
  for (std::size_t j = 0; j < atoms; ++j) {
    const double len = numerics::norm2(dict.atom(j));
    if (!std::isfinite(len)) throw InvalidArgument("omp: dictionary has non-finite entries");
    inv_norm[j] = len > 0 ? 1.0 / len : 0.0;
  }

  SparseCoefficients out;
  std::vector<double> residual(y.begin(), y.end());
  const double y_norm = numerics::norm2(y);
  out.residual_norm = y_norm;
  out.residual_path.push_back(y_norm);
  if (y_norm == 0.0 || y_norm <= tol) return out;

  std::vector<bool> used(atoms, false);
  while (out.support.size() < k0) {
    std::size_t best = atoms;
    double best_corr = kCorrelationFloor * y_norm;
    for (std::size_t j = 0; j < atoms; ++j) {
      if (used[j] || inv_norm[j] == 0.0) continue;
      const double corr = std::abs(numerics::dot(dict.atom(j), residual)) * inv_norm[j];
      if (corr > best_corr) {
        best_corr = corr;
        best = j;
      }
    }
    if (best == atoms) break;

    used[best] = true;
    out.support.push_back(best);

    const std::size_t m = out.support.size();
    std::vector<double> sub(n * m);
    for (std::size_t c = 0; c < m; ++c) {
      const auto a = dict.atom(out.support[c]);
      for (std::size_t r = 0; r < n; ++r) sub[r * m + c] = a[r];
    }
    const numerics::DenseMatrix a(n, m, std::move(sub));
    out.coeffs = numerics::least_squares(a, y);

    const auto fit = numerics::multiply(a, out.coeffs);
    for (std::size_t r = 0; r < n; ++r) residual[r] = y[r] - fit[r];
    out.residual_norm = numerics::norm2(residual);
    out.residual_path.push_back(out.residual_norm);
    if (out.residual_norm <= tol) break;
  }
  return out;
}

CoefficientMatrix::CoefficientMatrix(std::size_t bands)
    : bands_(bands), values_(bands * bands, 0.0) {}

CoefficientMatrix solve_all(const BandMatrix& yhat, std::size_t k0, double tol) {
  auto base = std::make_shared<const BandMatrix>(yhat);
  const std::size_t bands = base->cols();
  // Validates overcompleteness once, before any work is scheduled.
  build_dictionary(base, 0);

  CoefficientMatrix x(bands);
  parallel_for(bands, [&](std::size_t i) {
    const Dictionary dict = build_dictionary(base, i);
    const SparseCoefficients alpha = omp(dict, base->col(i), k0, tol);
    for (std::size_t k = 0; k < alpha.support.size(); ++k) {
      x.set(alpha.support[k], i, alpha.coeffs[k]);
    }
  });
  return x;
}

Weighting parse_weighting(const std::string& name) {
  if (name == "count") return Weighting::count;
  if (name == "abs_sum") return Weighting::abs_sum;
  throw InvalidArgument("unknown weighting mode '" + name + "' (count | abs_sum)");
}

const char* to_string(Weighting w) { return w == Weighting::count ? "count" : "abs_sum"; }

BandWeights band_weights(const CoefficientMatrix& x, Weighting mode) {
  const std::size_t bands = x.bands();
  BandWeights h{std::vector<double>(bands, 0.0)};
  for (std::size_t col = 0; col < bands; ++col) {
    const auto c = x.column(col);
    for (std::size_t row = 0; row < bands; ++row) {
      if (mode == Weighting::count) {
        if (std::abs(c[row]) > kNonzeroThreshold) h.values[row] += 1.0;
      } else {
        h.values[row] += std::abs(c[row]);
      }
    }
  }
  if (mode == Weighting::count) {
    for (double& v : h.values) v /= static_cast<double>(bands);
  } else {
    const double top = *std::max_element(h.values.begin(), h.values.end());
    if (top > 0) {
      for (double& v : h.values) v /= top;
    }
  }
  return h;
}

std::vector<std::size_t> select_bands(const BandWeights& h, std::size_t n) {
  const std::size_t bands = h.values.size();
  if (n == 0 || n > bands) {
    throw InvalidArgument("cannot select " + std::to_string(n) + " of " +
                          std::to_string(bands) + " bands");
  }
  std::vector<std::size_t> order(bands);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return h.values[a] > h.values[b];
  });
  order.resize(n);
  return order;
}

BandWeights mdsr_weights(const HyperCube& cube, const MdsrConfig& config) {
  if (config.n_pixels >= cube.bands()) {
    throw NotOvercomplete("sampled pixel count N = " + std::to_string(config.n_pixels) +
                          " must be less than the band count B = " +
                          std::to_string(cube.bands()));
  }
  const auto pixels = sample_pixel_indices(cube.pixels(), config.n_pixels, config.seed);
  const BandMatrix yhat = gather_pixels(cube, pixels);
  return band_weights(solve_all(yhat, config.k0, config.tol), config.weighting);
}

SelectionResult mdsr_select(const HyperCube& cube, const MdsrConfig& config) {
  if (config.n_select == 0 || config.n_select > cube.bands()) {
    throw InvalidArgument("cannot select " + std::to_string(config.n_select) + " of " +
                          std::to_string(cube.bands()) + " bands");
  }
  BandWeights h = mdsr_weights(cube, config);
  SelectionResult result;
  result.selected = select_bands(h, config.n_select);
  result.weights = std::move(h.values);
  result.n_pixels = config.n_pixels;
  result.k0 = config.k0;
  result.seed = config.seed;
  result.weighting = to_string(config.weighting);
  return result;
}

std::string to_json(const SelectionResult& result) {
  nlohmann::ordered_json j;
  j["method"] = result.method;
  j["index_base"] = 0;
  j["selected"] = result.selected;
  j["weights"] = result.weights;
  j["n_pixels"] = result.n_pixels;
  j["k0"] = result.k0;
  j["seed"] = result.seed;
  j["weighting"] = result.weighting;
  return j.dump(2) + "\n";
}

SelectionResult selection_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SelectionResult r;
    r.method = j.value("method", std::string{"mdsr"});
    r.selected = j.at("selected").get<std::vector<std::size_t>>();
    r.weights = j.value("weights", std::vector<double>{});
    r.n_pixels = j.value("n_pixels", std::size_t{0});
    r.k0 = j.value("k0", std::size_t{0});
    r.seed = j.value("seed", std::uint64_t{0});
    r.weighting = j.value("weighting", std::string{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFile(std::string("bad selection JSON: ") + e.what());
  }
}

}  // namespace bandsel::sparse
