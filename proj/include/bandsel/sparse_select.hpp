#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bandsel/hypercube.hpp"

namespace bandsel::sparse {

// Self-excluding dictionary for band i: the atoms are the columns of the
// shared sample matrix, with atom i treated as zero. The base is never copied
// or modified, so all B dictionaries of one run share a single matrix.
class Dictionary {
 public:
  Dictionary(std::shared_ptr<const BandMatrix> base, std::size_t excluded);

  std::size_t dim() const noexcept { return base_->rows(); }
  std::size_t atoms() const noexcept { return base_->cols(); }
  std::size_t excluded() const noexcept { return excluded_; }
  const std::shared_ptr<const BandMatrix>& base() const noexcept { return base_; }

  // Column j of the effective dictionary; all zeros for the excluded index.
  std::span<const double> atom(std::size_t j) const;

 private:
  std::shared_ptr<const BandMatrix> base_;
  std::size_t excluded_;
  std::vector<double> zero_atom_;
};

// Throws NotOvercomplete unless rows < cols.
Dictionary build_dictionary(std::shared_ptr<const BandMatrix> yhat, std::size_t i);

struct SparseCoefficients {
  std::vector<std::size_t> support;  // in selection order
  std::vector<double> coeffs;        // matches support
  double residual_norm = 0.0;
  // Residual norm before the first pick and after every iteration.
  std::vector<double> residual_path;
};

// Orthogonal Matching Pursuit. Each iteration picks the atom maximizing
// |<atom/||atom||, residual>| (lowest index on ties), refits least squares on
// the whole support with original-scale atoms, and updates the residual.
// Stops at k0 atoms, at residual <= tol, or when every remaining normalized
// correlation is numerically zero (<= 1e-12 * ||y||).
SparseCoefficients omp(const Dictionary& dict, std::span<const double> y, std::size_t k0,
                       double tol = 0.0);

// B x B matrix whose column i holds the coefficients representing band i.
class CoefficientMatrix {
 public:
  explicit CoefficientMatrix(std::size_t bands);

  std::size_t bands() const noexcept { return bands_; }
  double at(std::size_t row, std::size_t col) const { return values_[col * bands_ + row]; }
  void set(std::size_t row, std::size_t col, double v) { values_[col * bands_ + row] = v; }
  std::span<const double> column(std::size_t col) const {
    return {values_.data() + col * bands_, bands_};
  }

  friend bool operator==(const CoefficientMatrix&, const CoefficientMatrix&) = default;

 private:
  std::size_t bands_;
  std::vector<double> values_;
};

// |x| above this counts as a nonzero coefficient.
inline constexpr double kNonzeroThreshold = 1e-12;

CoefficientMatrix solve_all(const BandMatrix& yhat, std::size_t k0, double tol = 0.0);

enum class Weighting {
  // Fraction of band representations that use the band (nonzero count / B).
  count,
  // Row sums of |X|, divided by the largest row sum.
  abs_sum,
};

Weighting parse_weighting(const std::string& name);
const char* to_string(Weighting w);

struct BandWeights {
  std::vector<double> values;
};

BandWeights band_weights(const CoefficientMatrix& x, Weighting mode = Weighting::count);

// The n largest weights, descending; equal weights keep ascending band order.
std::vector<std::size_t> select_bands(const BandWeights& h, std::size_t n);

struct MdsrConfig {
  std::size_t n_pixels = 50;
  std::size_t k0 = 6;
  std::size_t n_select = 10;
  double tol = 0.0;
  Weighting weighting = Weighting::count;
  std::uint64_t seed = 0;
};

struct SelectionResult {
  std::string method = "mdsr";
  std::vector<std::size_t> selected;  // 0-based
  std::vector<double> weights;        // per band; empty for methods without weights
  std::size_t n_pixels = 0;
  std::size_t k0 = 0;
  std::uint64_t seed = 0;
  std::string weighting;
};

// Full-length weights for a cube: sample pixels, solve all dictionaries,
// weight. The ranking itself is select_bands(weights, B).
BandWeights mdsr_weights(const HyperCube& cube, const MdsrConfig& config);

SelectionResult mdsr_select(const HyperCube& cube, const MdsrConfig& config);

// {"method":..., "selected":[...], "weights":[...], "n_pixels":N, "k0":K,
//  "seed":S, "weighting":...}; indices are 0-based.
std::string to_json(const SelectionResult& result);
SelectionResult selection_from_json(const std::string& text);

}  // namespace bandsel::sparse
