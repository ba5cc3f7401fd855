#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandsel/hypercube.hpp"
#include "bandsel/numerics.hpp"
#include "bandsel/sparse_select.hpp"

namespace bandsel::eval {

struct LabeledSplit {
  std::vector<std::size_t> train_indices;  // pixel indices
  std::vector<std::size_t> test_indices;   // pixel indices, ascending
};

// Draws per_class training pixels from every labeled class, uniformly without
// replacement; every other labeled pixel is a test pixel. Throws
// InsufficientClassSamples for a class with <= per_class pixels.
LabeledSplit stratified_split(const GroundTruth& gt, std::size_t per_class,
                              std::uint64_t seed);

// Euclidean K-nearest-neighbour majority vote. Equal distances prefer the
// lower training row; a vote tie goes to whichever tied class has the nearest
// neighbour.
std::vector<int> knn_classify(const numerics::DenseMatrix& train_x,
                              std::span<const int> train_y,
                              const numerics::DenseMatrix& test_x, std::size_t k);

class ConfusionMatrix {
 public:
  // Rows are true classes, columns predicted, both over `classes` (ascending).
  ConfusionMatrix(std::vector<int> classes, std::vector<std::size_t> counts);
  static ConfusionMatrix from_labels(std::span<const int> truth,
                                     std::span<const int> predicted);

  std::size_t size() const noexcept { return classes_.size(); }
  const std::vector<int>& classes() const noexcept { return classes_; }
  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * size() + predicted];
  }
  std::size_t total() const;
  std::size_t trace() const;

 private:
  std::vector<int> classes_;
  std::vector<std::size_t> counts_;
};

double oca(const ConfusionMatrix& cm);
double kappa(const ConfusionMatrix& cm);

// Mean |pearson| over all unordered pairs of the given bands.
double avg_band_correlation(const BandMatrix& bm, std::span<const std::size_t> indices);

// |pearson| for every band pair of a cube, computed once so per-trial
// averages are cheap. NaN marks pairs involving a constant band.
class BandCorrelation {
 public:
  explicit BandCorrelation(const HyperCube& cube);
  double abs_pearson(std::size_t i, std::size_t j) const { return values_[i * bands_ + j]; }
  // Same contract as avg_band_correlation, including DegenerateInput.
  double average(std::span<const std::size_t> indices) const;

 private:
  std::size_t bands_;
  std::vector<double> values_;
};

enum class SelectorMethod { mdsr, lp, osp, cluster, pca, all_bands };

SelectorMethod parse_selector(const std::string& name);
const char* to_string(SelectorMethod m);

enum class BaselinePixels { sample, full };

struct SelectorConfig {
  SelectorMethod method = SelectorMethod::mdsr;
  std::size_t n_pixels = 50;
  std::size_t k0 = 6;
  double tol = 0.0;
  sparse::Weighting weighting = sparse::Weighting::count;
  // Pixels the baselines (lp/osp/cluster/pca fitting) see: the same N-pixel
  // sample as mdsr, or the whole image.
  BaselinePixels baseline_pixels = BaselinePixels::sample;
};

struct ClassifierConfig {
  std::size_t k = 6;
  std::size_t per_class = 20;
};

struct TrialResult {
  std::size_t n_select = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double oca = 0.0;
  double kappa = 0.0;
  std::optional<double> avg_band_correlation;  // absent for pca or constant bands
  std::vector<std::size_t> selected;           // empty for pca
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

struct Aggregate {
  std::size_t n_select = 0;
  double mean_oca = 0.0;
  double std_oca = 0.0;
  double mean_kappa = 0.0;
  double std_kappa = 0.0;
  std::optional<double> mean_avg_band_correlation;
};

struct EvaluationReport {
  std::string method;
  SelectorConfig selector;
  ClassifierConfig classifier;
  std::vector<std::size_t> n_select_grid;
  std::size_t trials = 0;
  std::uint64_t base_seed = 0;
  std::vector<TrialResult> trial_results;  // ordered by (n_select grid order, trial)
  std::vector<Aggregate> aggregates;       // one per grid entry
};

// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_std(std::span<const double> values);

// For each trial t the selector runs with seed base_seed + t, the split uses
// the same seed, and every grid entry is scored on that split. Fully
// deterministic for a given base_seed; trials may run concurrently.
EvaluationReport run_trials(const HyperCube& cube, const GroundTruth& gt,
                            const SelectorConfig& selector,
                            std::span<const std::size_t> n_select_grid,
                            const ClassifierConfig& classifier, std::size_t trials,
                            std::uint64_t base_seed);

struct PredictionScore {
  ConfusionMatrix confusion;
  double oca;
  double kappa;
};

// predictions[i] is the label predicted for split.test_indices[i].
PredictionScore evaluate_predictions(const GroundTruth& gt, const LabeledSplit& split,
                                     std::span<const int> predictions);

// Reads CSV `test_pixel_index,predicted_label` and orders it to match
// split.test_indices. Every test pixel must appear exactly once.
std::vector<int> load_predictions_csv(const std::filesystem::path& path,
                                      const LabeledSplit& split);

std::string report_to_json(const EvaluationReport& report);

// Per-trial rows: method,n_select,trial,oca,kappa,n_pixels,k0,avg_band_correlation
std::string report_csv_header();
std::string report_csv_rows(const EvaluationReport& report);

// Per-aggregate rows:
// method,n_select,n_pixels,k0,mean_oca,std_oca,mean_kappa,std_kappa,mean_avg_band_correlation
std::string aggregate_csv_header();
std::string aggregate_csv_rows(const EvaluationReport& report);

}  // namespace bandsel::eval
