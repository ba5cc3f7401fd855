#include "bandsel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "bandsel/baselines.hpp"
#include "bandsel/error.hpp"
#include "bandsel/parallel.hpp"
#include "bandsel/random.hpp"

namespace bandsel::eval {

LabeledSplit stratified_split(const GroundTruth& gt, std::size_t per_class,
                              std::uint64_t seed) {
  if (per_class == 0) throw InvalidArgument("per_class must be positive");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t p = 0; p < gt.pixels(); ++p) {
    if (gt.label(p) != 0) by_class[gt.label(p)].push_back(p);
  }
  if (by_class.empty()) throw InvalidArgument("ground truth has no labeled pixels");
  for (const auto& [label, pixels] : by_class) {
    if (pixels.size() <= per_class) {
      throw InsufficientClassSamples(
          label, "class " + std::to_string(label) + " has " + std::to_string(pixels.size()) +
                     " labeled pixels; need more than " + std::to_string(per_class));
    }
  }

  Rng rng(seed);
  LabeledSplit split;
  std::vector<bool> is_train(gt.pixels(), false);
  for (const auto& [label, pixels] : by_class) {
    for (std::size_t k : sample_without_replacement(pixels.size(), per_class, rng)) {
      split.train_indices.push_back(pixels[k]);
      is_train[pixels[k]] = true;
    }
  }
  for (std::size_t p = 0; p < gt.pixels(); ++p) {
    if (gt.label(p) != 0 && !is_train[p]) split.test_indices.push_back(p);
  }
  return split;
}

std::vector<int> knn_classify(const numerics::DenseMatrix& train_x,
                              std::span<const int> train_y,
                              const numerics::DenseMatrix& test_x, std::size_t k) {
  if (train_x.rows() == 0) throw InvalidArgument("knn: empty training set");
  if (train_y.size() != train_x.rows()) throw InvalidArgument("knn: label count differs from training rows");
  if (k == 0 || k > train_x.rows()) {
    throw InvalidArgument("knn: K = " + std::to_string(k) + " must be in [1, " +
                          std::to_string(train_x.rows()) + "]");
  }
  if (test_x.rows() > 0 && test_x.cols() != train_x.cols()) {
    throw InvalidArgument("knn: feature dimensions differ");
  }

  const std::size_t n_train = train_x.rows();
  const std::size_t dims = train_x.cols();
  std::vector<int> out(test_x.rows());
  parallel_for(test_x.rows(), [&](std::size_t t) {
    const auto q = test_x.row(t);
    std::vector<std::pair<double, std::size_t>> dist(n_train);
    for (std::size_t i = 0; i < n_train; ++i) {
      const auto r = train_x.row(i);
      double d = 0.0;
      for (std::size_t c = 0; c < dims; ++c) {
        const double diff = q[c] - r[c];
        d += diff * diff;
      }
      dist[i] = {d, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    std::map<int, std::size_t> votes;
    for (std::size_t i = 0; i < k; ++i) ++votes[train_y[dist[i].second]];
    std::size_t top = 0;
    for (const auto& [label, count] : votes) top = std::max(top, count);
    // Neighbours are sorted nearest first, so the first one from a tied class
    // decides.
    for (std::size_t i = 0; i < k; ++i) {
      const int label = train_y[dist[i].second];
      if (votes[label] == top) {
        out[t] = label;
        break;
      }
    }
  });
  return out;
}

ConfusionMatrix::ConfusionMatrix(std::vector<int> classes, std::vector<std::size_t> counts)
    : classes_(std::move(classes)), counts_(std::move(counts)) {
  if (counts_.size() != classes_.size() * classes_.size()) {
    throw InvalidArgument("confusion matrix counts do not match its class list");
  }
}

ConfusionMatrix ConfusionMatrix::from_labels(std::span<const int> truth,
                                             std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw InvalidArgument("confusion matrix: truth and prediction lengths differ");
  }
  std::set<int> labels(truth.begin(), truth.end());
  labels.insert(predicted.begin(), predicted.end());
  std::vector<int> classes(labels.begin(), labels.end());
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = i;
  std::vector<std::size_t> counts(classes.size() * classes.size(), 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++counts[index[truth[i]] * classes.size() + index[predicted[i]]];
  }
  return ConfusionMatrix(std::move(classes), std::move(counts));
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < size(); ++i) t += at(i, i);
  return t;
}

double oca(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw InvalidArgument("oca: empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

double kappa(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw InvalidArgument("kappa: empty confusion matrix");
  const double n = static_cast<double>(total);
  const double p_o = static_cast<double>(cm.trace()) / n;
  double p_e = 0.0;
  for (std::size_t i = 0; i < cm.size(); ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < cm.size(); ++j) {
      row += static_cast<double>(cm.at(i, j));
      col += static_cast<double>(cm.at(j, i));
    }
    p_e += row * col;
  }
  p_e /= n * n;
  if (p_e >= 1.0) return p_o >= 1.0 ? 1.0 : 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

double avg_band_correlation(const BandMatrix& bm, std::span<const std::size_t> indices) {
  if (indices.size() < 2) throw InvalidArgument("avg_band_correlation: need at least 2 bands");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < indices.size(); ++a)
    for (std::size_t b = a + 1; b < indices.size(); ++b) {
      sum += std::abs(numerics::pearson(bm.col(indices[a]), bm.col(indices[b])));
      ++pairs;
    }
  return sum / static_cast<double>(pairs);
}

BandCorrelation::BandCorrelation(const HyperCube& cube)
    : bands_(cube.bands()), values_(cube.bands() * cube.bands(), 0.0) {
  const std::size_t n = cube.pixels();
  std::vector<std::vector<double>> centered(bands_);
  std::vector<double> scale(bands_);
  for (std::size_t b = 0; b < bands_; ++b) {
    const auto band = cube.band(b);
    const double mean = std::accumulate(band.begin(), band.end(), 0.0) / static_cast<double>(n);
    centered[b].resize(n);
    double ss = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      centered[b][p] = band[p] - mean;
      ss += centered[b][p] * centered[b][p];
    }
    scale[b] = std::sqrt(ss);
  }
  parallel_for(bands_, [&](std::size_t i) {
    for (std::size_t j = 0; j < bands_; ++j) {
      double v;
      if (scale[i] == 0.0 || scale[j] == 0.0) {
        v = std::numeric_limits<double>::quiet_NaN();
      } else if (i == j) {
        v = 1.0;
      } else {
        const std::size_t lo = std::min(i, j), hi = std::max(i, j);
        v = std::min(1.0, std::abs(numerics::dot(centered[lo], centered[hi])) /
                              (scale[lo] * scale[hi]));
      }
      values_[i * bands_ + j] = v;
    }
  });
}

double BandCorrelation::average(std::span<const std::size_t> indices) const {
  if (indices.size() < 2) throw InvalidArgument("avg_band_correlation: need at least 2 bands");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < indices.size(); ++a)
    for (std::size_t b = a + 1; b < indices.size(); ++b) {
      const double v = abs_pearson(indices[a], indices[b]);
      if (std::isnan(v)) throw DegenerateInput("avg_band_correlation: constant band selected");
      sum += v;
      ++pairs;
    }
  return sum / static_cast<double>(pairs);
}

SelectorMethod parse_selector(const std::string& name) {
  if (name == "mdsr") return SelectorMethod::mdsr;
  if (name == "lp") return SelectorMethod::lp;
  if (name == "osp") return SelectorMethod::osp;
  if (name == "cluster") return SelectorMethod::cluster;
  if (name == "pca") return SelectorMethod::pca;
  if (name == "all" || name == "all_bands") return SelectorMethod::all_bands;
  throw InvalidArgument("unknown method '" + name + "' (mdsr | lp | osp | cluster | pca | all)");
}

const char* to_string(SelectorMethod m) {
  switch (m) {
    case SelectorMethod::mdsr: return "mdsr";
    case SelectorMethod::lp: return "lp";
    case SelectorMethod::osp: return "osp";
    case SelectorMethod::cluster: return "cluster";
    case SelectorMethod::pca: return "pca";
    case SelectorMethod::all_bands: return "all";
  }
  return "unknown";
}

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

namespace {

numerics::DenseMatrix feature_rows(const BandMatrix& labeled,
                                   const std::vector<std::size_t>& rows,
                                   const std::vector<std::size_t>& bands) {
  numerics::DenseMatrix out(rows.size(), bands.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < bands.size(); ++c) out(r, c) = labeled.at(rows[r], bands[c]);
  return out;
}

numerics::DenseMatrix take_rows(const numerics::DenseMatrix& m,
                                const std::vector<std::size_t>& rows, std::size_t cols) {
  numerics::DenseMatrix out(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = m(rows[r], c);
  return out;
}

}  // namespace

EvaluationReport run_trials(const HyperCube& cube, const GroundTruth& gt,
                            const SelectorConfig& selector,
                            std::span<const std::size_t> n_select_grid,
                            const ClassifierConfig& classifier, std::size_t trials,
                            std::uint64_t base_seed) {
  const std::size_t bands = cube.bands();
  if (gt.width() != cube.width() || gt.height() != cube.height()) {
    throw InvalidArgument("ground truth grid does not match the cube");
  }
  if (trials == 0) throw InvalidArgument("trials must be positive");

  std::vector<std::size_t> grid(n_select_grid.begin(), n_select_grid.end());
  if (selector.method == SelectorMethod::all_bands) grid = {bands};
  if (grid.empty()) throw InvalidArgument("n_select grid is empty");
  for (std::size_t n : grid) {
    if (n == 0 || n > bands) {
      throw InvalidArgument("n_select " + std::to_string(n) + " outside [1, " +
                            std::to_string(bands) + "]");
    }
  }
  const std::size_t max_n = *std::max_element(grid.begin(), grid.end());
  if (selector.method == SelectorMethod::mdsr && selector.n_pixels >= bands) {
    throw NotOvercomplete("n_pixels = " + std::to_string(selector.n_pixels) +
                          " must be less than the band count " + std::to_string(bands));
  }
  for (const auto& [label, count] : gt.class_counts()) {
    if (count <= classifier.per_class) {
      throw InsufficientClassSamples(
          label, "class " + std::to_string(label) + " has " + std::to_string(count) +
                     " labeled pixels; need more than " + std::to_string(classifier.per_class));
    }
  }
  if (classifier.k == 0 || classifier.k > classifier.per_class * gt.class_counts().size()) {
    throw InvalidArgument("knn K = " + std::to_string(classifier.k) +
                          " exceeds the training set size");
  }

  std::vector<std::size_t> labeled_pixels;
  for (std::size_t p = 0; p < gt.pixels(); ++p) {
    if (gt.label(p) != 0) labeled_pixels.push_back(p);
  }
  const BandMatrix labeled = gather_pixels(cube, labeled_pixels);
  std::vector<std::size_t> row_of(gt.pixels(), 0);
  for (std::size_t r = 0; r < labeled_pixels.size(); ++r) row_of[labeled_pixels[r]] = r;

  std::optional<BandCorrelation> correlation;
  if (selector.method != SelectorMethod::pca) correlation.emplace(cube);
  std::optional<BandMatrix> full;
  if (selector.baseline_pixels == BaselinePixels::full &&
      selector.method != SelectorMethod::mdsr && selector.method != SelectorMethod::all_bands) {
    full.emplace(flatten(cube));
  }

  std::vector<std::vector<TrialResult>> results(grid.size(), std::vector<TrialResult>(trials));

  parallel_for(trials, [&](std::size_t t) {
    const std::uint64_t seed = base_seed + t;
    const LabeledSplit split = stratified_split(gt, classifier.per_class, seed);
    std::vector<std::size_t> train_rows, test_rows;
    std::vector<int> train_y, test_y;
    for (std::size_t p : split.train_indices) {
      train_rows.push_back(row_of[p]);
      train_y.push_back(gt.label(p));
    }
    for (std::size_t p : split.test_indices) {
      test_rows.push_back(row_of[p]);
      test_y.push_back(gt.label(p));
    }

    auto baseline_matrix = [&]() -> BandMatrix {
      if (full) return *full;
      return gather_pixels(cube, sample_pixel_indices(cube.pixels(), selector.n_pixels, seed));
    };

    // Prefix-consistent methods rank once per trial; each grid entry takes
    // the first n bands (or components) of that ranking.
    std::vector<std::size_t> ranking;
    std::optional<baselines::PcaModel> pca;
    std::optional<BandMatrix> cluster_source;
    switch (selector.method) {
      case SelectorMethod::mdsr: {
        sparse::MdsrConfig cfg;
        cfg.n_pixels = selector.n_pixels;
        cfg.k0 = selector.k0;
        cfg.tol = selector.tol;
        cfg.weighting = selector.weighting;
        cfg.seed = seed;
        ranking = sparse::select_bands(sparse::mdsr_weights(cube, cfg), bands);
        break;
      }
      case SelectorMethod::lp:
        ranking = baselines::lp_select(baseline_matrix(), std::max<std::size_t>(max_n, 2));
        break;
      case SelectorMethod::osp:
        ranking = baselines::osp_select(baseline_matrix(), max_n);
        break;
      case SelectorMethod::cluster:
        cluster_source.emplace(baseline_matrix());
        break;
      case SelectorMethod::pca:
        pca.emplace(baselines::fit_pca(baseline_matrix(), max_n));
        break;
      case SelectorMethod::all_bands:
        ranking.resize(bands);
        std::iota(ranking.begin(), ranking.end(), 0);
        break;
    }
    std::optional<numerics::DenseMatrix> projected;
    if (pca) projected.emplace(pca->project(labeled));

    for (std::size_t g = 0; g < grid.size(); ++g) {
      const std::size_t n = grid[g];
      TrialResult& res = results[g][t];
      res.n_select = n;
      res.trial = t;
      res.seed = seed;
      res.n_train = train_rows.size();
      res.n_test = test_rows.size();

      numerics::DenseMatrix train_x, test_x;
      if (pca) {
        train_x = take_rows(*projected, train_rows, n);
        test_x = take_rows(*projected, test_rows, n);
      } else {
        if (cluster_source) {
          res.selected = baselines::cluster_select(*cluster_source, n);
        } else {
          res.selected.assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(n));
        }
        train_x = feature_rows(labeled, train_rows, res.selected);
        test_x = feature_rows(labeled, test_rows, res.selected);
        if (res.selected.size() >= 2) {
          try {
            res.avg_band_correlation = correlation->average(res.selected);
          } catch (const DegenerateInput&) {
          }
        }
      }
      const auto predicted = knn_classify(train_x, train_y, test_x, classifier.k);
      const auto cm = ConfusionMatrix::from_labels(test_y, predicted);
      res.oca = oca(cm);
      res.kappa = kappa(cm);
    }
  });

  EvaluationReport report;
  report.method = to_string(selector.method);
  report.selector = selector;
  report.classifier = classifier;
  report.n_select_grid = grid;
  report.trials = trials;
  report.base_seed = base_seed;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> ocas, kappas, corrs;
    bool all_corr = true;
    for (const auto& r : results[g]) {
      report.trial_results.push_back(r);
      ocas.push_back(r.oca);
      kappas.push_back(r.kappa);
      if (r.avg_band_correlation) {
        corrs.push_back(*r.avg_band_correlation);
      } else {
        all_corr = false;
      }
    }
    Aggregate agg;
    agg.n_select = grid[g];
    std::tie(agg.mean_oca, agg.std_oca) = mean_std(ocas);
    std::tie(agg.mean_kappa, agg.std_kappa) = mean_std(kappas);
    if (all_corr) agg.mean_avg_band_correlation = mean_std(corrs).first;
    report.aggregates.push_back(agg);
  }
  return report;
}

PredictionScore evaluate_predictions(const GroundTruth& gt, const LabeledSplit& split,
                                     std::span<const int> predictions) {
  if (predictions.size() != split.test_indices.size()) {
    throw InvalidArgument("got " + std::to_string(predictions.size()) + " predictions for " +
                          std::to_string(split.test_indices.size()) + " test pixels");
  }
  std::vector<int> truth;
  truth.reserve(split.test_indices.size());
  for (std::size_t p : split.test_indices) truth.push_back(gt.label(p));
  auto cm = ConfusionMatrix::from_labels(truth, predictions);
  const double o = oca(cm);
  const double k = kappa(cm);
  return {std::move(cm), o, k};
}

std::vector<int> load_predictions_csv(const std::filesystem::path& path,
                                      const LabeledSplit& split) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw CorruptFile(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "test_pixel_index,predicted_label") {
    throw CorruptFile(path.string() + ": expected header 'test_pixel_index,predicted_label'");
  }
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < split.test_indices.size(); ++i) slot[split.test_indices[i]] = i;
  std::vector<int> out(split.test_indices.size(), 0);
  std::vector<bool> seen(split.test_indices.size(), false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    long long pixel = -1, label = -1;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      pixel = std::stoll(line.substr(0, comma));
      label = std::stoll(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw CorruptFile(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    const auto it = pixel < 0 ? slot.end() : slot.find(static_cast<std::size_t>(pixel));
    if (it == slot.end()) {
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": pixel " +
                            std::to_string(pixel) + " is not a test pixel");
    }
    if (seen[it->second]) {
      throw InvalidArgument(path.string() + ": pixel " + std::to_string(pixel) +
                            " predicted twice");
    }
    seen[it->second] = true;
    out[it->second] = static_cast<int>(label);
  }
  const auto missing = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), false));
  if (missing) {
    throw InvalidArgument(path.string() + ": " + std::to_string(missing) +
                          " test pixels have no prediction");
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["method"] = report.method;
  j["index_base"] = 0;
  j["config"] = {
      {"n_pixels", report.selector.n_pixels},
      {"k0", report.selector.k0},
      {"tol", report.selector.tol},
      {"weighting", sparse::to_string(report.selector.weighting)},
      {"baseline_pixels",
       report.selector.baseline_pixels == BaselinePixels::sample ? "sample" : "full"},
      {"knn_k", report.classifier.k},
      {"per_class", report.classifier.per_class},
      {"n_select_grid", report.n_select_grid},
      {"trials", report.trials},
      {"base_seed", report.base_seed},
  };
  ordered_json trials = ordered_json::array();
  for (const auto& r : report.trial_results) {
    trials.push_back({{"n_select", r.n_select},
                      {"trial", r.trial},
                      {"seed", r.seed},
                      {"oca", r.oca},
                      {"kappa", r.kappa},
                      {"avg_band_correlation", opt_json(r.avg_band_correlation)},
                      {"selected", r.selected},
                      {"n_train", r.n_train},
                      {"n_test", r.n_test}});
  }
  j["trials"] = trials;
  ordered_json aggs = ordered_json::array();
  for (const auto& a : report.aggregates) {
    aggs.push_back({{"n_select", a.n_select},
                    {"mean_oca", a.mean_oca},
                    {"std_oca", a.std_oca},
                    {"mean_kappa", a.mean_kappa},
                    {"std_kappa", a.std_kappa},
                    {"mean_avg_band_correlation", opt_json(a.mean_avg_band_correlation)}});
  }
  j["aggregates"] = aggs;
  return j.dump(2) + "\n";
}

std::string report_csv_header() {
  return "method,n_select,trial,oca,kappa,n_pixels,k0,avg_band_correlation\n";
}

std::string report_csv_rows(const EvaluationReport& report) {
  std::string out;
  for (const auto& r : report.trial_results) {
    out += report.method + "," + std::to_string(r.n_select) + "," + std::to_string(r.trial) +
           "," + fmt(r.oca) + "," + fmt(r.kappa) + "," +
           std::to_string(report.selector.n_pixels) + "," + std::to_string(report.selector.k0) +
           "," + fmt(r.avg_band_correlation) + "\n";
  }
  return out;
}

std::string aggregate_csv_header() {
  return "method,n_select,n_pixels,k0,mean_oca,std_oca,mean_kappa,std_kappa,"
         "mean_avg_band_correlation\n";
}

std::string aggregate_csv_rows(const EvaluationReport& report) {
  std::string out;
  for (const auto& a : report.aggregates) {
    out += report.method + "," + std::to_string(a.n_select) + "," +
           std::to_string(report.selector.n_pixels) + "," + std::to_string(report.selector.k0) +
           "," + fmt(a.mean_oca) + "," + fmt(a.std_oca) + "," + fmt(a.mean_kappa) + "," +
           fmt(a.std_kappa) + "," + fmt(a.mean_avg_band_correlation) + "\n";
  }
  return out;
}

}  // namespace bandsel::eval
