#include "bandsel/hypercube.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bandsel/error.hpp"
#include "bandsel/random.hpp"

namespace bandsel {

HyperCube::HyperCube(std::size_t width, std::size_t height, std::size_t bands,
                     std::vector<float> samples, std::vector<double> wavelengths,
                     std::vector<std::string> band_names)
    : width_(width),
      height_(height),
      bands_(bands),
      samples_(std::move(samples)),
      wavelengths_(std::move(wavelengths)),
      band_names_(std::move(band_names)) {
  if (width_ == 0 || height_ == 0 || bands_ == 0) {
    throw InvalidArgument("cube dimensions must be positive");
  }
  if (samples_.size() != width_ * height_ * bands_) {
    throw InvalidArgument("cube has " + std::to_string(samples_.size()) +
                          " samples, expected " +
                          std::to_string(width_ * height_ * bands_));
  }
  if (!wavelengths_.empty()) {
    if (wavelengths_.size() != bands_) {
      throw InvalidArgument("wavelength list length does not match band count");
    }
    for (std::size_t b = 1; b < bands_; ++b) {
      if (!(wavelengths_[b] > wavelengths_[b - 1])) {
        throw InvalidArgument("wavelengths must be strictly increasing");
      }
    }
  }
  if (!band_names_.empty() && band_names_.size() != bands_) {
    throw InvalidArgument("band name list length does not match band count");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw InvalidData("non-finite sample at offset " + std::to_string(i));
    }
  }
}

std::span<const float> HyperCube::band(std::size_t b) const {
  if (b >= bands_) throw InvalidArgument("band index out of range");
  return std::span<const float>(samples_).subspan(b * pixels(), pixels());
}

GroundTruth::GroundTruth(std::size_t width, std::size_t height, std::vector<int> labels,
                         std::map<int, std::string> class_names)
    : width_(width),
      height_(height),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
  if (width_ == 0 || height_ == 0) {
    throw InvalidArgument("ground-truth dimensions must be positive");
  }
  if (labels_.size() != width_ * height_) {
    throw InvalidArgument("ground truth has " + std::to_string(labels_.size()) +
                          " labels, expected " + std::to_string(width_ * height_));
  }
  for (int l : labels_) {
    if (l < 0) throw InvalidData("negative class label " + std::to_string(l));
  }
}

std::vector<int> GroundTruth::classes() const {
  std::vector<int> out;
  for (const auto& [label, count] : class_counts()) out.push_back(label);
  return out;
}

std::map<int, std::size_t> GroundTruth::class_counts() const {
  std::map<int, std::size_t> counts;
  for (int l : labels_) {
    if (l != 0) ++counts[l];
  }
  return counts;
}

std::size_t GroundTruth::labeled_count() const {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(), [](int l) { return l != 0; }));
}

BandMatrix::BandMatrix(std::size_t rows, std::size_t cols,
                       std::vector<double> column_major)
    : rows_(rows), cols_(cols), values_(std::move(column_major)) {
  if (rows_ == 0 || cols_ == 0) throw InvalidArgument("band matrix must be non-empty");
  if (values_.size() != rows_ * cols_) {
    throw InvalidArgument("band matrix value count does not match its shape");
  }
}

BandMatrix BandMatrix::from_columns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty() || columns.front().empty()) {
    throw InvalidArgument("band matrix must be non-empty");
  }
  const std::size_t rows = columns.front().size();
  std::vector<double> values;
  values.reserve(rows * columns.size());
  for (const auto& c : columns) {
    if (c.size() != rows) throw InvalidArgument("ragged band columns");
    values.insert(values.end(), c.begin(), c.end());
  }
  return BandMatrix(rows, columns.size(), std::move(values));
}

std::vector<double> BandMatrix::row(std::size_t r) const {
  std::vector<double> out(cols_);
  for (std::size_t c = 0; c < cols_; ++c) out[c] = at(r, c);
  return out;
}

BandMatrix BandMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<double> values;
  values.reserve(rows.size() * cols_);
  for (std::size_t c = 0; c < cols_; ++c) {
    for (std::size_t r : rows) {
      if (r >= rows_) throw InvalidArgument("row index out of range");
      values.push_back(at(r, c));
    }
  }
  return BandMatrix(rows.size(), cols_, std::move(values));
}

BandMatrix BandMatrix::select_cols(std::span<const std::size_t> cols) const {
  std::vector<double> values;
  values.reserve(rows_ * cols.size());
  for (std::size_t c : cols) {
    if (c >= cols_) throw InvalidArgument("column index out of range");
    const auto column = col(c);
    values.insert(values.end(), column.begin(), column.end());
  }
  return BandMatrix(rows_, cols.size(), std::move(values));
}

BandMatrix BandMatrix::scaled(double factor) const {
  std::vector<double> values(values_);
  for (double& v : values) v *= factor;
  return BandMatrix(rows_, cols_, std::move(values));
}

BandMatrix flatten(const HyperCube& cube) {
  const auto s = cube.samples();
  return BandMatrix(cube.pixels(), cube.bands(), std::vector<double>(s.begin(), s.end()));
}

HyperCube unflatten(const BandMatrix& bm, std::size_t width, std::size_t height) {
  if (width * height != bm.rows()) {
    throw InvalidArgument("grid does not match band matrix row count");
  }
  const auto v = bm.values();
  std::vector<float> samples(v.size());
  std::transform(v.begin(), v.end(), samples.begin(),
                 [](double x) { return static_cast<float>(x); });
  return HyperCube(width, height, bm.cols(), std::move(samples));
}

std::vector<std::size_t> sample_pixel_indices(std::size_t rows, std::size_t n,
                                              std::uint64_t seed) {
  if (n == 0 || n > rows) {
    throw InvalidArgument("cannot sample " + std::to_string(n) + " pixels from " +
                          std::to_string(rows));
  }
  Rng rng(seed);
  return sample_without_replacement(rows, n, rng);
}

BandMatrix sample_pixels(const BandMatrix& bm, std::size_t n, std::uint64_t seed) {
  const auto rows = sample_pixel_indices(bm.rows(), n, seed);
  return bm.select_rows(rows);
}

BandMatrix gather_pixels(const HyperCube& cube, std::span<const std::size_t> pixels) {
  std::vector<double> values;
  values.reserve(pixels.size() * cube.bands());
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    const auto band = cube.band(b);
    for (std::size_t p : pixels) {
      if (p >= cube.pixels()) throw InvalidArgument("pixel index out of range");
      values.push_back(band[p]);
    }
  }
  return BandMatrix(pixels.size(), cube.bands(), std::move(values));
}

HyperCube restrict_bands(const HyperCube& cube, std::span<const std::size_t> indices) {
  if (indices.empty()) throw InvalidArgument("band selection is empty");
  std::set<std::size_t> seen;
  for (std::size_t b : indices) {
    if (b >= cube.bands()) {
      throw InvalidArgument("band index " + std::to_string(b) + " out of range [0, " +
                            std::to_string(cube.bands()) + ")");
    }
    if (!seen.insert(b).second) {
      throw InvalidArgument("duplicate band index " + std::to_string(b));
    }
  }
  std::vector<float> samples;
  samples.reserve(indices.size() * cube.pixels());
  std::vector<double> wavelengths;
  std::vector<std::string> names;
  for (std::size_t b : indices) {
    const auto band = cube.band(b);
    samples.insert(samples.end(), band.begin(), band.end());
    if (!cube.wavelengths().empty()) wavelengths.push_back(cube.wavelengths()[b]);
    if (!cube.band_names().empty()) names.push_back(cube.band_names()[b]);
  }
  // A reordering selection can break wavelength monotonicity; drop it then.
  if (!std::is_sorted(indices.begin(), indices.end())) wavelengths.clear();
  return HyperCube(cube.width(), cube.height(), indices.size(), std::move(samples),
                   std::move(wavelengths), std::move(names));
}

std::vector<std::size_t> complement_bands(std::size_t bands,
                                          std::span<const std::size_t> excluded) {
  std::set<std::size_t> drop(excluded.begin(), excluded.end());
  for (std::size_t b : drop) {
    if (b >= bands) {
      throw InvalidArgument("excluded band " + std::to_string(b) + " out of range");
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t b = 0; b < bands; ++b) {
    if (!drop.count(b)) keep.push_back(b);
  }
  if (keep.empty()) throw InvalidArgument("band exclusion removes every band");
  return keep;
}

GroundTruth filter_classes(const GroundTruth& gt, std::span<const int> keep) {
  std::set<int> allowed(keep.begin(), keep.end());
  std::vector<int> labels(gt.labels().begin(), gt.labels().end());
  for (int& l : labels) {
    if (!allowed.count(l)) l = 0;
  }
  return GroundTruth(gt.width(), gt.height(), std::move(labels), gt.class_names());
}

std::vector<int> most_populous_classes(const GroundTruth& gt, std::size_t k) {
  const auto counts = gt.class_counts();
  std::vector<std::pair<int, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<int> out;
  for (const auto& [label, count] : ranked) out.push_back(label);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bandsel
