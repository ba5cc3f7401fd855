#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bandsel {

// W x H x B radiance cube, band-sequential: samples[b * W * H + y * W + x].
// Immutable once constructed; the constructor enforces every invariant.
class HyperCube {
 public:
  HyperCube(std::size_t width, std::size_t height, std::size_t bands,
            std::vector<float> samples, std::vector<double> wavelengths = {},
            std::vector<std::string> band_names = {});

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t bands() const noexcept { return bands_; }
  std::size_t pixels() const noexcept { return width_ * height_; }

  std::span<const float> samples() const noexcept { return samples_; }
  std::span<const float> band(std::size_t b) const;
  float at(std::size_t x, std::size_t y, std::size_t b) const {
    return samples_[b * pixels() + y * width_ + x];
  }

  // Empty when the source carried no wavelength metadata.
  const std::vector<double>& wavelengths() const noexcept { return wavelengths_; }
  const std::vector<std::string>& band_names() const noexcept { return band_names_; }

  friend bool operator==(const HyperCube&, const HyperCube&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::size_t bands_;
  std::vector<float> samples_;
  std::vector<double> wavelengths_;
  std::vector<std::string> band_names_;
};

// Per-pixel class labels, row-major over the W x H grid. 0 means unlabeled.
class GroundTruth {
 public:
  GroundTruth(std::size_t width, std::size_t height, std::vector<int> labels,
              std::map<int, std::string> class_names = {});

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixels() const noexcept { return labels_.size(); }
  std::span<const int> labels() const noexcept { return labels_; }
  int label(std::size_t pixel) const { return labels_[pixel]; }
  const std::map<int, std::string>& class_names() const noexcept { return class_names_; }

  // Distinct nonzero labels, ascending.
  std::vector<int> classes() const;
  // Labeled pixel count per nonzero class.
  std::map<int, std::size_t> class_counts() const;
  std::size_t labeled_count() const;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<int> labels_;
  std::map<int, std::string> class_names_;
};

// Pixels-by-bands matrix. Column j is the image vector of band j; storage is
// column-major so each band is contiguous.
class BandMatrix {
 public:
  BandMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major);
  static BandMatrix from_columns(const std::vector<std::vector<double>>& columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> col(std::size_t j) const {
    return {values_.data() + j * rows_, rows_};
  }
  double at(std::size_t r, std::size_t c) const { return values_[c * rows_ + r]; }
  std::vector<double> row(std::size_t r) const;
  std::span<const double> values() const noexcept { return values_; }

  BandMatrix select_rows(std::span<const std::size_t> rows) const;
  BandMatrix select_cols(std::span<const std::size_t> cols) const;
  BandMatrix scaled(double factor) const;

  friend bool operator==(const BandMatrix&, const BandMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

BandMatrix flatten(const HyperCube& cube);

// Inverse of flatten for a given grid; values are narrowed back to float.
HyperCube unflatten(const BandMatrix& bm, std::size_t width, std::size_t height);

// Distinct row indices in ascending order, uniform without replacement.
std::vector<std::size_t> sample_pixel_indices(std::size_t rows, std::size_t n,
                                              std::uint64_t seed);

BandMatrix sample_pixels(const BandMatrix& bm, std::size_t n, std::uint64_t seed);

// Rows of flatten(cube) for the given pixels, without flattening the whole cube.
BandMatrix gather_pixels(const HyperCube& cube, std::span<const std::size_t> pixels);

// Keeps the listed bands, in the listed order.
HyperCube restrict_bands(const HyperCube& cube, std::span<const std::size_t> indices);

// All band indices not in `excluded`, ascending. Used to drop water-absorption
// bands given as an exclusion list.
std::vector<std::size_t> complement_bands(std::size_t bands,
                                          std::span<const std::size_t> excluded);

// Zeroes every label not in `keep`.
GroundTruth filter_classes(const GroundTruth& gt, std::span<const int> keep);

// The k classes with the most labeled pixels, ascending by label. Count ties
// prefer the lower label.
std::vector<int> most_populous_classes(const GroundTruth& gt, std::size_t k);

}  // namespace bandsel
