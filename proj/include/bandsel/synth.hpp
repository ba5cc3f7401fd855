#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bandsel/hypercube.hpp"

namespace bandsel {

enum class MixingMode {
  // Output band j copies latent band j mod G.
  duplicate_with_noise,
  // Output band j is a convex combination of latent bands with random
  // non-negative weights.
  random_nonneg_mixing,
};

struct SynthSpec {
  std::size_t width = 16;
  std::size_t height = 16;
  std::size_t classes = 3;
  std::size_t latent_bands = 4;
  std::size_t bands = 16;
  // classes x latent_bands. Empty means draw means uniformly from
  // [mean_low, mean_high] using the seed.
  std::vector<std::vector<double>> class_means;
  double mean_low = 0.2;
  double mean_high = 1.0;
  MixingMode mixing = MixingMode::duplicate_with_noise;
  // Per-pixel Gaussian noise on the latent spectrum.
  double noise_sigma = 0.01;
  // Independent Gaussian noise added to each output band after mixing.
  // Zero keeps every output band exactly inside the G-dimensional latent span.
  double band_noise_sigma = 0.0;
};

struct SynthCube {
  HyperCube cube;
  GroundTruth ground_truth;
  // bands x latent_bands mixing weights; a duplicate-mode row is one-hot.
  std::vector<std::vector<double>> mixing;
  // Duplicate mode: the latent band each output band copies (its group).
  std::vector<std::size_t> generator_of_band;
};

// Pixel p (row-major) belongs to class 1 + floor(p * C / (W * H)), so every
// class occupies a contiguous run of pixels.
SynthCube synth_cube(const SynthSpec& spec, std::uint64_t seed);

}  // namespace bandsel
