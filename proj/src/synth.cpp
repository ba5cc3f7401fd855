#include "bandsel/synth.hpp"

#include "bandsel/error.hpp"
#include "bandsel/random.hpp"

namespace bandsel {

SynthCube synth_cube(const SynthSpec& spec, std::uint64_t seed) {
  const std::size_t G = spec.latent_bands;
  const std::size_t B = spec.bands;
  const std::size_t C = spec.classes;
  const std::size_t L = spec.width * spec.height;
  if (spec.width == 0 || spec.height == 0) throw InvalidArgument("synth grid must be non-empty");
  if (C < 2) throw InvalidArgument("synth needs at least 2 classes");
  if (G < 1) throw InvalidArgument("synth needs at least 1 latent band");
  if (B < G) throw InvalidArgument("synth output band count must be >= latent band count");
  if (L < C) throw InvalidArgument("synth grid has fewer pixels than classes");
  if (spec.noise_sigma < 0 || spec.band_noise_sigma < 0) {
    throw InvalidArgument("noise standard deviations must be non-negative");
  }

  Rng rng(seed);

  std::vector<std::vector<double>> means = spec.class_means;
  if (means.empty()) {
    means.assign(C, std::vector<double>(G));
    for (auto& m : means)
      for (double& v : m) v = rng.uniform(spec.mean_low, spec.mean_high);
  } else if (means.size() != C) {
    throw InvalidArgument("class_means must have one row per class");
  }
  for (const auto& m : means) {
    if (m.size() != G) throw InvalidArgument("class_means rows must have latent_bands entries");
  }

  std::vector<std::vector<double>> mixing(B, std::vector<double>(G, 0.0));
  std::vector<std::size_t> generator;
  if (spec.mixing == MixingMode::duplicate_with_noise) {
    generator.resize(B);
    for (std::size_t j = 0; j < B; ++j) {
      generator[j] = j % G;
      mixing[j][j % G] = 1.0;
    }
  } else {
    for (auto& row : mixing) {
      double total = 0.0;
      for (double& w : row) {
        w = rng.uniform01();
        total += w;
      }
      for (double& w : row) w /= total;
    }
  }

  std::vector<int> labels(L);
  for (std::size_t p = 0; p < L; ++p) labels[p] = 1 + static_cast<int>(p * C / L);

  std::vector<float> samples(L * B);
  std::vector<double> latent(G);
  for (std::size_t p = 0; p < L; ++p) {
    const auto& mean = means[static_cast<std::size_t>(labels[p] - 1)];
    for (std::size_t g = 0; g < G; ++g) latent[g] = mean[g] + spec.noise_sigma * rng.normal();
    for (std::size_t j = 0; j < B; ++j) {
      double v = 0.0;
      for (std::size_t g = 0; g < G; ++g) v += mixing[j][g] * latent[g];
      if (spec.band_noise_sigma > 0) v += spec.band_noise_sigma * rng.normal();
      samples[j * L + p] = static_cast<float>(v);
    }
  }

  return SynthCube{HyperCube(spec.width, spec.height, B, std::move(samples)),
                   GroundTruth(spec.width, spec.height, std::move(labels)),
                   std::move(mixing), std::move(generator)};
}

}  // namespace bandsel
