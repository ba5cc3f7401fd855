#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bandsel/cube_io.hpp"
#include "bandsel/eval.hpp"
#include "bandsel/hypercube.hpp"
#include "bandsel/synth.hpp"

namespace bandsel {

// Named dataset defaults. Everything a preset sets can be overridden.
struct DatasetPreset {
  std::string name;
  std::size_t knn_k = 6;
  std::size_t top_classes = 0;        // 0 keeps every class
  std::size_t raw_bands = 0;          // band count the water list refers to
  std::vector<std::size_t> water_bands;  // 0-based
};

// salinas_a, pavia_u, indian_pines.
const DatasetPreset& find_preset(const std::string& name);

enum class SweepParameter { none, n_pixels, k0 };

struct RunConfig {
  std::filesystem::path config_dir;

  // dataset
  std::filesystem::path cube;
  CubeFormat format = CubeFormat::autodetect;
  std::filesystem::path ground_truth;
  std::vector<std::size_t> exclude_bands;  // 0-based, into the file's bands
  bool exclude_water_bands = false;
  std::string preset;
  std::vector<int> classes;                // empty keeps all
  std::size_t top_classes = 0;

  // selector
  eval::SelectorConfig selector;
  std::size_t n_select = 10;

  // evaluation
  eval::ClassifierConfig classifier;
  std::size_t trials = 10;
  std::vector<std::size_t> n_select_grid;
  std::vector<eval::SelectorMethod> methods;
  SweepParameter sweep = SweepParameter::none;
  std::vector<std::size_t> sweep_values;
  std::filesystem::path external_predictions;
  bool write_splits = false;

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
};

// Parses and validates a JSON run configuration. Unknown keys are rejected,
// relative paths resolve against the config file's directory, and every
// referenced input file must exist.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& config_dir);

// The cube after band exclusion plus the ground truth after class filtering.
struct Dataset {
  HyperCube cube;
  std::optional<GroundTruth> ground_truth;
  std::vector<std::size_t> kept_bands;  // file band index of each cube band
};

// Loads the dataset and checks the config against it (grid values within the
// kept band count, exclusion indices in range).
Dataset load_dataset(const RunConfig& config, bool need_ground_truth);

SynthSpec parse_synth_spec(const std::string& text, std::uint64_t* seed);

}  // namespace bandsel
