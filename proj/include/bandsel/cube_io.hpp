#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "bandsel/hypercube.hpp"

namespace bandsel {

enum class CubeFormat { container, envi, autodetect };

CubeFormat parse_cube_format(const std::string& name);

// Decoded cube payload before invariant checks. inspect works on this so it
// can report non-finite samples instead of refusing the file.
struct RawCube {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t bands = 0;
  std::vector<float> samples;  // band-sequential
  std::vector<double> wavelengths;
  std::vector<std::string> band_names;
};

// Container file: one line of JSON header terminated by '\n', followed by
// width*height*bands little-endian float32 values in band-sequential order.
//   {"format":"bandsel-cube","version":1,"width":W,"height":H,"bands":B,
//    "dtype":"f32","layout":"bsq","wavelengths":[...],"band_names":[...]}
//
// ENVI: `path` may name either the .hdr or the binary file. Supported subset is
// interleave bsq/bil/bip, data type 4 (float32) or 12 (uint16), either byte
// order, and a header offset.
RawCube read_cube_raw(const std::filesystem::path& path,
                      CubeFormat format = CubeFormat::autodetect);

HyperCube load_cube(const std::filesystem::path& path,
                    CubeFormat format = CubeFormat::autodetect);

void save_container(const RawCube& raw, const std::filesystem::path& path);
void save_container(const HyperCube& cube, const std::filesystem::path& path);

enum class Interleave { bsq, bil, bip };

// Writes `hdr_path` and its float32 little-endian data file next to it (same
// name without the .hdr extension).
void save_envi(const HyperCube& cube, const std::filesystem::path& hdr_path,
               Interleave interleave = Interleave::bsq);

RawCube to_raw(const HyperCube& cube);

// Ground truth from either a CSV with header `pixel_index,label` (unlisted
// pixels are unlabeled) or a single-band container label image. The grid
// comes from the cube the labels belong to.
GroundTruth load_ground_truth(const std::filesystem::path& path, std::size_t width,
                              std::size_t height);

void save_ground_truth_csv(const GroundTruth& gt, const std::filesystem::path& path);
void save_ground_truth_container(const GroundTruth& gt,
                                 const std::filesystem::path& path);

}  // namespace bandsel
