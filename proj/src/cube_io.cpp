#include "bandsel/cube_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "bandsel/error.hpp"
#include "bandsel/file_util.hpp"

namespace bandsel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& braced) {
  std::string body = trim(braced);
  if (!body.empty() && body.front() == '{') body.erase(0, 1);
  if (!body.empty() && body.back() == '}') body.pop_back();
  std::vector<std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

float read_f32(const unsigned char* p, bool big_endian) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if (big_endian != (std::endian::native == std::endian::big)) {
    bits = ((bits & 0xFFu) << 24) | ((bits & 0xFF00u) << 8) | ((bits >> 8) & 0xFF00u) |
           (bits >> 24);
  }
  return std::bit_cast<float>(bits);
}

std::uint16_t read_u16(const unsigned char* p, bool big_endian) {
  return big_endian ? static_cast<std::uint16_t>((p[0] << 8) | p[1])
                    : static_cast<std::uint16_t>((p[1] << 8) | p[0]);
}

void append_f32_le(std::string& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>(bits & 0xFFu));
    bits >>= 8;
  }
}

bool has_extension(const fs::path& p, const char* ext) {
  return lower(p.extension().string()) == ext;
}

// --- container -------------------------------------------------------------

RawCube read_container(const fs::path& path) {
  const std::string bytes = read_file(path);
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos) {
    throw CorruptFile(path.string() + ": missing container header line");
  }
  json header;
  try {
    header = json::parse(bytes.substr(0, newline));
  } catch (const json::exception& e) {
    throw CorruptFile(path.string() + ": bad container header: " + e.what());
  }
  RawCube raw;
  try {
    if (header.value("format", std::string{}) != "bandsel-cube") {
      throw CorruptFile(path.string() + ": not a bandsel cube container");
    }
    if (header.value("dtype", std::string{"f32"}) != "f32") {
      throw UnsupportedFormat(path.string() + ": unsupported dtype " +
                              header["dtype"].dump());
    }
    if (header.value("layout", std::string{"bsq"}) != "bsq") {
      throw UnsupportedFormat(path.string() + ": unsupported layout " +
                              header["layout"].dump());
    }
    raw.width = header.at("width").get<std::size_t>();
    raw.height = header.at("height").get<std::size_t>();
    raw.bands = header.at("bands").get<std::size_t>();
    if (header.contains("wavelengths")) {
      raw.wavelengths = header["wavelengths"].get<std::vector<double>>();
    }
    if (header.contains("band_names")) {
      raw.band_names = header["band_names"].get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw CorruptFile(path.string() + ": bad container header: " + e.what());
  }
  const std::size_t count = raw.width * raw.height * raw.bands;
  const std::size_t payload = bytes.size() - newline - 1;
  if (payload != count * 4) {
    throw CorruptFile(path.string() + ": payload has " + std::to_string(payload) +
                      " bytes, header declares " + std::to_string(count * 4));
  }
  raw.samples.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + newline + 1);
  for (std::size_t i = 0; i < count; ++i) raw.samples[i] = read_f32(p + 4 * i, false);
  return raw;
}

// --- ENVI ------------------------------------------------------------------

std::map<std::string, std::string> parse_envi_header(const fs::path& hdr) {
  std::ifstream in(hdr);
  if (!in) throw IoError("cannot open " + hdr.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).rfind("ENVI", 0) != 0) {
    throw CorruptFile(hdr.string() + ": missing ENVI signature");
  }
  std::map<std::string, std::string> fields;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = lower(trim(line.substr(0, eq)));
    std::string value = trim(line.substr(eq + 1));
    if (!value.empty() && value.front() == '{') {
      while (value.find('}') == std::string::npos && std::getline(in, line)) {
        value += " " + trim(line);
      }
    }
    fields[key] = value;
  }
  return fields;
}

std::size_t header_uint(const std::map<std::string, std::string>& fields,
                        const std::string& key, const fs::path& hdr, bool required,
                        std::size_t fallback = 0) {
  const auto it = fields.find(key);
  if (it == fields.end()) {
    if (required) throw CorruptFile(hdr.string() + ": header lacks '" + key + "'");
    return fallback;
  }
  try {
    std::size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (v < 0 || used != it->second.size()) throw std::invalid_argument(key);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw CorruptFile(hdr.string() + ": bad value for '" + key + "': " + it->second);
  }
}

std::pair<fs::path, fs::path> envi_paths(const fs::path& path) {
  if (has_extension(path, ".hdr")) {
    fs::path stem = path;
    stem.replace_extension();
    if (fs::exists(stem)) return {path, stem};
    for (const char* ext : {".img", ".raw", ".dat", ".bsq", ".bil", ".bip", ".bin"}) {
      fs::path candidate = stem;
      candidate += ext;
      if (fs::exists(candidate)) return {path, candidate};
    }
    throw IoError(path.string() + ": no data file found beside header");
  }
  fs::path appended = path;
  appended += ".hdr";
  if (fs::exists(appended)) return {appended, path};
  fs::path replaced = path;
  replaced.replace_extension(".hdr");
  if (fs::exists(replaced)) return {replaced, path};
  throw IoError(path.string() + ": no ENVI header found");
}

RawCube read_envi(const fs::path& path) {
  const auto [hdr, data] = envi_paths(path);
  const auto fields = parse_envi_header(hdr);

  RawCube raw;
  raw.width = header_uint(fields, "samples", hdr, true);
  raw.height = header_uint(fields, "lines", hdr, true);
  raw.bands = header_uint(fields, "bands", hdr, true);
  const std::size_t data_type = header_uint(fields, "data type", hdr, true);
  const std::size_t offset = header_uint(fields, "header offset", hdr, false, 0);
  const std::size_t byte_order = header_uint(fields, "byte order", hdr, false, 0);
  const std::string interleave =
      fields.count("interleave") ? lower(fields.at("interleave")) : "bsq";

  if (data_type != 4 && data_type != 12) {
    throw UnsupportedFormat(hdr.string() + ": unsupported data type " +
                            std::to_string(data_type) + " (supported: 4, 12)");
  }
  if (interleave != "bsq" && interleave != "bil" && interleave != "bip") {
    throw UnsupportedFormat(hdr.string() + ": unsupported interleave " + interleave);
  }
  if (byte_order > 1) {
    throw UnsupportedFormat(hdr.string() + ": unsupported byte order " +
                            std::to_string(byte_order));
  }
  if (fields.count("wavelength")) {
    for (const auto& item : split_list(fields.at("wavelength"))) {
      try {
        raw.wavelengths.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw CorruptFile(hdr.string() + ": bad wavelength entry " + item);
      }
    }
  }
  if (fields.count("band names")) raw.band_names = split_list(fields.at("band names"));

  const std::string bytes = read_file(data);
  const std::size_t elem = data_type == 4 ? 4 : 2;
  const std::size_t count = raw.width * raw.height * raw.bands;
  if (bytes.size() < offset || bytes.size() - offset < count * elem) {
    throw CorruptFile(data.string() + ": payload shorter than header declares (" +
                      std::to_string(bytes.size() - std::min(bytes.size(), offset)) +
                      " bytes, need " + std::to_string(count * elem) + ")");
  }

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  const bool big = byte_order == 1;
  const std::size_t w = raw.width, h = raw.height, nb = raw.bands;
  raw.samples.resize(count);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t b = 0; b < nb; ++b) {
        std::size_t src;
        if (interleave == "bsq") {
          src = (b * h + y) * w + x;
        } else if (interleave == "bil") {
          src = (y * nb + b) * w + x;
        } else {
          src = (y * w + x) * nb + b;
        }
        const unsigned char* q = p + src * elem;
        raw.samples[(b * h + y) * w + x] =
            elem == 4 ? read_f32(q, big) : static_cast<float>(read_u16(q, big));
      }
    }
  }
  return raw;
}

CubeFormat detect(const fs::path& path) {
  if (has_extension(path, ".hdr")) return CubeFormat::envi;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const int first = in.peek();
  if (first == '{') return CubeFormat::container;
  return CubeFormat::envi;
}

HyperCube from_raw(RawCube raw) {
  return HyperCube(raw.width, raw.height, raw.bands, std::move(raw.samples),
                   std::move(raw.wavelengths), std::move(raw.band_names));
}

}  // namespace

CubeFormat parse_cube_format(const std::string& name) {
  const std::string n = lower(name);
  if (n == "container") return CubeFormat::container;
  if (n == "envi") return CubeFormat::envi;
  if (n == "auto" || n.empty()) return CubeFormat::autodetect;
  throw InvalidArgument("unknown cube format '" + name + "'");
}

RawCube read_cube_raw(const fs::path& path, CubeFormat format) {
  if (!fs::exists(path)) throw IoError("file not found: " + path.string());
  if (format == CubeFormat::autodetect) format = detect(path);
  return format == CubeFormat::container ? read_container(path) : read_envi(path);
}

HyperCube load_cube(const fs::path& path, CubeFormat format) {
  RawCube raw = read_cube_raw(path, format);
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    if (!std::isfinite(raw.samples[i])) {
      throw InvalidData(path.string() + ": non-finite sample at offset " +
                        std::to_string(i));
    }
  }
  try {
    return from_raw(std::move(raw));
  } catch (const InvalidArgument& e) {
    throw CorruptFile(path.string() + ": " + e.what());
  }
}

RawCube to_raw(const HyperCube& cube) {
  RawCube raw;
  raw.width = cube.width();
  raw.height = cube.height();
  raw.bands = cube.bands();
  raw.samples.assign(cube.samples().begin(), cube.samples().end());
  raw.wavelengths = cube.wavelengths();
  raw.band_names = cube.band_names();
  return raw;
}

void save_container(const RawCube& raw, const fs::path& path) {
  if (raw.samples.size() != raw.width * raw.height * raw.bands) {
    throw InvalidArgument("raw cube sample count does not match its shape");
  }
  json header = {{"format", "bandsel-cube"}, {"version", 1},   {"width", raw.width},
                 {"height", raw.height},     {"bands", raw.bands}, {"dtype", "f32"},
                 {"layout", "bsq"}};
  if (!raw.wavelengths.empty()) header["wavelengths"] = raw.wavelengths;
  if (!raw.band_names.empty()) header["band_names"] = raw.band_names;
  std::string out = header.dump();
  out.push_back('\n');
  out.reserve(out.size() + raw.samples.size() * 4);
  for (float v : raw.samples) append_f32_le(out, v);
  write_file_atomic(path, out);
}

void save_container(const HyperCube& cube, const fs::path& path) {
  save_container(to_raw(cube), path);
}

void save_envi(const HyperCube& cube, const fs::path& hdr_path, Interleave interleave) {
  if (!has_extension(hdr_path, ".hdr")) {
    throw InvalidArgument("ENVI header path must end in .hdr");
  }
  const std::size_t w = cube.width(), h = cube.height(), nb = cube.bands();
  std::string payload;
  payload.reserve(w * h * nb * 4);
  auto emit = [&](std::size_t x, std::size_t y, std::size_t b) {
    append_f32_le(payload, cube.at(x, y, b));
  };
  switch (interleave) {
    case Interleave::bsq:
      for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t y = 0; y < h; ++y)
          for (std::size_t x = 0; x < w; ++x) emit(x, y, b);
      break;
    case Interleave::bil:
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t b = 0; b < nb; ++b)
          for (std::size_t x = 0; x < w; ++x) emit(x, y, b);
      break;
    case Interleave::bip:
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
          for (std::size_t b = 0; b < nb; ++b) emit(x, y, b);
      break;
  }
  static const char* names[] = {"bsq", "bil", "bip"};
  std::ostringstream hdr;
  hdr.precision(17);
  hdr << "ENVI\n"
      << "samples = " << w << "\n"
      << "lines = " << h << "\n"
      << "bands = " << nb << "\n"
      << "header offset = 0\n"
      << "data type = 4\n"
      << "interleave = " << names[static_cast<int>(interleave)] << "\n"
      << "byte order = 0\n";
  if (!cube.wavelengths().empty()) {
    hdr << "wavelength = {";
    for (std::size_t b = 0; b < nb; ++b) {
      hdr << (b ? ", " : "") << cube.wavelengths()[b];
    }
    hdr << "}\n";
  }
  fs::path data = hdr_path;
  data.replace_extension();
  write_file_atomic(data, payload);
  write_file_atomic(hdr_path, hdr.str());
}

GroundTruth load_ground_truth(const fs::path& path, std::size_t width, std::size_t height) {
  if (!fs::exists(path)) throw IoError("file not found: " + path.string());
  const std::size_t pixels = width * height;
  if (has_extension(path, ".csv")) {
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "pixel_index,label") {
      throw CorruptFile(path.string() + ": expected header 'pixel_index,label'");
    }
    std::vector<int> labels(pixels, 0);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const auto comma = line.find(',');
      long long index = -1, label = -1;
      try {
        if (comma == std::string::npos) throw std::invalid_argument("no comma");
        index = std::stoll(line.substr(0, comma));
        label = std::stoll(line.substr(comma + 1));
      } catch (const std::exception&) {
        throw CorruptFile(path.string() + ":" + std::to_string(line_no) +
                          ": malformed row '" + line + "'");
      }
      if (index < 0 || static_cast<std::size_t>(index) >= pixels) {
        throw CorruptFile(path.string() + ":" + std::to_string(line_no) +
                          ": pixel index out of range");
      }
      if (label < 0) {
        throw InvalidData(path.string() + ":" + std::to_string(line_no) +
                          ": negative label");
      }
      labels[static_cast<std::size_t>(index)] = static_cast<int>(label);
    }
    return GroundTruth(width, height, std::move(labels));
  }

  const RawCube raw = read_cube_raw(path, CubeFormat::autodetect);
  if (raw.bands != 1 || raw.width != width || raw.height != height) {
    throw CorruptFile(path.string() + ": label image must be a single band of " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  std::vector<int> labels(pixels);
  for (std::size_t i = 0; i < pixels; ++i) {
    const float v = raw.samples[i];
    if (!std::isfinite(v) || v < 0 || v != std::floor(v)) {
      throw InvalidData(path.string() + ": label at pixel " + std::to_string(i) +
                        " is not a non-negative integer");
    }
    labels[i] = static_cast<int>(v);
  }
  return GroundTruth(width, height, std::move(labels));
}

void save_ground_truth_csv(const GroundTruth& gt, const fs::path& path) {
  std::string out = "pixel_index,label\n";
  for (std::size_t i = 0; i < gt.pixels(); ++i) {
    if (gt.label(i) != 0) {
      out += std::to_string(i) + "," + std::to_string(gt.label(i)) + "\n";
    }
  }
  write_file_atomic(path, out);
}

void save_ground_truth_container(const GroundTruth& gt, const fs::path& path) {
  RawCube raw;
  raw.width = gt.width();
  raw.height = gt.height();
  raw.bands = 1;
  raw.samples.reserve(gt.pixels());
  for (int l : gt.labels()) raw.samples.push_back(static_cast<float>(l));
  save_container(raw, path);
}

}  // namespace bandsel
