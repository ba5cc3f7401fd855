#include "bandsel/config.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "bandsel/error.hpp"
#include "bandsel/file_util.hpp"

namespace bandsel {

namespace {

using nlohmann::json;

std::vector<std::size_t> inclusive_range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> out;
  for (std::size_t i = first; i <= last; ++i) out.push_back(i);
  return out;
}

std::vector<std::size_t> concat(std::initializer_list<std::vector<std::size_t>> parts) {
  std::vector<std::size_t> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::vector<DatasetPreset>& presets() {
  static const std::vector<DatasetPreset> all = {
      {"salinas_a", 6, 0, 224,
       concat({inclusive_range(107, 111), inclusive_range(153, 166), {223}})},
      {"pavia_u", 9, 0, 0, {}},
      {"indian_pines", 12, 12, 220,
       concat({inclusive_range(103, 107), inclusive_range(149, 162), {219}})},
  };
  return all;
}

// Walks a JSON object, recording which keys were read so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw InvalidArgument(where_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& get(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string name(const std::string& key) const { return where_ + "." + key; }

  std::size_t size_value(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    return to_size(get(key), name(key));
  }

  double real_value(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_number()) throw InvalidArgument(name(key) + ": expected a number");
    return v.get<double>();
  }

  std::string string_value(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_string()) throw InvalidArgument(name(key) + ": expected a string");
    return v.get<std::string>();
  }

  bool bool_value(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_boolean()) throw InvalidArgument(name(key) + ": expected true or false");
    return v.get<bool>();
  }

  Section child(const std::string& key) {
    if (!has(key)) return Section(empty(), name(key));
    return Section(get(key), name(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw InvalidArgument(where_ + ": unknown key '" + key + "'");
    }
  }

  static std::size_t to_size(const json& v, const std::string& where) {
    if (!v.is_number_unsigned()) {
      throw InvalidArgument(where + ": expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  static std::vector<std::size_t> to_sizes(const json& v, const std::string& where) {
    if (!v.is_array()) throw InvalidArgument(where + ": expected an array");
    std::vector<std::size_t> out;
    for (const auto& e : v) out.push_back(to_size(e, where));
    return out;
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& dir, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = dir / path;
  return path.lexically_normal();
}

void require_file(const std::filesystem::path& path, const std::string& what) {
  if (!std::filesystem::exists(path)) {
    throw IoError(what + " not found: " + path.string());
  }
}

std::vector<std::size_t> parse_grid(const json& v, const std::string& where) {
  if (v.is_array()) return Section::to_sizes(v, where);
  if (v.is_number_integer()) return {Section::to_size(v, where)};
  Section s(v, where);
  const std::size_t start = s.size_value("start", 0);
  const std::size_t stop = s.size_value("stop", 0);
  const std::size_t step = s.size_value("step", 1);
  s.finish();
  if (start == 0 || stop < start || step == 0) {
    throw InvalidArgument(where + ": need 1 <= start <= stop and step >= 1");
  }
  std::vector<std::size_t> out;
  for (std::size_t n = start; n <= stop; n += step) out.push_back(n);
  return out;
}

}  // namespace

const DatasetPreset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw InvalidArgument("unknown dataset preset '" + name +
                        "' (salinas_a | pavia_u | indian_pines)");
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& config_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg;
  cfg.config_dir = config_dir;
  Section top(root, "config");

  Section ds = top.child("dataset");
  if (ds.has("cube")) cfg.cube = resolve(config_dir, ds.string_value("cube", ""));
  cfg.format = parse_cube_format(ds.string_value("format", "auto"));
  if (ds.has("ground_truth")) {
    cfg.ground_truth = resolve(config_dir, ds.string_value("ground_truth", ""));
  }
  cfg.preset = ds.string_value("preset", "");
  const DatasetPreset* preset = cfg.preset.empty() ? nullptr : &find_preset(cfg.preset);
  if (ds.has("exclude_bands")) {
    const json& v = ds.get("exclude_bands");
    if (v.is_string()) {
      if (v.get<std::string>() != "water") {
        throw InvalidArgument(ds.name("exclude_bands") + ": expected a list or \"water\"");
      }
      if (!preset || preset->water_bands.empty()) {
        throw InvalidArgument(ds.name("exclude_bands") +
                              ": \"water\" needs a preset with a water-band list");
      }
      cfg.exclude_water_bands = true;
      cfg.exclude_bands = preset->water_bands;
    } else {
      cfg.exclude_bands = Section::to_sizes(v, ds.name("exclude_bands"));
    }
  }
  if (ds.has("classes")) {
    const json& v = ds.get("classes");
    if (!v.is_array()) throw InvalidArgument(ds.name("classes") + ": expected an array");
    for (const auto& e : v) {
      if (!e.is_number_integer() || e.get<long long>() <= 0) {
        throw InvalidArgument(ds.name("classes") + ": labels must be positive integers");
      }
      cfg.classes.push_back(e.get<int>());
    }
  }
  cfg.top_classes = ds.size_value("top_classes", preset ? preset->top_classes : 0);
  if (!cfg.classes.empty() && cfg.top_classes != 0 && ds.has("top_classes")) {
    throw InvalidArgument("dataset: give either classes or top_classes, not both");
  }
  if (!cfg.classes.empty()) cfg.top_classes = 0;
  ds.finish();

  Section sel = top.child("selector");
  cfg.selector.method = eval::parse_selector(sel.string_value("method", "mdsr"));
  cfg.selector.n_pixels = sel.size_value("n_pixels", 50);
  cfg.selector.k0 = sel.size_value("k0", 6);
  cfg.selector.tol = sel.real_value("tol", 0.0);
  cfg.selector.weighting = sparse::parse_weighting(sel.string_value("weighting", "count"));
  cfg.n_select = sel.size_value("n_select", 10);
  const std::string pixels = sel.string_value("baseline_pixels", "sample");
  if (pixels == "sample") {
    cfg.selector.baseline_pixels = eval::BaselinePixels::sample;
  } else if (pixels == "full") {
    cfg.selector.baseline_pixels = eval::BaselinePixels::full;
  } else {
    throw InvalidArgument(sel.name("baseline_pixels") + ": expected \"sample\" or \"full\"");
  }
  sel.finish();
  if (cfg.selector.n_pixels == 0) throw InvalidArgument("selector.n_pixels must be positive");
  if (cfg.selector.k0 == 0) throw InvalidArgument("selector.k0 must be positive");
  if (cfg.selector.tol < 0.0) throw InvalidArgument("selector.tol must be non-negative");
  if (cfg.n_select == 0) throw InvalidArgument("selector.n_select must be positive");

  Section ev = top.child("evaluation");
  cfg.classifier.per_class = ev.size_value("per_class", 20);
  cfg.trials = ev.size_value("trials", 10);
  cfg.classifier.k = ev.size_value("knn_k", preset ? preset->knn_k : 6);
  if (ev.has("n_select")) {
    cfg.n_select_grid = parse_grid(ev.get("n_select"), ev.name("n_select"));
  } else {
    cfg.n_select_grid = {cfg.n_select};
  }
  if (ev.has("methods")) {
    const json& v = ev.get("methods");
    if (!v.is_array()) throw InvalidArgument(ev.name("methods") + ": expected an array");
    for (const auto& e : v) {
      if (!e.is_string()) throw InvalidArgument(ev.name("methods") + ": expected names");
      cfg.methods.push_back(eval::parse_selector(e.get<std::string>()));
    }
  } else {
    cfg.methods = {eval::SelectorMethod::mdsr, eval::SelectorMethod::lp,
                   eval::SelectorMethod::osp, eval::SelectorMethod::cluster,
                   eval::SelectorMethod::pca};
  }
  if (ev.has("sweep")) {
    Section sw(ev.get("sweep"), ev.name("sweep"));
    const std::string param = sw.string_value("parameter", "");
    if (param == "n_pixels") {
      cfg.sweep = SweepParameter::n_pixels;
    } else if (param == "k0") {
      cfg.sweep = SweepParameter::k0;
    } else {
      throw InvalidArgument(sw.name("parameter") + ": expected \"n_pixels\" or \"k0\"");
    }
    if (!sw.has("values")) throw InvalidArgument(sw.name("values") + " is required");
    cfg.sweep_values = parse_grid(sw.get("values"), sw.name("values"));
    sw.finish();
    for (std::size_t v : cfg.sweep_values) {
      if (v == 0) throw InvalidArgument(ev.name("sweep") + ": values must be positive");
    }
  }
  if (ev.has("external_predictions")) {
    cfg.external_predictions =
        resolve(config_dir, ev.string_value("external_predictions", ""));
  }
  cfg.write_splits = ev.bool_value("write_splits", false);
  ev.finish();
  if (cfg.classifier.per_class == 0) throw InvalidArgument("evaluation.per_class must be positive");
  if (cfg.trials == 0) throw InvalidArgument("evaluation.trials must be positive");
  if (cfg.classifier.k == 0) throw InvalidArgument("evaluation.knn_k must be positive");
  for (std::size_t n : cfg.n_select_grid) {
    if (n == 0) throw InvalidArgument("evaluation.n_select values must be positive");
  }

  Section out = top.child("output");
  cfg.output_dir = resolve(config_dir, out.string_value("dir", "out"));
  out.finish();

  if (top.has("seed")) {
    const json& v = top.get("seed");
    if (!v.is_number_unsigned()) throw InvalidArgument("config.seed: expected a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  top.finish();

  if (!cfg.cube.empty()) require_file(cfg.cube, "cube");
  if (!cfg.ground_truth.empty()) require_file(cfg.ground_truth, "ground truth");
  if (!cfg.external_predictions.empty()) {
    require_file(cfg.external_predictions, "external predictions");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("config not found: " + path.string());
  const auto dir = std::filesystem::absolute(path).parent_path();
  try {
    return parse_run_config(read_file(path), dir);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const RunConfig& config, bool need_ground_truth) {
  if (config.cube.empty()) throw InvalidArgument("dataset.cube is required");
  HyperCube full = load_cube(config.cube, config.format);

  if (config.exclude_water_bands) {
    const DatasetPreset& p = find_preset(config.preset);
    if (full.bands() != p.raw_bands) {
      throw InvalidArgument("dataset.exclude_bands \"water\" refers to the " +
                            std::to_string(p.raw_bands) + "-band " + p.name + " cube but " +
                            config.cube.string() + " has " + std::to_string(full.bands()) +
                            " bands");
    }
  }
  for (std::size_t b : config.exclude_bands) {
    if (b >= full.bands()) {
      throw InvalidArgument("dataset.exclude_bands: band " + std::to_string(b) +
                            " out of range for " + std::to_string(full.bands()) + " bands");
    }
  }
  std::vector<std::size_t> kept = complement_bands(full.bands(), config.exclude_bands);
  if (kept.empty()) throw InvalidArgument("dataset.exclude_bands removes every band");
  HyperCube cube = kept.size() == full.bands() ? std::move(full) : restrict_bands(full, kept);

  const std::size_t bands = cube.bands();
  for (std::size_t n : config.n_select_grid) {
    if (n > bands) {
      throw InvalidArgument("n_select " + std::to_string(n) + " exceeds the " +
                            std::to_string(bands) + " available bands");
    }
  }
  if (config.n_select > bands) {
    throw InvalidArgument("selector.n_select " + std::to_string(config.n_select) +
                          " exceeds the " + std::to_string(bands) + " available bands");
  }

  std::optional<GroundTruth> gt;
  if (need_ground_truth) {
    if (config.ground_truth.empty()) throw InvalidArgument("dataset.ground_truth is required");
    GroundTruth labels = load_ground_truth(config.ground_truth, cube.width(), cube.height());
    if (!config.classes.empty()) {
      labels = filter_classes(labels, config.classes);
    } else if (config.top_classes != 0) {
      const auto keep = most_populous_classes(labels, config.top_classes);
      labels = filter_classes(labels, keep);
    }
    gt.emplace(std::move(labels));
  }
  return Dataset{std::move(cube), std::move(gt), std::move(kept)};
}

SynthSpec parse_synth_spec(const std::string& text, std::uint64_t* seed) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("synth spec is not valid JSON: ") + e.what());
  }
  SynthSpec spec;
  Section s(root, "synth");
  spec.width = s.size_value("width", spec.width);
  spec.height = s.size_value("height", spec.height);
  spec.classes = s.size_value("classes", spec.classes);
  spec.latent_bands = s.size_value("latent_bands", spec.latent_bands);
  spec.bands = s.size_value("bands", spec.bands);
  spec.mean_low = s.real_value("mean_low", spec.mean_low);
  spec.mean_high = s.real_value("mean_high", spec.mean_high);
  spec.noise_sigma = s.real_value("noise_sigma", spec.noise_sigma);
  spec.band_noise_sigma = s.real_value("band_noise_sigma", spec.band_noise_sigma);
  const std::string mixing = s.string_value("mixing", "duplicate_with_noise");
  if (mixing == "duplicate_with_noise") {
    spec.mixing = MixingMode::duplicate_with_noise;
  } else if (mixing == "random_nonneg_mixing") {
    spec.mixing = MixingMode::random_nonneg_mixing;
  } else {
    throw InvalidArgument(s.name("mixing") +
                          ": expected \"duplicate_with_noise\" or \"random_nonneg_mixing\"");
  }
  if (s.has("class_means")) {
    const json& v = s.get("class_means");
    if (!v.is_array()) throw InvalidArgument(s.name("class_means") + ": expected an array");
    for (const auto& row : v) {
      if (!row.is_array()) throw InvalidArgument(s.name("class_means") + ": expected rows");
      std::vector<double> r;
      for (const auto& e : row) {
        if (!e.is_number()) throw InvalidArgument(s.name("class_means") + ": expected numbers");
        r.push_back(e.get<double>());
      }
      spec.class_means.push_back(std::move(r));
    }
  }
  if (s.has("seed")) {
    const json& v = s.get("seed");
    if (!v.is_number_unsigned()) throw InvalidArgument("synth.seed: expected a non-negative integer");
    if (seed) *seed = v.get<std::uint64_t>();
  }
  s.finish();
  return spec;
}

}  // namespace bandsel
