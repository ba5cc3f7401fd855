#include "bandsel/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bandsel/baselines.hpp"
#include "bandsel/config.hpp"
#include "bandsel/cube_io.hpp"
#include "bandsel/error.hpp"
#include "bandsel/eval.hpp"
#include "bandsel/file_util.hpp"
#include "bandsel/sparse_select.hpp"
#include "bandsel/synth.hpp"

namespace bandsel {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Collects every file a command writes so a failure part-way through can
// remove what was already produced.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  fs::path write(const std::string& name, const std::string& contents) {
    const fs::path path = dir_ / name;
    written_.push_back(path);
    write_file_atomic(path, contents);
    return path;
  }

  void rollback() noexcept {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
      fs::remove(fs::path(p.string() + ".tmp"), ec);
    }
    written_.clear();
  }

  // Registers a file produced by another atomic writer.
  fs::path adopt(const std::string& name) {
    written_.push_back(dir_ / name);
    return written_.back();
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

template <typename F>
void with_outputs(OutputSet& outputs, F&& body) {
  try {
    body();
  } catch (...) {
    outputs.rollback();
    throw;
  }
}

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

RunConfig load_with_overrides(const CommonOptions& opts) {
  if (opts.config.empty()) throw InvalidArgument("--config is required");
  RunConfig cfg = load_run_config(opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  return cfg;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

ordered_json band_list(const std::vector<std::size_t>& indices) {
  ordered_json a = ordered_json::array();
  for (std::size_t i : indices) a.push_back(i);
  return a;
}

BandMatrix baseline_pixels(const HyperCube& cube, const eval::SelectorConfig& sel,
                           std::uint64_t seed) {
  if (sel.baseline_pixels == eval::BaselinePixels::full) return flatten(cube);
  if (sel.n_pixels > cube.pixels()) {
    throw InvalidArgument("n_pixels " + std::to_string(sel.n_pixels) + " exceeds the " +
                          std::to_string(cube.pixels()) + " pixels of the cube");
  }
  return gather_pixels(cube, sample_pixel_indices(cube.pixels(), sel.n_pixels, seed));
}

void check_selector(const eval::SelectorConfig& sel, const HyperCube& cube) {
  if (sel.n_pixels > cube.pixels()) {
    throw InvalidArgument("selector.n_pixels " + std::to_string(sel.n_pixels) +
                          " exceeds the " + std::to_string(cube.pixels()) + " pixels of the cube");
  }
  if (sel.method == eval::SelectorMethod::mdsr && sel.n_pixels >= cube.bands()) {
    throw NotOvercomplete("selector.n_pixels = " + std::to_string(sel.n_pixels) +
                          " must be less than the band count " + std::to_string(cube.bands()));
  }
}

void check_classes(const GroundTruth& gt, const eval::ClassifierConfig& classifier) {
  const auto counts = gt.class_counts();
  if (counts.empty()) throw InvalidArgument("ground truth has no labeled pixels");
  for (const auto& [label, count] : counts) {
    if (count <= classifier.per_class) {
      throw InsufficientClassSamples(
          label, "class " + std::to_string(label) + " has " + std::to_string(count) +
                     " labeled pixels; need more than " + std::to_string(classifier.per_class));
    }
  }
}

// ---- select -------------------------------------------------------------

int cmd_select(const CommonOptions& opts, std::ostream& out) {
  const RunConfig cfg = load_with_overrides(opts);
  const Dataset data = load_dataset(cfg, false);
  const HyperCube& cube = data.cube;
  check_selector(cfg.selector, cube);

  sparse::SelectionResult result;
  switch (cfg.selector.method) {
    case eval::SelectorMethod::mdsr: {
      sparse::MdsrConfig m;
      m.n_pixels = cfg.selector.n_pixels;
      m.k0 = cfg.selector.k0;
      m.n_select = cfg.n_select;
      m.tol = cfg.selector.tol;
      m.weighting = cfg.selector.weighting;
      m.seed = cfg.seed;
      result = sparse::mdsr_select(cube, m);
      break;
    }
    case eval::SelectorMethod::lp:
    case eval::SelectorMethod::osp:
    case eval::SelectorMethod::cluster: {
      const BandMatrix bm = baseline_pixels(cube, cfg.selector, cfg.seed);
      baselines::BaselineConfig b;
      b.method = baselines::parse_method(eval::to_string(cfg.selector.method));
      b.n_select = cfg.n_select;
      b.seed = cfg.seed;
      result.method = eval::to_string(cfg.selector.method);
      result.selected = baselines::run_selector(bm, b);
      result.n_pixels = bm.rows();
      result.seed = cfg.seed;
      break;
    }
    case eval::SelectorMethod::pca:
    case eval::SelectorMethod::all_bands:
      throw InvalidArgument(std::string("select: '") + eval::to_string(cfg.selector.method) +
                            "' does not select bands (use mdsr, lp, osp or cluster)");
  }

  ordered_json j = ordered_json::parse(sparse::to_json(result));
  const bool excluded = data.kept_bands.size() != cube.bands() ||
                        !cfg.exclude_bands.empty();
  if (excluded) {
    std::vector<std::size_t> source;
    for (std::size_t b : result.selected) source.push_back(data.kept_bands[b]);
    j["source_bands"] = band_list(source);
  }

  OutputSet outputs(cfg.output_dir);
  fs::path written;
  with_outputs(outputs, [&] { written = outputs.write("selection.json", j.dump(2) + "\n"); });

  out << "# " << result.method << ": " << result.selected.size() << " of " << cube.bands()
      << " bands; band numbers are 1-based (" << written.string() << " is 0-based)\n";
  out << pad("rank", 6) << pad("band", 6);
  if (excluded) out << pad("source", 8);
  out << "weight\n";
  for (std::size_t r = 0; r < result.selected.size(); ++r) {
    const std::size_t b = result.selected[r];
    out << pad(std::to_string(r + 1), 6) << pad(std::to_string(b + 1), 6);
    if (excluded) out << pad(std::to_string(data.kept_bands[b] + 1), 8);
    out << (result.weights.empty() ? std::string("-") : fixed(result.weights[b], 4)) << "\n";
  }
  return 0;
}

// ---- evaluate / compare ---------------------------------------------------

struct Run {
  eval::SelectorConfig selector;
  std::string tag;  // empty for a single run
};

std::vector<Run> expand_sweep(const RunConfig& cfg, const eval::SelectorConfig& base) {
  if (cfg.sweep == SweepParameter::none) return {{base, ""}};
  std::vector<Run> runs;
  for (std::size_t v : cfg.sweep_values) {
    Run r{base, ""};
    if (cfg.sweep == SweepParameter::n_pixels) {
      r.selector.n_pixels = v;
      r.tag = "n_pixels_" + std::to_string(v);
    } else {
      r.selector.k0 = v;
      r.tag = "k0_" + std::to_string(v);
    }
    runs.push_back(r);
  }
  return runs;
}

std::string split_csv(const eval::LabeledSplit& split) {
  std::string s = "pixel_index,role\n";
  std::vector<std::pair<std::size_t, const char*>> rows;
  for (std::size_t p : split.train_indices) rows.emplace_back(p, "train");
  for (std::size_t p : split.test_indices) rows.emplace_back(p, "test");
  std::sort(rows.begin(), rows.end());
  for (const auto& [p, role] : rows) s += std::to_string(p) + "," + role + "\n";
  return s;
}

void print_aggregates(std::ostream& out, const eval::EvaluationReport& report) {
  for (const auto& a : report.aggregates) {
    out << pad(report.method, 9) << pad("n=" + std::to_string(a.n_select), 7)
        << pad("N=" + std::to_string(report.selector.n_pixels), 7)
        << pad("K0=" + std::to_string(report.selector.k0), 7) << "OCA "
        << fixed(100.0 * a.mean_oca, 2) << " +/- " << fixed(100.0 * a.std_oca, 2)
        << "  kappa " << fixed(a.mean_kappa, 4) << "\n";
  }
}

int cmd_external(const RunConfig& cfg, const GroundTruth& gt, std::ostream& out) {
  const auto split = eval::stratified_split(gt, cfg.classifier.per_class, cfg.seed);
  const auto predictions = eval::load_predictions_csv(cfg.external_predictions, split);
  const auto score = eval::evaluate_predictions(gt, split, predictions);

  ordered_json j;
  j["predictions"] = cfg.external_predictions.string();
  j["seed"] = cfg.seed;
  j["per_class"] = cfg.classifier.per_class;
  j["n_test"] = split.test_indices.size();
  j["oca"] = score.oca;
  j["kappa"] = score.kappa;
  j["classes"] = score.confusion.classes();
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < score.confusion.size(); ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < score.confusion.size(); ++c) row.push_back(score.confusion.at(r, c));
    rows.push_back(row);
  }
  j["confusion"] = rows;

  OutputSet outputs(cfg.output_dir);
  with_outputs(outputs, [&] { outputs.write("external.json", j.dump(2) + "\n"); });
  out << "external predictions: OCA " << fixed(100.0 * score.oca, 2) << "  kappa "
      << fixed(score.kappa, 4) << "  (" << split.test_indices.size() << " test pixels)\n";
  return 0;
}

int cmd_evaluate(const CommonOptions& opts, std::ostream& out) {
  const RunConfig cfg = load_with_overrides(opts);
  const Dataset data = load_dataset(cfg, true);
  const GroundTruth& gt = *data.ground_truth;
  check_classes(gt, cfg.classifier);
  if (!cfg.external_predictions.empty()) return cmd_external(cfg, gt, out);

  const auto runs = expand_sweep(cfg, cfg.selector);
  for (const auto& r : runs) check_selector(r.selector, data.cube);

  std::vector<eval::EvaluationReport> reports;
  for (const auto& r : runs) {
    reports.push_back(eval::run_trials(data.cube, gt, r.selector, cfg.n_select_grid,
                                       cfg.classifier, cfg.trials, cfg.seed));
  }

  std::string trials_csv = eval::report_csv_header();
  std::string aggregate_csv = eval::aggregate_csv_header();
  for (const auto& rep : reports) {
    trials_csv += eval::report_csv_rows(rep);
    aggregate_csv += eval::aggregate_csv_rows(rep);
  }

  OutputSet outputs(cfg.output_dir);
  with_outputs(outputs, [&] {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::string name = runs[i].tag.empty() ? "report.json" : "report_" + runs[i].tag + ".json";
      outputs.write(name, eval::report_to_json(reports[i]));
    }
    outputs.write("trials.csv", trials_csv);
    outputs.write("aggregate.csv", aggregate_csv);
    if (cfg.write_splits) {
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto split = eval::stratified_split(gt, cfg.classifier.per_class, cfg.seed + t);
        outputs.write("splits/trial_" + std::to_string(t) + ".csv", split_csv(split));
      }
    }
  });

  out << "# mean over " << cfg.trials << " trials; outputs in " << cfg.output_dir.string() << "\n";
  for (const auto& rep : reports) print_aggregates(out, rep);
  return 0;
}

int cmd_compare(const CommonOptions& opts, std::ostream& out) {
  const RunConfig cfg = load_with_overrides(opts);
  if (cfg.sweep != SweepParameter::none) {
    throw InvalidArgument("compare does not take evaluation.sweep; use evaluate per method");
  }
  if (cfg.methods.empty()) throw InvalidArgument("evaluation.methods is empty");
  const Dataset data = load_dataset(cfg, true);
  const GroundTruth& gt = *data.ground_truth;
  check_classes(gt, cfg.classifier);
  for (auto m : cfg.methods) {
    eval::SelectorConfig sel = cfg.selector;
    sel.method = m;
    check_selector(sel, data.cube);
  }

  std::vector<eval::EvaluationReport> reports;
  ordered_json timings = ordered_json::object();
  for (auto m : cfg.methods) {
    eval::SelectorConfig sel = cfg.selector;
    sel.method = m;
    const auto start = std::chrono::steady_clock::now();
    reports.push_back(eval::run_trials(data.cube, gt, sel, cfg.n_select_grid, cfg.classifier,
                                       cfg.trials, cfg.seed));
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    timings[eval::to_string(m)] = took.count();
  }

  std::string aggregate_csv = eval::aggregate_csv_header();
  std::string trials_csv = eval::report_csv_header();
  for (const auto& rep : reports) {
    aggregate_csv += eval::aggregate_csv_rows(rep);
    trials_csv += eval::report_csv_rows(rep);
  }
  ordered_json timing_doc;
  timing_doc["unit"] = "seconds";
  timing_doc["trials"] = cfg.trials;
  timing_doc["grid_size"] = cfg.n_select_grid.size();
  timing_doc["methods"] = timings;

  OutputSet outputs(cfg.output_dir);
  with_outputs(outputs, [&] {
    for (const auto& rep : reports) outputs.write("report_" + rep.method + ".json", eval::report_to_json(rep));
    outputs.write("compare.csv", aggregate_csv);
    outputs.write("compare_trials.csv", trials_csv);
    outputs.write("timings.json", timing_doc.dump(2) + "\n");
  });

  out << "# mean over " << cfg.trials << " trials; outputs in " << cfg.output_dir.string() << "\n";
  for (const auto& rep : reports) print_aggregates(out, rep);
  return 0;
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const CommonOptions& opts, std::ostream& out) {
  if (opts.config.empty()) throw InvalidArgument("--config is required");
  if (!fs::exists(opts.config)) throw IoError("synth spec not found: " + opts.config);
  std::uint64_t seed = 0;
  const SynthSpec spec = parse_synth_spec(read_file(opts.config), &seed);
  if (opts.seed) seed = *opts.seed;
  const fs::path dir = opts.out_dir.empty() ? fs::path("out") : fs::path(opts.out_dir);

  const SynthCube s = synth_cube(spec, seed);

  ordered_json meta;
  meta["seed"] = seed;
  meta["width"] = spec.width;
  meta["height"] = spec.height;
  meta["bands"] = spec.bands;
  meta["classes"] = spec.classes;
  meta["latent_bands"] = spec.latent_bands;
  meta["mixing"] = spec.mixing == MixingMode::duplicate_with_noise ? "duplicate_with_noise"
                                                                   : "random_nonneg_mixing";
  meta["noise_sigma"] = spec.noise_sigma;
  meta["band_noise_sigma"] = spec.band_noise_sigma;
  ordered_json counts = ordered_json::object();
  for (const auto& [label, count] : s.ground_truth.class_counts()) counts[std::to_string(label)] = count;
  meta["class_counts"] = counts;
  if (!s.generator_of_band.empty()) meta["generator_of_band"] = band_list(s.generator_of_band);
  meta["cube"] = "synth.cube";
  meta["ground_truth"] = "synth_gt.csv";

  OutputSet outputs(dir);
  with_outputs(outputs, [&] {
    save_container(s.cube, outputs.adopt("synth.cube"));
    save_ground_truth_csv(s.ground_truth, outputs.adopt("synth_gt.csv"));
    outputs.write("synth.json", meta.dump(2) + "\n");
  });

  out << "synthetic cube " << spec.width << "x" << spec.height << "x" << spec.bands << ", "
      << spec.classes << " classes, seed " << seed << " -> " << (dir / "synth.cube").string()
      << "\n";
  return 0;
}

// ---- inspect --------------------------------------------------------------

int cmd_inspect(const std::string& cube_arg, const std::string& format_arg,
                const CommonOptions& opts, std::ostream& out) {
  fs::path path;
  CubeFormat format = parse_cube_format(format_arg);
  if (!cube_arg.empty()) {
    path = cube_arg;
  } else if (!opts.config.empty()) {
    const RunConfig cfg = load_run_config(opts.config);
    if (cfg.cube.empty()) throw InvalidArgument("dataset.cube is required");
    path = cfg.cube;
    if (format_arg.empty()) format = cfg.format;
  } else {
    throw InvalidArgument("inspect needs --cube or --config");
  }

  const RawCube raw = read_cube_raw(path, format);
  const std::size_t pixels = raw.width * raw.height;
  std::size_t non_finite_total = 0;
  std::ostringstream rows;
  for (std::size_t b = 0; b < raw.bands; ++b) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    std::size_t finite = 0;
    for (std::size_t p = 0; p < pixels; ++p) {
      const double v = raw.samples[b * pixels + p];
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      ++finite;
    }
    const std::size_t bad = pixels - finite;
    non_finite_total += bad;
    rows << pad(std::to_string(b + 1), 6);
    if (!raw.wavelengths.empty()) rows << pad(fixed(raw.wavelengths[b], 2), 11);
    if (finite) {
      rows << pad(fixed(lo, 6), 14) << pad(fixed(hi, 6), 14)
           << pad(fixed(sum / static_cast<double>(finite), 6), 14);
    } else {
      rows << pad("-", 14) << pad("-", 14) << pad("-", 14);
    }
    rows << bad << "\n";
  }

  out << "cube: " << path.string() << "\n";
  out << "width " << raw.width << "  height " << raw.height << "  bands " << raw.bands
      << "  pixels " << pixels << "\n";
  out << "non-finite samples: " << non_finite_total
      << (non_finite_total ? "  (NaN/Inf present; load_cube will reject this cube)" : "")
      << "\n";
  out << "# bands are 1-based\n";
  out << pad("band", 6);
  if (!raw.wavelengths.empty()) out << pad("wavelength", 11);
  out << pad("min", 14) << pad("max", 14) << pad("mean", 14) << "non_finite\n";
  out << rows.str();
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unsupervised hyperspectral band selection and evaluation", "bandsel"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string cube_arg, format_arg;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Configuration file (JSON)");
    sub->add_option("--seed", opts.seed, "Base seed, overriding the config");
    sub->add_option("--out", opts.out_dir, "Output directory, overriding the config");
  };
  CLI::App* select = app.add_subcommand("select", "Rank bands and write selection.json");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Classification trials for one method");
  CLI::App* compare = app.add_subcommand("compare", "Run several methods on identical splits");
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic cube from a spec file");
  CLI::App* inspect = app.add_subcommand("inspect", "Summarize a cube file");
  for (CLI::App* sub : {select, evaluate, compare, synth}) add_common(sub);
  inspect->add_option("--cube", cube_arg, "Cube file (container, ENVI .hdr or data)");
  inspect->add_option("--format", format_arg, "container | envi | auto");
  inspect->add_option("--config", opts.config, "Take the cube from a run configuration");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*select) return cmd_select(opts, out);
    if (*evaluate) return cmd_evaluate(opts, out);
    if (*compare) return cmd_compare(opts, out);
    if (*synth) return cmd_synth(opts, out);
    if (*inspect) return cmd_inspect(cube_arg, format_arg, opts, out);
  } catch (const Error& e) {
    err << "bandsel: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "bandsel: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace bandsel
