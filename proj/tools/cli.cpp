#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "despeckle/error.hpp"
#include "despeckle/metrics.hpp"
#include "despeckle/pipeline.hpp"
#include "despeckle/specksim.hpp"

namespace despeckle::cli {
namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string in;
  std::string out;
  std::string ref;
  std::string test;
  std::string kind = "blocks";
  int size = 256;
  int width = 0;
  int height = 0;
  std::uint64_t seed = 0;
  std::string seeds = "1,2,3,4,5";
  std::string mode = "iid";
  std::optional<double> scale;
  double psf_sigma = 2.0;
  int levels = 3;
  double epsilon = 0.1;
  int window = 7;
  int frost_window = 5;
  double damping = 1.0;
  int eq_block = 32;
  double eq_overlap = 0.5;
  int eq_window = 13;
  bool no_equalize = false;
  int maxval = 255;
  bool serial = false;
  bool strict = false;
  std::string config;
};

const CLI::Validator kOddWindow(
    [](std::string& s) -> std::string {
      const int w = std::stoi(s);
      return (w >= 3 && w % 2 == 1) ? "" : "window must be odd and at least 3";
    },
    "ODD>=3");

const CLI::Validator kPowerOfTwo(
    [](std::string& s) -> std::string {
      const int b = std::stoi(s);
      return (b > 0 && (b & (b - 1)) == 0) ? "" : "must be a power of two";
    },
    "POW2");

const CLI::Validator kHalfOpenUnit(
    [](std::string& s) -> std::string {
      const double v = std::stod(s);
      return (v >= 0.0 && v < 1.0) ? "" : "must lie in [0, 1)";
    },
    "[0,1)");

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("--seeds: empty entry in '" + text + "'");
    std::size_t used = 0;
    try {
      seeds.push_back(std::stoull(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError("--seeds: '" + item + "' is not a nonnegative integer");
  }
  if (seeds.empty()) throw UsageError("--seeds: no seeds given");
  return seeds;
}

/// Turns the JSON config into flag tokens placed before the user's own flags,
/// so that flags given on the command line take precedence.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("--config: cannot open " + path);
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::parse_error& e) {
    throw UsageError("--config: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw UsageError("--config: top level must be an object");

  std::vector<std::string> tokens;
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
    } else if (value.is_number() || value.is_string()) {
      tokens.push_back(flag);
      tokens.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + v.dump();
      tokens.push_back(flag);
      tokens.push_back(joined);
    } else {
      throw UsageError("--config: unsupported value for '" + key + "'");
    }
  }
  return tokens;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;
  const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
  if (sub == args.end()) return args;
  std::vector<std::string> out(args.begin(), sub + 1);
  const auto tokens = config_tokens(*path);
  out.insert(out.end(), tokens.begin(), tokens.end());
  out.insert(out.end(), sub + 1, args.end());
  return out;
}

Exec exec_of(const Options& o) { return o.serial ? Exec::serial : Exec::parallel; }

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig cfg;
  cfg.levels = o.levels;
  cfg.window = o.window;
  cfg.enable_equalization = !o.no_equalize;
  cfg.equalizer.epsilon = o.epsilon;
  cfg.equalizer.block = o.eq_block;
  cfg.equalizer.overlap = o.eq_overlap;
  cfg.equalizer.fluctuation_window = o.eq_window;
  cfg.exec = exec_of(o);
  return cfg;
}

SpeckleSpec speckle_spec(const Options& o, std::uint64_t seed) {
  SpeckleSpec spec;
  spec.mode = parse_speckle_mode(o.mode);
  if (o.scale) spec.rayleigh_scale = *o.scale;
  spec.psf_sigma = o.psf_sigma;
  spec.seed = seed;
  return spec;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

void cmd_phantom(const Options& o, std::ostream& out) {
  const int w = o.width > 0 ? o.width : o.size;
  const int h = o.height > 0 ? o.height : o.size;
  const Image img = generate_phantom(w, h, parse_phantom_kind(o.kind));
  const std::size_t clamped = save_image(o.out, img, o.maxval);
  emit(out, {{"command", "phantom"}, {"kind", o.kind}, {"width", w}, {"height", h},
             {"mean", mean(img)}, {"clamped", clamped}, {"out", o.out}});
}

void cmd_speckle(const Options& o, std::ostream& out) {
  const Image img = load_image(o.in);
  const Image noisy = apply_speckle(img, speckle_spec(o, o.seed), exec_of(o));
  const std::size_t clamped = save_image(o.out, noisy, o.maxval);
  emit(out, {{"command", "speckle"}, {"mode", o.mode}, {"seed", o.seed}, {"mean_in", mean(img)},
             {"mean_out", mean(noisy)}, {"clamped", clamped}, {"out", o.out}});
}

void cmd_despeckle(const Options& o, std::ostream& out) {
  const Image img = load_image(o.in);
  const PipelineConfig cfg = pipeline_config(o);
  const DespeckleReport rep = despeckle::despeckle(img, cfg);
  const std::size_t clamped = save_image(o.out, rep.output, o.maxval);
  emit(out, {{"command", "despeckle"}, {"levels", cfg.levels}, {"window", cfg.window},
             {"equalized", cfg.enable_equalization}, {"equalizer_epsilon", rep.equalizer_epsilon},
             {"sigma_n2", rep.sigma_n2}, {"mean_k", rep.mean_k}, {"clamped", clamped}, {"out", o.out}});
}

void cmd_frost(const Options& o, std::ostream& out) {
  const Image img = load_image(o.in);
  const Image res = frost_filter(img, o.frost_window, o.damping, exec_of(o));
  const std::size_t clamped = save_image(o.out, res, o.maxval);
  emit(out, {{"command", "frost"}, {"window", o.frost_window}, {"damping", o.damping},
             {"clamped", clamped}, {"out", o.out}});
}

void cmd_logwav(const Options& o, std::ostream& out) {
  const Image img = load_image(o.in);
  const Image res = log_wavelet_baseline(img, o.levels, exec_of(o));
  const std::size_t clamped = save_image(o.out, res, o.maxval);
  emit(out, {{"command", "logwav"}, {"levels", o.levels}, {"clamped", clamped}, {"out", o.out}});
}

void cmd_metrics(const Options& o, std::ostream& out) {
  const MetricsReport m = evaluate(load_image(o.ref), load_image(o.test));
  emit(out, {{"snr_db", m.snr_db}, {"beta", m.beta}, {"mse", m.mse}});
}

struct BenchRow {
  std::uint64_t seed = 0;
  std::string method;
  double beta = 0.0;
  double snr_db = 0.0;
  double runtime_ms = 0.0;
};

constexpr std::array<const char*, 4> kMethods = {"noisy", "frost", "logwav", "proposed"};

bool cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  const std::vector<std::uint64_t> seeds = parse_seeds(o.seeds);
  const PhantomKind kind = parse_phantom_kind(o.kind);
  const PipelineConfig cfg = pipeline_config(o);
  const Image clean = generate_phantom(o.size, o.size, kind);

  std::vector<BenchRow> rows;
  for (const std::uint64_t seed : seeds) {
    const Image noisy = apply_speckle(clean, speckle_spec(o, seed), cfg.exec);
    for (const char* method : kMethods) {
      const std::string name = method;
      const auto start = std::chrono::steady_clock::now();
      Image result;
      try {
        if (name == "noisy") {
          result = noisy;
        } else if (name == "frost") {
          result = frost_filter(noisy, o.frost_window, o.damping, cfg.exec);
        } else if (name == "logwav") {
          result = log_wavelet_baseline(noisy, cfg.levels, cfg.exec);
        } else {
          result = despeckle::despeckle(noisy, cfg).output;
        }
      } catch (const StageError& e) {
        throw StageError(e.stage(), name + " (seed " + std::to_string(seed) + "): " + e.what());
      }
      const double ms = name == "noisy" ? 0.0 : elapsed_ms(start);
      rows.push_back({seed, name, beta(clean, result), snr_db(clean, result), ms});
    }
  }

  const auto method_rank = [](const std::string& m) {
    return std::find(kMethods.begin(), kMethods.end(), m) - kMethods.begin();
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const BenchRow& a, const BenchRow& b) {
    return a.seed != b.seed ? a.seed < b.seed : method_rank(a.method) < method_rank(b.method);
  });

  std::ostringstream csv;
  csv << "seed,method,beta,snr_db,runtime_ms\n";
  json json_rows = json::array();
  for (const auto& r : rows) {
    csv << r.seed << ',' << r.method << ',' << fmt6(r.beta) << ',' << fmt6(r.snr_db) << ',' << fmt6(r.runtime_ms)
        << '\n';
    json_rows.push_back({{"seed", r.seed}, {"method", r.method}, {"beta", r.beta}, {"snr_db", r.snr_db},
                         {"runtime_ms", r.runtime_ms}});
  }
  if (!o.out.empty()) {
    const std::string text = csv.str();
    write_file(o.out, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }

  json medians = json::object();
  std::array<double, 4> snr{};
  std::array<double, 4> bet{};
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    std::vector<double> s, b, t;
    for (const auto& r : rows) {
      if (r.method != kMethods[m]) continue;
      s.push_back(r.snr_db);
      b.push_back(r.beta);
      t.push_back(r.runtime_ms);
    }
    snr[m] = median(s);
    bet[m] = median(b);
    medians[kMethods[m]] = {{"snr_db", snr[m]}, {"beta", bet[m]}, {"runtime_ms", median(t)}};
  }
  const bool snr_ok = snr[0] < snr[1] && snr[1] < snr[2] && snr[2] <= snr[3];
  const bool beta_ok = std::max(bet[0], bet[1]) < bet[2] && bet[2] <= bet[3];

  emit(out, {{"command", "bench"},
             {"kind", o.kind},
             {"size", o.size},
             {"seeds", seeds},
             {"rows", json_rows},
             {"medians", medians},
             {"ordering", {{"snr", snr_ok}, {"beta", beta_ok}}},
             {"csv", o.out.empty() ? json(nullptr) : json(o.out)}});
  if (!snr_ok) err << "bench: median SNR ordering noisy < frost < logwav <= proposed does not hold\n";
  if (!beta_ok) err << "bench: median beta ordering max(noisy, frost) < logwav <= proposed does not hold\n";
  return snr_ok && beta_ok;
}

// ---------------------------------------------------------------------------

void add_image_io(CLI::App* sub, Options& o) {
  sub->add_option("--in", o.in, "Input image (PGM or DSPK raw)")->required();
  sub->add_option("--out", o.out, "Output image; .pgm writes PGM, anything else DSPK raw")->required();
  sub->add_option("--maxval", o.maxval, "PGM output maxval")->check(CLI::IsMember({255, 65535}));
}

void add_pipeline_flags(CLI::App* sub, Options& o) {
  sub->add_option("--levels", o.levels, "DTCWT levels")->check(CLI::Range(1, 5));
  sub->add_option("--epsilon", o.epsilon, "Equalizer offset")->check(CLI::PositiveNumber);
  sub->add_option("--window", o.window, "Signal-scale window (odd)")->check(kOddWindow);
  sub->add_flag("--no-equalize", o.no_equalize, "Skip spectrum equalization");
  sub->add_option("--eq-block", o.eq_block, "Periodogram block side")->check(kPowerOfTwo);
  sub->add_option("--eq-overlap", o.eq_overlap, "Periodogram block overlap")->check(kHalfOpenUnit);
  sub->add_option("--eq-window", o.eq_window, "Local-mean window for the speckle fluctuation (odd)")->check(kOddWindow);
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON file of flag defaults (flags win)");
  sub->add_flag("--serial", o.serial, "Run kernels on one thread");
}

void add_speckle_flags(CLI::App* sub, Options& o) {
  sub->add_option("--mode", o.mode, "Speckle mode")->check(CLI::IsMember({"iid", "correlated"}));
  sub->add_option("--scale", o.scale, "Rayleigh scale (default sqrt(2/pi), unit mean)")->check(CLI::PositiveNumber);
  sub->add_option("--psf-sigma", o.psf_sigma, "PSF std in pixels (correlated mode)")->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Ultrasound despeckling toolkit", "dspk"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  const auto kinds = CLI::IsMember({"disks", "blocks", "gradient"});

  auto* phantom = app.add_subcommand("phantom", "Generate a test phantom");
  phantom->add_option("--kind", o.kind, "Phantom kind")->check(kinds);
  phantom->add_option("--size", o.size, "Side length")->check(CLI::Range(32, 1 << 15));
  phantom->add_option("--width", o.width, "Width (overrides --size)")->check(CLI::Range(32, 1 << 15));
  phantom->add_option("--height", o.height, "Height (overrides --size)")->check(CLI::Range(32, 1 << 15));
  phantom->add_option("--out", o.out, "Output image")->required();
  phantom->add_option("--maxval", o.maxval, "PGM output maxval")->check(CLI::IsMember({255, 65535}));
  add_common(phantom, o);

  auto* speckle = app.add_subcommand("speckle", "Apply multiplicative speckle");
  add_image_io(speckle, o);
  speckle->add_option("--seed", o.seed, "PRNG seed");
  add_speckle_flags(speckle, o);
  add_common(speckle, o);

  auto* desp = app.add_subcommand("despeckle", "Run the adaptive despeckling pipeline");
  add_image_io(desp, o);
  add_pipeline_flags(desp, o);
  add_common(desp, o);

  auto* frost = app.add_subcommand("frost", "Frost filter baseline");
  add_image_io(frost, o);
  frost->add_option("--window", o.frost_window, "Window side (odd)")->check(kOddWindow);
  frost->add_option("--damping", o.damping, "Damping factor")->check(CLI::PositiveNumber);
  add_common(frost, o);

  auto* logwav = app.add_subcommand("logwav", "Log-wavelet soft-threshold baseline");
  add_image_io(logwav, o);
  logwav->add_option("--levels", o.levels, "DTCWT levels")->check(CLI::Range(1, 5));
  add_common(logwav, o);

  auto* metrics = app.add_subcommand("metrics", "SNR, beta and MSE of a test image against a reference");
  metrics->add_option("--ref", o.ref, "Reference image")->required();
  metrics->add_option("--test", o.test, "Test image")->required();
  add_common(metrics, o);

  auto* bench = app.add_subcommand("bench", "Compare all methods on simulated speckle");
  bench->add_option("--kind", o.kind, "Phantom kind")->check(kinds);
  bench->add_option("--size", o.size, "Phantom side length")->check(CLI::Range(32, 1 << 15));
  bench->add_option("--seeds", o.seeds, "Comma-separated seeds");
  bench->add_option("--out", o.out, "CSV output path");
  bench->add_option("--frost-window", o.frost_window, "Frost window side (odd)")->check(kOddWindow);
  bench->add_option("--damping", o.damping, "Frost damping")->check(CLI::PositiveNumber);
  bench->add_flag("--strict", o.strict, "Exit 1 when the median ordering does not hold");
  add_speckle_flags(bench, o);
  add_pipeline_flags(bench, o);
  add_common(bench, o);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (phantom->parsed()) cmd_phantom(o, out);
    if (speckle->parsed()) cmd_speckle(o, out);
    if (desp->parsed()) cmd_despeckle(o, out);
    if (frost->parsed()) cmd_frost(o, out);
    if (logwav->parsed()) cmd_logwav(o, out);
    if (metrics->parsed()) cmd_metrics(o, out);
    if (bench->parsed()) {
      const bool ordered = cmd_bench(o, out, err);
      if (o.strict && !ordered) return kProcessingError;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const StageError& e) {
    err << "error in stage " << e.stage() << ": " << e.what() << '\n';
    return kProcessingError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kProcessingError;
  }
  return kOk;
}

}  // namespace despeckle::cli
