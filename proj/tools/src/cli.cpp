#include "cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "granusense/errors.hpp"
#include "granusense/io.hpp"
#include "granusense/rng.hpp"

namespace granusense::cli {

namespace {

std::string fmt_g(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double_cfg(const std::string& value, const std::string& key,
                        int line) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (value.empty() || end != begin + value.size() || !std::isfinite(v))
    throw ConfigError("malformed number for " + key + ": '" + value + "'",
                      line);
  return v;
}

long long parse_int_cfg(const std::string& value, const std::string& key,
                        int line) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (value.empty() || end != begin + value.size() || errno == ERANGE)
    throw ConfigError("malformed integer for " + key + ": '" + value + "'",
                      line);
  return v;
}

std::uint64_t parse_seed_cfg(const std::string& value, const std::string& key,
                             int line) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (value.empty() || value[0] == '-' || end != begin + value.size() ||
      errno == ERANGE)
    throw ConfigError("malformed seed for " + key + ": '" + value + "'",
                      line);
  return v;
}

bool parse_bool_cfg(const std::string& value, const std::string& key,
                    int line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("expected true/false for " + key + ": '" + value + "'",
                    line);
}

std::vector<double> parse_list_cfg(const std::string& value,
                                   const std::string& key, int line) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("empty element in list for " + key, line);
    out.push_back(parse_double_cfg(item, key, line));
  }
  if (out.empty()) throw ConfigError("empty list for " + key, line);
  return out;
}

void require(bool ok, const std::string& message, int line) {
  if (!ok) throw ConfigError(message, line);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string entry = trim(raw);
    if (entry.empty()) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + entry + "'", line);
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line);
    if (value.empty()) throw ConfigError("missing value for " + key, line);

    harness::GenerateOptions& gen = cfg.generate;
    if (key == "seed") {
      cfg.seed = parse_seed_cfg(value, key, line);
    } else if (key == "threads") {
      const long long v = parse_int_cfg(value, key, line);
      require(v >= 0, "threads must be >= 0", line);
      gen.threads = static_cast<int>(v);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "test_fraction") {
      cfg.test_fraction = parse_double_cfg(value, key, line);
      require(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0,
              "test_fraction must lie inside (0, 1)", line);
    } else if (key == "holdout_extras") {
      const long long v = parse_int_cfg(value, key, line);
      require(v >= 0, "holdout_extras must be >= 0", line);
      cfg.holdout_extras = static_cast<int>(v);
    } else if (key == "eval_seen") {
      cfg.eval_seen = parse_bool_cfg(value, key, line);
    } else if (key == "eval_holdout") {
      cfg.eval_holdout = parse_bool_cfg(value, key, line);
    } else if (key == "oracle_features") {
      cfg.oracle_features = parse_bool_cfg(value, key, line);
    } else if (key == "ablation_rates_hz") {
      cfg.ablation_rates_hz = parse_list_cfg(value, key, line);
      for (double r : cfg.ablation_rates_hz)
        require(r > 0.0, "ablation rates must be positive", line);
    } else if (key == "humidity_levels_ml") {
      cfg.humidity_levels_ml = parse_list_cfg(value, key, line);
      for (double l : cfg.humidity_levels_ml)
        require(l >= 0.0, "humidity levels must be >= 0", line);
    } else if (key == "humidity_trials") {
      const long long v = parse_int_cfg(value, key, line);
      require(v > 0, "humidity_trials must be positive", line);
      cfg.humidity_trials = static_cast<int>(v);
    } else if (key == "heights_mm") {
      gen.heights_mm = parse_list_cfg(value, key, line);
      for (double h : gen.heights_mm)
        require(h > 0.0, "fill heights must be positive", line);
    } else if (key == "repeats") {
      const long long v = parse_int_cfg(value, key, line);
      require(v > 0, "repeats must be positive", line);
      gen.repeats = static_cast<int>(v);
    } else if (key == "container_width_mm") {
      gen.container.inner_width_mm = parse_double_cfg(value, key, line);
      require(gen.container.inner_width_mm > 0.0,
              "container_width_mm must be positive", line);
    } else if (key == "container_depth_mm") {
      gen.container.inner_depth_mm = parse_double_cfg(value, key, line);
      require(gen.container.inner_depth_mm > 0.0,
              "container_depth_mm must be positive", line);
    } else if (key == "container_height_mm") {
      gen.container.inner_height_mm = parse_double_cfg(value, key, line);
      require(gen.container.inner_height_mm > 0.0,
              "container_height_mm must be positive", line);
    } else if (key == "container_mass_g") {
      gen.container.container_mass_g = parse_double_cfg(value, key, line);
      require(gen.container.container_mass_g > 0.0,
              "container_mass_g must be positive", line);
    } else if (key == "grasp_height_mm") {
      gen.container.grasp_height_mm = parse_double_cfg(value, key, line);
      require(gen.container.grasp_height_mm > 0.0,
              "grasp_height_mm must be positive", line);
    } else if (key == "gravity_g") {
      gen.container.gravity_m_s2 = parse_double_cfg(value, key, line);
      require(gen.container.gravity_m_s2 > 0.0, "gravity_g must be positive",
              line);
    } else if (key == "lift_noise_sigma_n") {
      gen.lift_noise_sigma_n = parse_double_cfg(value, key, line);
      require(gen.lift_noise_sigma_n >= 0.0,
              "lift_noise_sigma_n must be >= 0", line);
    } else if (key == "tilt_noise_sigma_nm") {
      gen.tilt_noise_sigma_nm = parse_double_cfg(value, key, line);
      require(gen.tilt_noise_sigma_nm >= 0.0,
              "tilt_noise_sigma_nm must be >= 0", line);
    } else if (key == "slow_rate_deg_s") {
      gen.slow.rate_deg_s = parse_double_cfg(value, key, line);
      require(gen.slow.rate_deg_s > 0.0, "slow_rate_deg_s must be positive",
              line);
    } else if (key == "slow_readout_hz") {
      gen.slow.readout_hz = parse_double_cfg(value, key, line);
      require(gen.slow.readout_hz > 0.0, "slow_readout_hz must be positive",
              line);
    } else if (key == "slow_kappa") {
      gen.slow.kappa = parse_double_cfg(value, key, line);
      require(gen.slow.kappa > 0.0, "slow_kappa must be positive", line);
    } else if (key == "slow_noise_sigma") {
      gen.slow.noise_sigma = parse_double_cfg(value, key, line);
      require(gen.slow.noise_sigma >= 0.0, "slow_noise_sigma must be >= 0",
              line);
    } else if (key == "slow_start_deg") {
      gen.slow_start_deg = parse_double_cfg(value, key, line);
    } else if (key == "slow_end_deg") {
      gen.slow_end_deg = parse_double_cfg(value, key, line);
    } else if (key == "vib_window_s") {
      gen.vib.window_s = parse_double_cfg(value, key, line);
      require(gen.vib.window_s > 0.0, "vib_window_s must be positive", line);
    } else if (key == "vib_sample_rate_hz") {
      gen.vib.sample_rate_hz = parse_double_cfg(value, key, line);
      require(gen.vib.sample_rate_hz > 0.0,
              "vib_sample_rate_hz must be positive", line);
    } else if (key == "marker_noise_sigma_mm") {
      gen.vib.marker_noise_sigma_mm = parse_double_cfg(value, key, line);
      require(gen.vib.marker_noise_sigma_mm >= 0.0,
              "marker_noise_sigma_mm must be >= 0", line);
    } else if (key == "jump_threshold_sigmas") {
      gen.jump_threshold_sigmas = parse_double_cfg(value, key, line);
      require(gen.jump_threshold_sigmas > 0.0,
              "jump_threshold_sigmas must be positive", line);
    } else {
      throw ConfigError("unknown key: " + key, line);
    }
  }
  return cfg;
}

std::string usage() {
  return
      "usage: granusense [--config <path>] [--seed <u64>] [--out <dir>] "
      "<command> [args]\n"
      "commands:\n"
      "  catalog                                list the particle catalog\n"
      "  simulate                               generate the full dataset\n"
      "  train                                  fit and save all estimators\n"
      "  eval                                   seen and holdout reports\n"
      "  ablate-rate                            sensor-rate comparison\n"
      "  humidity                               moisture study reports\n"
      "  trace <particle> <height_mm> <procedure>\n"
      "                                         export one raw trace\n"
      "                                         (slow-rotation | fast-rotation)\n";
}

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  if (dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

void ensure_out_dir(const std::string& dir) {
  if (dir.empty() || dir == ".") return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir);
}

std::uint64_t stream_seed(const RunConfig& cfg, const std::string& stream) {
  return Rng(cfg.seed).derive(stream).seed();
}

harness::Dataset load_dataset(const RunConfig& cfg) {
  return io::read_dataset(join_path(cfg.out_dir, "dataset.txt"));
}

int cmd_catalog(const RunConfig& cfg) {
  for (const domain::ParticleSpec& spec :
       harness::generate_catalog(cfg.seed)) {
    std::cout << spec.name << ' ' << fmt_g(spec.diameter_dp_mm) << ' '
              << fmt_g(spec.sphericity_psi) << ' '
              << fmt_g(spec.material_density_g_mm3) << ' '
              << static_cast<int>(domain::shape_class(spec.diameter_dp_mm,
                                                      spec.sphericity_psi))
              << '\n';
  }
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  const std::vector<domain::ParticleSpec> catalog =
      harness::generate_catalog(cfg.seed);
  const harness::Dataset dataset =
      harness::generate_dataset(catalog, cfg.seed, cfg.generate);
  ensure_out_dir(cfg.out_dir);
  const std::string path = join_path(cfg.out_dir, "dataset.txt");
  io::write_dataset(path, dataset);
  std::cout << "wrote " << dataset.records.size() << " records ("
            << dataset.spills.size() << " height-reduced) to " << path
            << '\n';
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  const harness::Dataset dataset = load_dataset(cfg);
  const harness::SplitResult split = harness::split_random(
      dataset.records, cfg.test_fraction, stream_seed(cfg, "split-seen"));
  const harness::PipelineOutput po = harness::train_and_evaluate(
      split.train, split.test, cfg.seed, "seen", cfg.generate.container,
      cfg.oracle_features);
  ensure_out_dir(cfg.out_dir);
  io::write_mlp(join_path(cfg.out_dir, "model-height.txt"), po.models.height);
  io::write_mlp(join_path(cfg.out_dir, "model-size.txt"), po.models.size);
  io::write_forest(join_path(cfg.out_dir, "model-shape.txt"),
                   po.models.shape);
  std::cout << "trained on " << split.train.size() << " records; height MAE "
            << fmt_g(po.report.quantity("fill_height_mm").mae)
            << " mm, size MAE "
            << fmt_g(po.report.quantity("particle_diameter_mm").mae)
            << " mm, shape accuracy " << fmt_g(po.report.shape_accuracy)
            << '\n';
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  const harness::Dataset dataset = load_dataset(cfg);
  ensure_out_dir(cfg.out_dir);
  if (cfg.eval_seen) {
    const harness::SplitResult split = harness::split_random(
        dataset.records, cfg.test_fraction, stream_seed(cfg, "split-seen"));
    const harness::PipelineOutput po = harness::train_and_evaluate(
        split.train, split.test, cfg.seed, "seen", cfg.generate.container,
        cfg.oracle_features);
    const std::string path = join_path(cfg.out_dir, "report-seen.txt");
    io::write_report(path, po.report,
                     {"seen split: random " +
                      std::to_string(split.train.size()) + "/" +
                      std::to_string(split.test.size())});
    std::cout << "wrote " << path << '\n';
  }
  if (cfg.eval_holdout) {
    const harness::SplitResult split = harness::split_holdout(
        dataset.records, harness::default_holdout_names(),
        cfg.holdout_extras, cfg.seed, cfg.generate);
    const harness::PipelineOutput po = harness::train_and_evaluate(
        split.train, split.test, cfg.seed, "holdout", cfg.generate.container,
        cfg.oracle_features);
    const std::string path = join_path(cfg.out_dir, "report-holdout.txt");
    io::write_report(
        path, po.report,
        {"holdout split: " + std::to_string(split.train.size()) + "/" +
             std::to_string(split.test.size()),
         "holdout extra fill heights drawn uniformly from [25, 75] mm "
         "(design choice)"});
    std::cout << "wrote " << path << '\n';
  }
  return 0;
}

int cmd_ablate_rate(const RunConfig& cfg) {
  const harness::Dataset dataset = load_dataset(cfg);
  const harness::AblationResult result = harness::ablation_rate(
      dataset, cfg.ablation_rates_hz, cfg.seed, cfg.generate);
  ensure_out_dir(cfg.out_dir);
  for (const harness::AblationArm& arm : result.arms) {
    const std::string path = join_path(
        cfg.out_dir, "report-ablate-" + fmt_g(arm.rate_hz) + "hz.txt");
    io::write_report(path, arm.report,
                     {"vibration features recomputed at " +
                      fmt_g(arm.rate_hz) + " Hz"});
    std::cout << fmt_g(arm.rate_hz) << " Hz: size MAE "
              << fmt_g(arm.size_mae_mm) << " mm, shape accuracy "
              << fmt_g(arm.shape_accuracy) << " -> " << path << '\n';
  }
  return 0;
}

int cmd_humidity(const RunConfig& cfg) {
  const harness::HumidityOutcome outcome = harness::humidity_experiment(
      cfg.humidity_levels_ml, cfg.humidity_trials, cfg.seed, cfg.generate);
  ensure_out_dir(cfg.out_dir);
  const std::string seen_path =
      join_path(cfg.out_dir, "report-humidity-seen.txt");
  io::write_report(seen_path, outcome.seen,
                   {"random 80/20 split over all humidity trials"});
  const std::string interp_path =
      join_path(cfg.out_dir, "report-humidity-interp.txt");
  io::write_report(interp_path, outcome.interpolation,
                   {"trained on outer humidity levels, tested in between"});
  std::cout << "humidity MAE: seen "
            << fmt_g(outcome.seen.quantity("humidity_ml").mae)
            << " ml, interpolation "
            << fmt_g(outcome.interpolation.quantity("humidity_ml").mae)
            << " ml\n";
  return 0;
}

int cmd_trace(const RunConfig& cfg, const std::vector<std::string>& args,
              std::ostream& err) {
  if (args.size() != 3) {
    err << "trace needs <particle> <height_mm> <procedure>\n" << usage();
    return 2;
  }
  const std::string& name = args[0];
  const char* begin = args[1].c_str();
  char* end = nullptr;
  const double height = std::strtod(begin, &end);
  if (end != begin + args[1].size() || !(height > 0.0)) {
    err << "invalid height: " << args[1] << '\n';
    return 2;
  }
  const std::string& procedure = args[2];
  if (procedure != "slow-rotation" && procedure != "fast-rotation") {
    err << "unknown procedure: " << procedure
        << " (expected slow-rotation or fast-rotation)\n";
    return 2;
  }

  const std::vector<domain::ParticleSpec> catalog =
      harness::generate_catalog(cfg.seed);
  const domain::ParticleSpec* particle = nullptr;
  for (const domain::ParticleSpec& spec : catalog)
    if (spec.name == name) particle = &spec;
  if (!particle) throw DomainError("unknown particle: " + name);

  // Same seed path as dataset repeat 0, so traces of catalog heights match
  // the corresponding dataset records.
  const std::uint64_t cell_seed = stream_seed(
      cfg, "cell-" + name + "-" + fmt_g(height) + "-0");
  const domain::ContentFill fill{*particle, height};
  ensure_out_dir(cfg.out_dir);
  const std::string path = join_path(
      cfg.out_dir,
      "trace-" + name + "-" + fmt_g(height) + "-" + procedure + ".txt");
  if (procedure == "slow-rotation") {
    const sim::SignalTrace trace = sim::stick_slip_trace(
        fill, cfg.generate.container, cfg.generate.slow_start_deg,
        cfg.generate.slow_end_deg, cfg.generate.slow,
        Rng(cell_seed).derive("slow").seed());
    io::write_signal_trace(path, trace);
  } else {
    const sim::MarkerField field = sim::vibration_markerfield(
        fill, cfg.generate.container, Rng(cell_seed).derive("vib").seed(),
        cfg.generate.vib);
    io::write_marker_trace(path, field);
  }
  std::cout << "wrote " << path << '\n';
  return 0;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  std::string config_path;
  std::string out_override;
  std::string seed_override;
  std::vector<std::string> positional;

  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    auto take_value = [&](const char* flag) -> const std::string& {
      if (i + 1 >= args.size()) {
        throw ConfigError(std::string(flag) + " needs a value", 0);
      }
      return args[++i];
    };
    try {
      if (arg == "--config")
        config_path = take_value("--config");
      else if (arg == "--seed")
        seed_override = take_value("--seed");
      else if (arg == "--out")
        out_override = take_value("--out");
      else if (!arg.empty() && arg[0] == '-' && arg != "-") {
        std::cerr << "unknown option: " << arg << '\n' << usage();
        return 2;
      } else {
        positional.push_back(arg);
      }
    } catch (const ConfigError& e) {
      std::cerr << e.what() << '\n' << usage();
      return 2;
    }
  }
  if (positional.empty()) {
    std::cerr << usage();
    return 2;
  }

  const std::string command = positional.front();
  positional.erase(positional.begin());
  const bool training_command = command == "train" || command == "eval" ||
                                command == "ablate-rate" ||
                                command == "humidity";

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_config(slurp(config_path));
    if (!seed_override.empty()) {
      const char* begin = seed_override.c_str();
      char* end = nullptr;
      errno = 0;
      const unsigned long long v = std::strtoull(begin, &end, 10);
      if (seed_override[0] == '-' || end != begin + seed_override.size() ||
          errno == ERANGE) {
        std::cerr << "invalid --seed value: " << seed_override << '\n';
        return 2;
      }
      cfg.seed = v;
    }
    if (!out_override.empty()) cfg.out_dir = out_override;

    if (command == "catalog") {
      if (!positional.empty()) {
        std::cerr << "catalog takes no arguments\n" << usage();
        return 2;
      }
      return cmd_catalog(cfg);
    }
    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "train") return cmd_train(cfg);
    if (command == "eval") return cmd_eval(cfg);
    if (command == "ablate-rate") return cmd_ablate_rate(cfg);
    if (command == "humidity") return cmd_humidity(cfg);
    if (command == "trace") return cmd_trace(cfg, positional, std::cerr);
    std::cerr << "unknown command: " << command << '\n' << usage();
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 6;
  } catch (const SpillError& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return 4;
  } catch (const NegativeMassError& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    if (training_command) {
      std::cerr << "training error: " << e.what() << '\n';
      return 5;
    }
    std::cerr << "simulation error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return training_command ? 5 : 4;
  }
}

}  // namespace granusense::cli
