// memrc: experiment runner for the memristive reservoir-computing
// simulator. Subcommands:
//   run            one configuration (the config grid must be a single point)
//   sweep          every point of the config's Cartesian grid
//   inspect-device state trajectory of one device for a given pulse train
//
// Exit codes: 0 success, 2 config/validation error, 3 dataset error,
// 1 anything else.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "memrc/config.hpp"
#include "memrc/dataset.hpp"
#include "memrc/device.hpp"
#include "memrc/experiment.hpp"
#include "memrc/report.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::size_t> subset_train;
  std::optional<std::size_t> subset_test;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--workers", opts.workers,
                  "worker threads (0 = hardware concurrency)");
  cmd->add_option("--subset-train", opts.subset_train,
                  "override training subset size (0 = full set)");
  cmd->add_option("--subset-test", opts.subset_test,
                  "override test subset size (0 = full set)");
}

memrc::ExperimentConfig load_config(const CommonOptions& opts) {
  auto cfg = memrc::ExperimentConfig::from_file(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.workers) cfg.workers = *opts.workers;
  if (opts.subset_train) cfg.subset_train = *opts.subset_train;
  if (opts.subset_test) cfg.subset_test = *opts.subset_test;
  cfg.validate();
  return cfg;
}

void print_histogram(const char* name, const memrc::LabeledImageSet& set) {
  auto hist = memrc::label_histogram(set);
  std::cout << name << ": " << set.count() << " images, labels [";
  for (std::size_t i = 0; i < hist.size(); ++i) {
    std::cout << (i ? " " : "") << hist[i];
  }
  std::cout << "]\n";
}

int run_or_sweep(const CommonOptions& opts, bool single_point) {
  auto cfg = load_config(opts);
  const auto grid = cfg.grid();
  if (single_point && grid.size() != 1) {
    throw memrc::ConfigError(
        "run: config expands to " + std::to_string(grid.size()) +
        " grid points; use `sweep` or reduce the lists to single values");
  }

  auto [train_set, test_set] = memrc::load_experiment_data(cfg);
  print_histogram("train", train_set);
  print_histogram("test", test_set);

  const auto results = memrc::run_grid(cfg, train_set, test_set);
  memrc::write_run_artifacts(opts.out_dir, cfg, results);

  for (const auto& pr : results) {
    const auto& r = pr.report;
    std::printf("%-10s k=%d bits=%d accuracy=%.4f devices=%zu\n",
                r.spec.method_name().c_str(), r.spec.sections, r.bits,
                r.accuracy, r.device_count);
  }
  std::cout << "wrote " << grid.size() << " report(s) to " << opts.out_dir
            << "\n";
  return 0;
}

int inspect_device(const std::string& train_bits,
                   const std::string& config_path) {
  memrc::DeviceParams params;
  if (!config_path.empty()) {
    params = memrc::ExperimentConfig::from_file(config_path).device;
  }
  std::vector<std::uint8_t> slots;
  slots.reserve(train_bits.size());
  for (char ch : train_bits) {
    if (ch != '0' && ch != '1') {
      throw memrc::ConfigError("inspect-device: train must be a 0/1 string");
    }
    slots.push_back(ch == '1' ? 1 : 0);
  }
  if (slots.empty()) {
    throw memrc::ConfigError("inspect-device: train must be non-empty");
  }

  std::printf("%-5s %-3s %-18s %-18s %-14s\n", "slot", "bit", "w_before",
              "w_after", "energy_J");
  const auto trace = memrc::trace_train(slots, params);
  for (const auto& row : trace) {
    std::printf("%-5zu %-3d %-18.12g %-18.12g %-14.6g\n", row.index,
                static_cast<int>(row.bit), row.w_before, row.w_after,
                row.energy);
  }
  const memrc::DeviceState final_state{trace.back().w_after};
  const double current = memrc::read_current(final_state, params.v_read, params);
  const double read_energy =
      memrc::pulse_energy(final_state, params.v_read, params);
  std::printf("read: current_A=%.12g energy_J=%.6g (v_read=%g)\n", current,
              read_energy, params.v_read);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"device-accurate simulator of delay-feedback reservoir "
               "computing on volatile memristors"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "run a single configuration");
  add_common_options(run_cmd, run_opts);

  CommonOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "run every grid point");
  add_common_options(sweep_cmd, sweep_opts);

  std::string train_bits;
  std::string inspect_config;
  auto* inspect_cmd = app.add_subcommand(
      "inspect-device", "print the state trajectory for a pulse train");
  inspect_cmd->add_option("--train", train_bits, "binary slot string, e.g. 10110")
      ->required();
  inspect_cmd->add_option("--config", inspect_config,
                          "optional config supplying device parameters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_or_sweep(run_opts, true);
    if (sweep_cmd->parsed()) return run_or_sweep(sweep_opts, false);
    if (inspect_cmd->parsed()) return inspect_device(train_bits, inspect_config);
  } catch (const memrc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const memrc::DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
