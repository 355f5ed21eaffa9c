// SPDX-License-Identifier: Apache-2.0

#pragma once

// Command-line front end. Kept in a header so tests can run commands
// in-process; tools/main.cpp is a thin wrapper.
//
// Exit codes: 0 success, 1 a check failed, 2 usage or contract error.

#include "copyaug/copyaug.hpp"
#include "copyaug/selftest.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace copyaug::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public Error {
public:
  using Error::Error;
};

namespace fs = std::filesystem;

/// Loads CIFAR-10 batch files and/or PPM files. Directories contribute their
/// `.bin` and `.ppm` entries in lexicographic order.
inline std::vector<LabeledImage> load_inputs(const std::vector<std::string> &inputs,
                                             std::optional<std::size_t> limit) {
  std::vector<fs::path> files;
  for (const auto &in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> entries;
      for (const auto &e : fs::directory_iterator(p))
        if (e.is_regular_file() && (e.path().extension() == ".bin" || e.path().extension() == ".ppm"))
          entries.push_back(e.path());
      std::sort(entries.begin(), entries.end());
      files.insert(files.end(), entries.begin(), entries.end());
    } else {
      files.push_back(p);
    }
  }
  std::vector<LabeledImage> out;
  for (const auto &f : files) {
    if (limit && out.size() >= *limit)
      break;
    if (f.extension() == ".ppm") {
      out.push_back({0, read_ppm(f)});
    } else {
      auto batch = read_cifar10_batch(f);
      std::move(batch.begin(), batch.end(), std::back_inserter(out));
    }
  }
  if (limit && out.size() > *limit)
    out.resize(*limit);
  if (out.empty())
    throw UsageError("no input images");
  return out;
}

/// Deterministic CIFAR-shaped images (gradient background plus two colored
/// boxes) for runs that do not have the real dataset at hand.
inline std::vector<LabeledImage> synthetic_dataset(std::size_t count, std::uint64_t seed) {
  std::vector<LabeledImage> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RngStream rng(seed, 0, i);
    float base[3], slope[3];
    for (int ch = 0; ch < 3; ++ch) {
      base[ch] = static_cast<float>(rng.uniform(0.0, 0.5));
      slope[ch] = static_cast<float>(rng.uniform(0.0, 0.5));
    }
    ImageBuf img(kCifarSide, kCifarSide, 3);
    for (std::size_t r = 0; r < kCifarSide; ++r)
      for (std::size_t c = 0; c < kCifarSide; ++c)
        for (std::size_t ch = 0; ch < 3; ++ch)
          img(r, c, ch) = base[ch] + slope[ch] * static_cast<float>(ch == 1 ? r : c) / 31.0f;
    for (int box = 0; box < 2; ++box) {
      const auto r0 = rng.below(kCifarSide - 4), c0 = rng.below(kCifarSide - 4);
      const auto r1 = rng.between(r0 + 2, kCifarSide), c1 = rng.between(c0 + 2, kCifarSide);
      float color[3];
      for (auto &v : color)
        v = static_cast<float>(rng.unit());
      for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = c0; c < c1; ++c)
          for (std::size_t ch = 0; ch < 3; ++ch)
            img(r, c, ch) = color[ch];
    }
    // Quantize so the image survives a CIFAR byte round trip unchanged.
    out.push_back({static_cast<std::uint8_t>(i % kCifarClasses),
                   from_bytes(to_bytes(img), kCifarSide, kCifarSide, 3)});
  }
  return out;
}

struct AugmentOptions {
  std::vector<std::string> inputs;
  std::string output;
  std::string method = "baseline";
  std::size_t extent = 16;
  float fill = 0.5f;
  std::string preset;
  std::size_t epochs = 1;
  std::size_t start_epoch = 0;
  std::size_t buffer = 256;
  std::uint64_t seed = 0;
  std::size_t batch_size = 128;
  std::optional<std::size_t> limit;
  std::size_t workers = 1;
  double rotation = 15.0;
  double zoom = 0.2;
  bool no_flip = false;
  // preview only
  std::size_t count = 8;
  std::size_t columns = 4;
  std::size_t epoch = 0;
};

inline PipelineConfig make_config(const AugmentOptions &o) {
  PipelineConfig cfg;
  const auto method = parse_method(o.method);
  if (!method)
    throw UsageError("unknown method '" + o.method + "'");
  cfg.method = *method;
  cfg.patch = {o.extent, o.fill};
  cfg.basic = {o.rotation, o.zoom, !o.no_flip};
  cfg.buffer_mode = o.buffer == 0 ? BufferMode::NoBuffer : BufferMode::Buffered;
  cfg.buffer_capacity = o.buffer;
  cfg.seed = o.seed;
  cfg.batch_size = o.batch_size;
  if (is_pairing(cfg.method)) {
    const std::string name =
        !o.preset.empty() ? o.preset : (cfg.method == Method::CopyPairing ? "cp-1to1" : "sp-cifar");
    cfg.plan = find_preset(name);
    if (!cfg.plan)
      throw UsageError("unknown preset '" + name + "'");
  } else if (!o.preset.empty()) {
    throw UsageError("--preset only applies to samplepairing and copypairing");
  }
  return cfg;
}

inline void add_pipeline_flags(CLI::App &cmd, AugmentOptions &o) {
  cmd.add_option("-i,--input", o.inputs, "CIFAR-10 .bin files, .ppm files or directories")->required();
  cmd.add_option("--method", o.method, "baseline|cutout|copyout|samplepairing|copypairing")
      ->capture_default_str();
  cmd.add_option("--extent", o.extent, "square side in pixels")->capture_default_str();
  cmd.add_option("--fill", o.fill, "Cutout fill value in [0,1]")->capture_default_str();
  cmd.add_option("--preset", o.preset, "sp-cifar|cp-1to1|cp-3to1|cp-1to1-noFT");
  cmd.add_option("--buffer", o.buffer, "source buffer capacity, 0 disables the buffer")
      ->capture_default_str();
  cmd.add_option("--seed", o.seed, "random seed")->required();
  cmd.add_option("--batch-size", o.batch_size)->capture_default_str();
  cmd.add_option("--limit", o.limit, "use at most this many input images");
  cmd.add_option("--workers", o.workers, "worker threads (output does not depend on it)")
      ->capture_default_str();
  cmd.add_option("--rotation", o.rotation, "rotation range in degrees")->capture_default_str();
  cmd.add_option("--zoom", o.zoom, "zoom range")->capture_default_str();
  cmd.add_flag("--no-flip", o.no_flip, "disable random horizontal flips");
}

inline int cmd_augment(const AugmentOptions &o, std::ostream &out) {
  const PipelineConfig cfg = make_config(o);
  const auto dataset = load_inputs(o.inputs, o.limit);
  if (cfg.plan && o.start_epoch + o.epochs > cfg.plan->total_epochs())
    throw UsageError("epochs " + std::to_string(o.start_epoch) + ".." +
                     std::to_string(o.start_epoch + o.epochs) + " exceed the plan's " +
                     std::to_string(cfg.plan->total_epochs()) + " epochs");
  Pipeline pipeline(cfg, dataset, o.workers);
  out << "config: command=augment " << describe(cfg) << " start_epoch=" << o.start_epoch
      << " epochs=" << o.epochs << " images=" << dataset.size() << " workers=" << o.workers
      << " output=" << o.output << '\n';

  const fs::path root(o.output);
  for (std::size_t e = o.start_epoch; e < o.start_epoch + o.epochs; ++e) {
    const fs::path dir = root / ("epoch" + std::to_string(e));
    fs::create_directories(dir);
    std::size_t batches = 0;
    pipeline.for_each_batch(e, [&](Batch &&batch) {
      ++batches;
      for (const auto &s : batch)
        write_ppm(s.image, dir / ("img" + std::to_string(s.index) + ".ppm"));
    });
    out << "epoch " << e << " mode " << to_string(effective_mode(cfg, e)) << " batches " << batches
        << '\n';
  }
  return kExitOk;
}

inline int cmd_preview(const AugmentOptions &o, std::ostream &out) {
  if (o.count < 1)
    throw UsageError("--count must be >= 1");
  if (o.columns < 1)
    throw UsageError("--columns must be >= 1");
  const PipelineConfig cfg = make_config(o);
  const auto dataset = load_inputs(o.inputs, o.limit.value_or(o.count));
  if (dataset.size() < o.count)
    throw UsageError("only " + std::to_string(dataset.size()) + " images available for --count " +
                     std::to_string(o.count));
  Pipeline pipeline(cfg, dataset, o.workers);
  out << "config: command=preview " << describe(cfg) << " epoch=" << o.epoch
      << " count=" << o.count << " columns=" << o.columns << " images=" << dataset.size()
      << " output=" << o.output << '\n';

  std::vector<ImageBuf> tiles(o.count);
  pipeline.for_each_batch(o.epoch, [&](Batch &&batch) {
    for (auto &s : batch)
      if (s.index < o.count)
        tiles[s.index] = std::move(s.image);
  });
  const ImageBuf grid = compose_grid(tiles, o.columns);
  write_ppm(grid, o.output);
  out << "wrote " << grid.width() << "x" << grid.height() << " grid\n";
  return kExitOk;
}

struct ScheduleOptions {
  std::string preset;
  std::optional<std::size_t> phase1, phase2, on, off, phase3;
  std::string base = "plain";
  std::string output;
};

inline int cmd_schedule(const ScheduleOptions &o, std::ostream &out, std::ostream &log) {
  PhasePlan plan;
  const bool explicit_plan = o.phase1 || o.phase2 || o.on || o.off || o.phase3;
  if (!o.preset.empty()) {
    if (explicit_plan)
      throw UsageError("--preset cannot be combined with explicit phase flags");
    const auto found = find_preset(o.preset);
    if (!found)
      throw UsageError("unknown preset '" + o.preset + "'");
    plan = *found;
  } else {
    if (!explicit_plan)
      throw UsageError("give --preset or explicit phase flags");
    const auto base = parse_mode(o.base);
    if (!base)
      throw UsageError("unknown base mode '" + o.base + "'");
    plan = {o.phase1.value_or(0), o.phase2.value_or(0), o.on.value_or(1), o.off.value_or(0),
            o.phase3.value_or(0), *base};
  }
  ScheduleTable table;
  try {
    table = dump_table(plan);
  } catch (const ContractError &e) {
    throw UsageError(e.what());
  }
  log << "config: command=schedule " << describe(plan) << '\n';
  if (o.output.empty()) {
    write_csv(out, table);
  } else {
    std::ofstream f(o.output, std::ios::trunc);
    if (!f)
      throw IoError("cannot open " + o.output + " for writing");
    write_csv(f, table);
  }
  log << "epochs=" << table.modes.size() << " samplepairing=" << table.pairing_epochs << ' '
      << to_string(plan.base_mode) << '=' << table.base_epochs << '\n';
  return kExitOk;
}

inline int cmd_selftest(const oracle::SelftestOptions &opts, std::ostream &out) {
  out << "config: command=selftest corrupt_geometry=" << (opts.corrupt_geometry ? 1 : 0) << '\n';
  bool all = true;
  for (const auto &r : oracle::run_selftest(opts)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? kExitOk : kExitCheckFailed;
}

struct SynthOptions {
  std::string output;
  std::size_t count = 256;
  std::uint64_t seed = 0;
};

inline int cmd_synth(const SynthOptions &o, std::ostream &out) {
  if (o.count < 1)
    throw UsageError("--count must be >= 1");
  out << "config: command=synth count=" << o.count << " seed=" << o.seed << " output=" << o.output
      << '\n';
  write_cifar10_batch(synthetic_dataset(o.count, o.seed), o.output);
  return kExitOk;
}

/// Parses `args` (without the program name) and runs the chosen command.
inline int run(const std::vector<std::string> &args, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
  CLI::App app{"Copyout / CopyPairing image augmentation"};
  app.name("copyaug");
  app.require_subcommand(1);

  AugmentOptions aug;
  auto *augment = app.add_subcommand("augment", "augment a dataset and write epoch{E}/img{I}.ppm");
  add_pipeline_flags(*augment, aug);
  augment->add_option("-o,--output", aug.output, "output directory")->required();
  augment->add_option("--epochs", aug.epochs, "number of epochs to run")->capture_default_str();
  augment->add_option("--start-epoch", aug.start_epoch, "first epoch")->capture_default_str();

  AugmentOptions prev;
  auto *preview = app.add_subcommand("preview", "write a grid of augmented samples as one PPM");
  add_pipeline_flags(*preview, prev);
  preview->add_option("-o,--output", prev.output, "output .ppm file")->required();
  preview->add_option("--count", prev.count, "number of samples")->capture_default_str();
  preview->add_option("--columns", prev.columns, "grid columns")->capture_default_str();
  preview->add_option("--epoch", prev.epoch, "epoch to draw from")->capture_default_str();

  ScheduleOptions sched;
  auto *schedule = app.add_subcommand("schedule", "print the per-epoch mode table as CSV");
  schedule->add_option("--preset", sched.preset, "sp-cifar|cp-1to1|cp-3to1|cp-1to1-noFT");
  schedule->add_option("--phase1", sched.phase1);
  schedule->add_option("--phase2", sched.phase2);
  schedule->add_option("--on", sched.on);
  schedule->add_option("--off", sched.off);
  schedule->add_option("--phase3", sched.phase3);
  schedule->add_option("--base", sched.base, "plain|copyout|cutout")->capture_default_str();
  schedule->add_option("-o,--output", sched.output, "CSV file (default: stdout)");

  oracle::SelftestOptions st;
  auto *selftest = app.add_subcommand("selftest", "run the embedded brute-force oracles");
  selftest->add_flag("--corrupt-geometry", st.corrupt_geometry)->group("");

  SynthOptions syn;
  auto *synth = app.add_subcommand("synth", "write a synthetic CIFAR-10 format batch");
  synth->add_option("-o,--output", syn.output)->required();
  synth->add_option("--count", syn.count)->capture_default_str();
  synth->add_option("--seed", syn.seed)->required();

  std::vector<const char *> argv{"copyaug"};
  for (const auto &a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "copyaug: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (augment->parsed())
      return cmd_augment(aug, out);
    if (preview->parsed())
      return cmd_preview(prev, out);
    if (schedule->parsed())
      return cmd_schedule(sched, out, err);
    if (selftest->parsed())
      return cmd_selftest(st, out);
    if (synth->parsed())
      return cmd_synth(syn, out);
  } catch (const Error &e) {
    err << "copyaug: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error &e) {
    err << "copyaug: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

} // namespace copyaug::cli
