// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "copyaug/error.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace copyaug {

enum class Mode { Plain, Copyout, Cutout, SamplePairing };

constexpr std::string_view to_string(Mode m) noexcept {
  switch (m) {
  case Mode::Plain:
    return "plain";
  case Mode::Copyout:
    return "copyout";
  case Mode::Cutout:
    return "cutout";
  case Mode::SamplePairing:
    return "samplepairing";
  }
  return "?";
}

inline std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : {Mode::Plain, Mode::Copyout, Mode::Cutout, Mode::SamplePairing})
    if (to_string(m) == name)
      return m;
  return std::nullopt;
}

/**
 * Three-phase pairing schedule.
 *
 * Phase 1 runs the base mode only. Phase 2 alternates `on_epochs` of
 * SamplePairing with `off_epochs` of the base mode, starting with pairing on;
 * a trailing partial cycle is cut wherever phase 2 ends. Phase 3 (fine-tuning)
 * is base mode again, and may be empty.
 */
struct PhasePlan {
  std::size_t phase1_epochs = 0;
  std::size_t phase2_epochs = 0;
  std::size_t on_epochs = 1;
  std::size_t off_epochs = 0;
  std::size_t phase3_epochs = 0;
  Mode base_mode = Mode::Plain;

  constexpr std::size_t total_epochs() const noexcept {
    return phase1_epochs + phase2_epochs + phase3_epochs;
  }

  friend constexpr bool operator==(const PhasePlan &, const PhasePlan &) = default;
};

inline void validate(const PhasePlan &plan) {
  if (plan.phase2_epochs > 0 && plan.on_epochs < 1)
    throw ContractError("schedule: on_epochs must be >= 1 when phase 2 is non-empty");
  if (plan.base_mode == Mode::SamplePairing)
    throw ContractError("schedule: base mode cannot be samplepairing");
}

inline Mode mode_for_epoch(const PhasePlan &plan, std::size_t epoch) {
  validate(plan);
  if (epoch >= plan.total_epochs())
    throw ContractError("schedule: epoch " + std::to_string(epoch) + " outside plan of " +
                        std::to_string(plan.total_epochs()) + " epochs");
  const std::size_t phase2_begin = plan.phase1_epochs;
  const std::size_t phase3_begin = plan.phase1_epochs + plan.phase2_epochs;
  if (epoch < phase2_begin || epoch >= phase3_begin)
    return plan.base_mode;
  const std::size_t k = (epoch - phase2_begin) % (plan.on_epochs + plan.off_epochs);
  return k < plan.on_epochs ? Mode::SamplePairing : plan.base_mode;
}

/// Closed-form number of SamplePairing epochs in a plan.
constexpr std::size_t pairing_epoch_count(const PhasePlan &plan) noexcept {
  if (plan.phase2_epochs == 0)
    return 0;
  const std::size_t cycle = plan.on_epochs + plan.off_epochs;
  return plan.on_epochs * (plan.phase2_epochs / cycle) +
         std::min(plan.phase2_epochs % cycle, plan.on_epochs);
}

struct ScheduleTable {
  std::vector<Mode> modes; ///< indexed by epoch
  std::size_t pairing_epochs = 0;
  std::size_t base_epochs = 0;
};

inline ScheduleTable dump_table(const PhasePlan &plan) {
  validate(plan);
  ScheduleTable table;
  table.modes.reserve(plan.total_epochs());
  for (std::size_t e = 0; e < plan.total_epochs(); ++e) {
    const Mode m = mode_for_epoch(plan, e);
    table.modes.push_back(m);
    ++(m == Mode::SamplePairing ? table.pairing_epochs : table.base_epochs);
  }
  return table;
}

/// `epoch,mode` CSV, one row per epoch.
inline void write_csv(std::ostream &os, const ScheduleTable &table) {
  os << "epoch,mode\n";
  for (std::size_t e = 0; e < table.modes.size(); ++e)
    os << e << ',' << to_string(table.modes[e]) << '\n';
}

struct NamedPlan {
  std::string_view name;
  PhasePlan plan;
};

// CIFAR-10 configurations: 100 warm-up epochs, 900 alternating, 200 fine-tuning.
inline constexpr std::array<NamedPlan, 4> kPresets{{
    {"sp-cifar", {100, 900, 8, 2, 200, Mode::Plain}},
    {"cp-1to1", {100, 900, 1, 1, 200, Mode::Copyout}},
    {"cp-3to1", {100, 900, 3, 1, 200, Mode::Copyout}},
    {"cp-1to1-noFT", {100, 1100, 1, 1, 0, Mode::Copyout}},
}};

inline std::optional<PhasePlan> find_preset(std::string_view name) {
  for (const auto &p : kPresets)
    if (p.name == name)
      return p.plan;
  return std::nullopt;
}

inline std::string describe(const PhasePlan &p) {
  return "phase1=" + std::to_string(p.phase1_epochs) + " phase2=" + std::to_string(p.phase2_epochs) +
         " on=" + std::to_string(p.on_epochs) + " off=" + std::to_string(p.off_epochs) +
         " phase3=" + std::to_string(p.phase3_epochs) + " base=" + std::string(to_string(p.base_mode));
}

} // namespace copyaug
