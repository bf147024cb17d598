#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kqw/leads.hpp"
#include "kqw/model.hpp"
#include "kqw/quadrature.hpp"
#include "kqw/spectrum.hpp"

namespace kqw {

enum class TaskKind { spectrum, profiles, defect_sweep, conductance };

const char* to_string(TaskKind k);
TaskKind task_from_string(const std::string& s);

/// A fully resolved run: physical scenario, leads, task and its knobs.
struct RunConfig {
  std::string name;
  TaskKind task = TaskKind::spectrum;
  WireConfig wire;
  std::optional<LeadConfig> left;
  std::optional<LeadConfig> right;

  std::string output_dir;
  SelfEnergyMode self_energy = SelfEnergyMode::none;
  QuadratureSpec quad;
  int threads = 1;
  bool dump_matrix = false;
  ClassifyOptions classify;

  // conductance
  double v_min = -1.0;
  double v_max = 1.0;
  int points = 401;
  /// Left-lead contact sites to scan; empty means the [lead.left] site only.
  std::vector<int> left_sites;
  double min_peak_height = 1e-3;
  double min_peak_width = 1e-5;

  // defect_sweep
  int defect_site = 1;
  std::vector<double> defect_potentials;

  // profiles: pair indices (0-based, ascending energy); empty means in-gap pairs
  std::vector<int> mode_pairs;

  std::vector<LeadConfig> leads() const;

  /// Task-specific checks: conductance needs both leads, the lead-free
  /// tasks need none. Throws ConfigError.
  void validate() const;
};

/// Parses the sectioned key = value format ([wire], [lead.left],
/// [lead.right], [task]). '#' starts a comment. Diagnostics carry the
/// offending line number.
RunConfig parse_config(std::string_view text);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& config);

}  // namespace kqw
