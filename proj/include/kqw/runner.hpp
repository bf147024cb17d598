#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kqw/config.hpp"

namespace kqw {

struct RunReport {
  std::vector<std::filesystem::path> files;
  nlohmann::ordered_json metadata;
};

/// Executes the task and writes its CSV files plus metadata.json into
/// config.output_dir (created if needed). Throws std::ios_base::failure on
/// I/O errors.
RunReport run(const RunConfig& config);

/// Loads a shipped preset, lets `adjust` override fields (output directory,
/// threads, ...) and runs it.
RunReport run_preset(const std::string& name, const std::function<void(RunConfig&)>& adjust = {});

}  // namespace kqw
