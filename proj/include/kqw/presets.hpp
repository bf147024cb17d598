#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kqw/config.hpp"

namespace kqw {

struct PresetSource {
  std::string_view name;
  std::string_view text;
};

namespace detail {
/// Generated at build time from presets/*.cfg.
const std::vector<PresetSource>& embedded_presets();
}  // namespace detail

std::vector<std::string> preset_names();

/// Raw config text of a shipped preset. Throws ConfigError for unknown names.
std::string preset_text(const std::string& name);

RunConfig load_preset(const std::string& name);

}  // namespace kqw
