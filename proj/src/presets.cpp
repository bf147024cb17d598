#include "kqw/presets.hpp"

#include "kqw/errors.hpp"

namespace kqw {

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : detail::embedded_presets()) names.emplace_back(p.name);
  return names;
}

std::string preset_text(const std::string& name) {
  for (const auto& p : detail::embedded_presets()) {
    if (p.name == name) return std::string(p.text);
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

RunConfig load_preset(const std::string& name) { return parse_config(preset_text(name)); }

}  // namespace kqw
