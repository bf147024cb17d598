// kqw: Kitaev-wire spectra and lead transport from the command line.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kqw/config.hpp"
#include "kqw/errors.hpp"
#include "kqw/output.hpp"
#include "kqw/presets.hpp"
#include "kqw/runner.hpp"
#include "kqw/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string out;
  std::string self_energy;
  std::optional<double> quad_tol;
  std::optional<int> threads;

  void attach(CLI::App* app) {
    app->add_option("--out", out, "Output directory");
    app->add_option("--self-energy", self_energy, "Lead self-energy treatment")
        ->check(CLI::IsMember({"none", "exact"}));
    app->add_option("--quad-tol", quad_tol, "Relative quadrature tolerance")->check(CLI::PositiveNumber);
    app->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 1024));
  }

  void apply(kqw::RunConfig& cfg) const {
    if (!out.empty()) cfg.output_dir = out;
    if (!self_energy.empty()) cfg.self_energy = kqw::self_energy_from_string(self_energy);
    if (quad_tol) cfg.quad.rel_tol = *quad_tol;
    if (threads) cfg.threads = *threads;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void report(const kqw::RunReport& r) {
  for (const auto& f : r.files) std::cout << f.string() << '\n';
}

int run_task(kqw::TaskKind kind, const std::string& config_path, const Overrides& ov) {
  // Output files embed their config, so they can be fed back in directly.
  kqw::RunConfig cfg = kqw::parse_config(kqw::extract_embedded_config(read_file(config_path)));
  if (cfg.task != kind) {
    throw kqw::ConfigError(std::string("config describes a '") + kqw::to_string(cfg.task) + "' task, not '" +
                           kqw::to_string(kind) + "'");
  }
  ov.apply(cfg);
  report(kqw::run(cfg));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kitaev quantum wire: BdG spectra, Majorana profiles and lead conductance"};
  app.require_subcommand(1);
  app.set_version_flag("--version", KQW_VERSION);

  struct TaskCommand {
    const char* name;
    kqw::TaskKind kind;
    const char* help;
    std::string config;
    Overrides ov;
    CLI::App* app = nullptr;
  };
  TaskCommand tasks[] = {
      {"spectrum", kqw::TaskKind::spectrum, "BdG spectrum with mode classes", {}, {}},
      {"profiles", kqw::TaskKind::profiles, "Electron/hole and Majorana profiles of selected pairs", {}, {}},
      {"defect-sweep", kqw::TaskKind::defect_sweep, "In-gap energy against defect potential", {}, {}},
      {"conductance", kqw::TaskKind::conductance, "dI/dV sweep with peak table", {}, {}},
  };
  for (auto& t : tasks) {
    t.app = app.add_subcommand(t.name, t.help);
    t.app->add_option("--config", t.config, "Config file (or an output file with an embedded config)")
        ->required();
    t.ov.attach(t.app);
  }

  std::string preset_name;
  bool list_presets = false;
  bool print_preset = false;
  Overrides preset_ov;
  CLI::App* preset = app.add_subcommand("preset", "Run a shipped scenario preset");
  preset->add_option("name", preset_name, "Preset name");
  preset->add_flag("--list", list_presets, "List preset names");
  preset->add_flag("--print", print_preset, "Print the preset config instead of running it");
  preset_ov.attach(preset);

  int verify_threads = 1;
  CLI::App* verify = app.add_subcommand("verify", "Run the oracle suite");
  verify->add_option("--threads", verify_threads, "Worker threads")->check(CLI::Range(1, 1024));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    for (auto& t : tasks) {
      if (*t.app) return run_task(t.kind, t.config, t.ov);
    }
    if (*preset) {
      if (list_presets) {
        for (const auto& n : kqw::preset_names()) std::cout << n << '\n';
        return kExitOk;
      }
      if (preset_name.empty()) throw kqw::ConfigError("preset name required (see --list)");
      if (print_preset) {
        std::cout << kqw::preset_text(preset_name);
        return kExitOk;
      }
      report(kqw::run_preset(preset_name, [&](kqw::RunConfig& cfg) { preset_ov.apply(cfg); }));
      return kExitOk;
    }
    if (*verify) {
      bool all = true;
      for (const auto& r : kqw::run_verification(verify_threads)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        all = all && r.passed;
      }
      return all ? kExitOk : kExitNumerical;
    }
  } catch (const kqw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const kqw::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
