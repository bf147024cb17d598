#include "kqw/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "kqw/model.hpp"
#include "kqw/output.hpp"
#include "kqw/presets.hpp"
#include "kqw/spectrum.hpp"
#include "kqw/transport.hpp"

namespace kqw {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class Writer {
 public:
  explicit Writer(const RunConfig& config) : dir_(config.output_dir) {
    if (dir_.empty()) dir_ = ".";
    fs::create_directories(dir_);
  }

  template <class Fn>
  void file(const std::string& name, Fn fn) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
    fn(out);
    out.flush();
    if (!out) throw std::ios_base::failure("write failed: " + path.string());
    files_.push_back(path);
  }

  std::vector<fs::path> take() { return std::move(files_); }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

ordered_json pair_energies(const std::vector<ModePair>& pairs, ModeClass cls) {
  ordered_json out = ordered_json::array();
  for (const auto& p : pairs) {
    if (p.mode_class() == cls) out.push_back(p.energy());
  }
  return out;
}

ordered_json spectrum_summary(const RunConfig& cfg, const std::vector<ModePair>& pairs) {
  const double gap = bulk_gap(cfg.wire.hopping, cfg.wire.pairing, cfg.wire.chem_potential);
  return ordered_json{
      {"bulk_gap", gap},
      {"pairs", pairs.size()},
      {"in_gap_energies", pair_energies(pairs, ModeClass::in_gap)},
      {"defect_byproduct_energies", pair_energies(pairs, ModeClass::defect_byproduct)},
      {"bulk_pairs", std::count_if(pairs.begin(), pairs.end(),
                                   [](const ModePair& p) { return p.mode_class() == ModeClass::bulk; })},
  };
}

void run_spectrum(const RunConfig& cfg, Writer& w, ordered_json& meta) {
  const auto pairs = solve_spectrum(cfg.wire, cfg.classify);
  w.file("spectrum.csv", [&](std::ostream& o) { write_spectrum_csv(o, cfg, pairs); });
  meta["spectrum"] = spectrum_summary(cfg, pairs);
}

void run_profiles(const RunConfig& cfg, Writer& w, ordered_json& meta) {
  const auto pairs = solve_spectrum(cfg.wire, cfg.classify);
  w.file("spectrum.csv", [&](std::ostream& o) { write_spectrum_csv(o, cfg, pairs); });
  std::vector<int> selected = cfg.mode_pairs;
  if (selected.empty()) {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (pairs[k].mode_class() == ModeClass::in_gap) selected.push_back(static_cast<int>(k));
    }
  }
  ordered_json profiles = ordered_json::array();
  for (int k : selected) {
    const EigenMode& mode = pairs.at(static_cast<std::size_t>(k)).positive;
    const std::string suffix = std::to_string(k) + ".csv";
    w.file("profile_pair" + suffix, [&](std::ostream& o) { write_profile_csv(o, cfg, mode); });
    w.file("majorana_pair" + suffix, [&](std::ostream& o) { write_majorana_csv(o, cfg, mode); });
    profiles.push_back({{"pair", k}, {"energy", mode.energy}, {"class", to_string(mode.mode_class)}});
  }
  meta["spectrum"] = spectrum_summary(cfg, pairs);
  meta["profiles"] = profiles;
}

void run_defect_sweep(const RunConfig& cfg, Writer& w, ordered_json& meta) {
  std::vector<DefectSweepRow> rows;
  for (double mu_p : cfg.defect_potentials) {
    WireConfig wire = cfg.wire;
    std::erase_if(wire.defects, [&](const Defect& d) { return d.site == cfg.defect_site; });
    wire.defects.push_back({cfg.defect_site, mu_p});
    const auto pairs = solve_spectrum(wire, cfg.classify);
    DefectSweepRow row{mu_p, std::numeric_limits<double>::quiet_NaN(), 0};
    for (const auto& p : pairs) {
      if (p.mode_class() != ModeClass::in_gap) continue;
      if (row.in_gap_count++ == 0) row.in_gap_energy = p.energy();
    }
    rows.push_back(row);
  }
  w.file("defect_sweep.csv", [&](std::ostream& o) { write_defect_sweep_csv(o, cfg, rows); });
  ordered_json table = ordered_json::array();
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.push_back({{"mu_p", rows[i].potential},
                     {"eps_in_gap", json_number(rows[i].in_gap_energy)},
                     {"n_in_gap", rows[i].in_gap_count}});
    if (i > 0 && !(rows[i].in_gap_energy < rows[i - 1].in_gap_energy)) decreasing = false;
  }
  meta["defect_sweep"] = {{"rows", table}, {"strictly_decreasing", decreasing}};
}

void run_conductance(const RunConfig& cfg, Writer& w, ordered_json& meta) {
  const auto pairs = solve_spectrum(cfg.wire, cfg.classify);
  w.file("spectrum.csv", [&](std::ostream& o) { write_spectrum_csv(o, cfg, pairs); });
  meta["spectrum"] = spectrum_summary(cfg, pairs);

  SweepOptions opts;
  opts.propagator.self_energy = cfg.self_energy;
  opts.threads = cfg.threads;
  opts.min_peak_height = cfg.min_peak_height;
  opts.min_peak_width = cfg.min_peak_width;

  std::vector<int> sites = cfg.left_sites;
  const bool scan = !sites.empty();
  if (!scan) sites.push_back(cfg.left->contact_site);

  ordered_json runs = ordered_json::array();
  for (int site : sites) {
    LeadConfig left = *cfg.left;
    left.contact_site = site;
    const std::vector<LeadConfig> leads{left, *cfg.right};
    const ConductanceCurve curve = conductance_sweep(cfg.wire, leads, cfg.v_min, cfg.v_max, cfg.points, opts);
    const std::string suffix = scan ? "_site" + std::to_string(site) + ".csv" : ".csv";
    w.file("conductance" + suffix, [&](std::ostream& o) { write_conductance_csv(o, cfg, curve); });
    w.file("peaks" + suffix, [&](std::ostream& o) { write_peaks_csv(o, cfg, curve.peaks); });

    ordered_json peaks = ordered_json::array();
    for (const auto& p : curve.peaks) {
      peaks.push_back({{"location", p.location},
                       {"height", p.height},
                       {"fwhm", json_number(p.fwhm)},
                       {"resolved", p.resolved},
                       {"in_gap", p.in_gap}});
    }
    runs.push_back({{"left_site", site},
                    {"right_site", cfg.right->contact_site},
                    {"grid_points", curve.points.size()},
                    {"singular_biases", curve.singular_biases},
                    {"peaks", peaks}});
  }
  meta["conductance"] = runs;
}

}  // namespace

RunReport run(const RunConfig& config) {
  config.validate();
  Writer w(config);
  ordered_json meta{
      {"program", "kqw"},
      {"version", KQW_VERSION},
      {"self_energy_mode", to_string(config.self_energy)},
      {"quadrature", {{"rel_tol", config.quad.rel_tol}, {"abs_tol", config.quad.abs_tol}}},
      {"config", config_json(config)},
      {"config_text", to_config_text(config)},
  };
  switch (config.task) {
    case TaskKind::spectrum:
      run_spectrum(config, w, meta);
      break;
    case TaskKind::profiles:
      run_profiles(config, w, meta);
      break;
    case TaskKind::defect_sweep:
      run_defect_sweep(config, w, meta);
      break;
    case TaskKind::conductance:
      run_conductance(config, w, meta);
      break;
  }
  if (config.dump_matrix) {
    const BdgMatrix H = build_bdg(config.wire);
    w.file("bdg_matrix.tsv", [&](std::ostream& o) {
      o << output_preamble(config);
      write_matrix_tsv(o, H.entries());
    });
  }
  ordered_json files = ordered_json::array();
  for (const auto& f : w.take()) files.push_back(f.filename().string());
  meta["files"] = files;

  RunReport report;
  const fs::path meta_path = fs::path(config.output_dir.empty() ? "." : config.output_dir) / "metadata.json";
  {
    std::ofstream out(meta_path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + meta_path.string() + " for writing");
    out << meta.dump(2) << '\n';
    if (!out) throw std::ios_base::failure("write failed: " + meta_path.string());
  }
  for (const auto& f : files) report.files.push_back(fs::path(config.output_dir) / f.get<std::string>());
  report.files.push_back(meta_path);
  report.metadata = std::move(meta);
  return report;
}

RunReport run_preset(const std::string& name, const std::function<void(RunConfig&)>& adjust) {
  RunConfig cfg = load_preset(name);
  if (adjust) adjust(cfg);
  return run(cfg);
}

}  // namespace kqw
