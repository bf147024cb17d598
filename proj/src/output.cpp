#include "kqw/output.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "kqw/format.hpp"

namespace kqw {

namespace {

constexpr std::string_view kBegin = "# --- config ---";
constexpr std::string_view kEnd = "# --- end config ---";

void write_preamble(std::ostream& out, const RunConfig& config) { out << output_preamble(config); }

}  // namespace

std::string output_preamble(const RunConfig& config) {
  std::ostringstream os;
  os << "# kqw " << KQW_VERSION << "\n";
  os << "# self_energy_mode: " << to_string(config.self_energy) << "\n";
  os << kBegin << "\n";
  std::istringstream lines(to_config_text(config));
  std::string line;
  while (std::getline(lines, line)) os << (line.empty() ? "#" : "# " + line) << "\n";
  os << kEnd << "\n";
  return os.str();
}

std::string extract_embedded_config(std::string_view text) {
  const auto begin = text.find(kBegin);
  if (begin == std::string_view::npos) return std::string(text);
  const auto end = text.find(kEnd, begin);
  if (end == std::string_view::npos) return std::string(text);
  std::istringstream lines(std::string(text.substr(begin + kBegin.size(), end - begin - kBegin.size())));
  std::string out, line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      out += line.substr(2);
    } else if (line != "#") {
      out += line;
    }
    out += "\n";
  }
  return out;
}

void write_spectrum_csv(std::ostream& out, const RunConfig& config, const std::vector<ModePair>& pairs) {
  struct Row {
    double energy;
    ModeClass cls;
  };
  std::vector<Row> rows;
  rows.reserve(2 * pairs.size());
  for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) rows.push_back({it->negative.energy, it->mode_class()});
  for (const auto& p : pairs) rows.push_back({p.positive.energy, p.mode_class()});
  write_preamble(out, config);
  out << "index,energy,class\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i << ',' << format_double(rows[i].energy) << ',' << to_string(rows[i].cls) << '\n';
  }
}

void write_profile_csv(std::ostream& out, const RunConfig& config, const EigenMode& mode) {
  write_preamble(out, config);
  out << "# energy: " << format_double(mode.energy) << "\n";
  out << "site,re_e,im_e,re_h,im_h,abs2_e,abs2_h\n";
  for (Eigen::Index i = 0; i < mode.electron_amp.size(); ++i) {
    const cplx e = mode.electron_amp(i);
    const cplx h = mode.hole_amp(i);
    out << i + 1 << ',' << format_double(e.real()) << ',' << format_double(e.imag()) << ','
        << format_double(h.real()) << ',' << format_double(h.imag()) << ',' << format_double(std::norm(e)) << ','
        << format_double(std::norm(h)) << '\n';
  }
}

void write_majorana_csv(std::ostream& out, const RunConfig& config, const EigenMode& mode) {
  const MajoranaPair m = majorana_rep(mode);
  write_preamble(out, config);
  out << "# energy: " << format_double(mode.energy) << "\n";
  out << "site,abs2_g,abs2_h\n";
  for (Eigen::Index i = 0; i < m.g.size(); ++i) {
    out << i + 1 << ',' << format_double(std::norm(m.g(i))) << ',' << format_double(std::norm(m.h(i))) << '\n';
  }
}

void write_defect_sweep_csv(std::ostream& out, const RunConfig& config, const std::vector<DefectSweepRow>& rows) {
  write_preamble(out, config);
  out << "mu_p,eps_in_gap,n_in_gap\n";
  for (const auto& r : rows) {
    out << format_double(r.potential) << ',' << format_double(r.in_gap_energy) << ',' << r.in_gap_count << '\n';
  }
}

void write_conductance_csv(std::ostream& out, const RunConfig& config, const ConductanceCurve& curve) {
  write_preamble(out, config);
  out << "bias,didv_total,didv_direct,didv_crossed,didv_local_andreev\n";
  for (const auto& p : curve.points) {
    out << format_double(p.bias) << ',' << format_double(p.total) << ',' << format_double(p.breakdown[0]) << ','
        << format_double(p.breakdown[1]) << ',' << format_double(p.breakdown[2]) << '\n';
  }
}

void write_peaks_csv(std::ostream& out, const RunConfig& config, const std::vector<Peak>& peaks) {
  write_preamble(out, config);
  out << "location,height,fwhm,resolved,in_gap\n";
  for (const auto& p : peaks) {
    out << format_double(p.location) << ',' << format_double(p.height) << ',' << format_double(p.fwhm) << ','
        << (p.resolved ? 1 : 0) << ',' << (p.in_gap ? 1 : 0) << '\n';
  }
}

nlohmann::ordered_json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

nlohmann::ordered_json config_json(const RunConfig& c) {
  using nlohmann::ordered_json;
  ordered_json wire{
      {"n", c.wire.n_sites},
      {"j", c.wire.hopping},
      {"delta", c.wire.pairing.real()},
      {"delta_im", c.wire.pairing.imag()},
      {"mu", c.wire.chem_potential},
      {"boundary", to_string(c.wire.boundary)},
  };
  ordered_json defects = ordered_json::array();
  for (const auto& d : c.wire.defects) defects.push_back({{"site", d.site}, {"mu_p", d.potential}});
  wire["defects"] = defects;

  auto lead_json = [](const LeadConfig& l) {
    return ordered_json{{"site", l.contact_site},
                        {"lambda", l.lambda},
                        {"omega_c", l.omega_c},
                        {"mu", l.chem_potential},
                        {"temperature", l.temperature}};
  };
  ordered_json leads = ordered_json::object();
  if (c.left) leads["left"] = lead_json(*c.left);
  if (c.right) leads["right"] = lead_json(*c.right);

  ordered_json task{
      {"kind", to_string(c.task)},
      {"name", c.name},
      {"output", c.output_dir},
      {"self_energy", to_string(c.self_energy)},
      {"quad_tol", c.quad.rel_tol},
      {"quad_abs_tol", c.quad.abs_tol},
      {"threads", c.threads},
      {"gap_fraction", c.classify.gap_fraction},
      {"byproduct_fraction", c.classify.byproduct_fraction},
  };
  if (c.task == TaskKind::conductance) {
    task["v_min"] = c.v_min;
    task["v_max"] = c.v_max;
    task["points"] = c.points;
    task["min_peak_height"] = c.min_peak_height;
    task["min_peak_width"] = c.min_peak_width;
    task["sites"] = c.left_sites;
  } else if (c.task == TaskKind::defect_sweep) {
    task["defect_site"] = c.defect_site;
    task["mu_p_list"] = c.defect_potentials;
  } else if (c.task == TaskKind::profiles) {
    task["modes"] = c.mode_pairs;
  }
  return ordered_json{{"wire", wire}, {"leads", leads}, {"task", task}};
}

}  // namespace kqw
