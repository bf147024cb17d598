#include "kqw/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "kqw/errors.hpp"
#include "kqw/format.hpp"

namespace kqw {

const char* to_string(TaskKind k) {
  switch (k) {
    case TaskKind::spectrum:
      return "spectrum";
    case TaskKind::profiles:
      return "profiles";
    case TaskKind::defect_sweep:
      return "defect_sweep";
    case TaskKind::conductance:
      return "conductance";
  }
  return "unknown";
}

TaskKind task_from_string(const std::string& s) {
  if (s == "spectrum") return TaskKind::spectrum;
  if (s == "profiles") return TaskKind::profiles;
  if (s == "defect_sweep" || s == "defect-sweep") return TaskKind::defect_sweep;
  if (s == "conductance") return TaskKind::conductance;
  throw ConfigError("unknown task kind '" + s + "'");
}

std::vector<LeadConfig> RunConfig::leads() const {
  std::vector<LeadConfig> out;
  if (left) out.push_back(*left);
  if (right) out.push_back(*right);
  return out;
}

void RunConfig::validate() const {
  wire.validate();
  if (left) left->validate(wire.n_sites);
  if (right) right->validate(wire.n_sites);
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(quad.rel_tol > 0.0)) throw ConfigError("quad_tol must be > 0");
  switch (task) {
    case TaskKind::conductance:
      if (!left || !right) throw ConfigError("conductance task needs both [lead.left] and [lead.right]");
      if (points < 2) throw ConfigError("conductance task needs points >= 2");
      if (!(v_max > v_min)) throw ConfigError("conductance task needs v_max > v_min");
      for (int s : left_sites) {
        if (s < 1 || s > wire.n_sites) {
          throw ConfigError("scan site " + std::to_string(s) + " outside 1.." + std::to_string(wire.n_sites));
        }
      }
      break;
    case TaskKind::defect_sweep:
      if (defect_potentials.empty()) throw ConfigError("defect_sweep task needs mu_p_list");
      if (defect_site < 1 || defect_site > wire.n_sites) {
        throw ConfigError("defect_site " + std::to_string(defect_site) + " outside 1.." +
                          std::to_string(wire.n_sites));
      }
      [[fallthrough]];
    case TaskKind::spectrum:
    case TaskKind::profiles:
      if (left || right) throw ConfigError(std::string(to_string(task)) + " task takes no leads");
      for (int m : mode_pairs) {
        if (m < 0 || m >= wire.n_sites) throw ConfigError("mode index " + std::to_string(m) + " out of range");
      }
      break;
  }
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  int line = 0;
  std::multimap<std::string, Entry> entries;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"wire", {"n", "j", "delta", "delta_im", "mu", "boundary", "defect"}},
      {"lead.left", {"site", "lambda", "omega_c", "mu", "temperature"}},
      {"lead.right", {"site", "lambda", "omega_c", "mu", "temperature"}},
      {"task",
       {"kind", "name", "output", "self_energy", "quad_tol", "quad_abs_tol", "threads", "dump_matrix", "gap_fraction",
        "byproduct_fraction", "v_min", "v_max", "points", "sites", "min_peak_height", "min_peak_width",
        "defect_site", "mu_p_list", "modes"}},
  };
  return keys;
}

double to_double(const Entry& e, const std::string& key) {
  const std::string& s = e.value;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("'" + key + "' expects a number, got '" + s + "'", e.line);
  return v;
}

int to_int(const Entry& e, const std::string& key) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + e.value + "'", e.line);
  }
  return v;
}

bool to_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + e.value + "'", e.line);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const Section& s) : section_(s) {}

  const Entry* find(const std::string& key) const {
    auto it = section_.entries.find(key);
    return it == section_.entries.end() ? nullptr : &it->second;
  }

  template <class T, class Fn>
  void opt(const std::string& key, T& out, Fn convert) const {
    if (const Entry* e = find(key)) out = convert(*e, key);
  }

  const Entry& require(const std::string& key, const std::string& section_name) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError("missing required key '" + key + "' in [" + section_name + "]", section_.line);
    return *e;
  }

  const Section& section() const { return section_; }

 private:
  const Section& section_;
};

/// Re-throws range/validation errors against the line that set the value.
template <class Fn>
void at_line(int line, Fn fn) {
  try {
    fn();
  } catch (const ConfigError& err) {
    if (err.line() > 0) throw;
    throw ConfigError(err.what(), line);
  }
}

LeadConfig read_lead(const Reader& r, const std::string& name, int n_sites) {
  LeadConfig lead;
  const Entry& site = r.require("site", name);
  lead.contact_site = to_int(site, "site");
  lead.lambda = to_double(r.require("lambda", name), "lambda");
  lead.omega_c = to_double(r.require("omega_c", name), "omega_c");
  r.opt("mu", lead.chem_potential, to_double);
  r.opt("temperature", lead.temperature, to_double);
  if (lead.contact_site < 1 || lead.contact_site > n_sites) {
    throw ConfigError("lead contact site " + std::to_string(lead.contact_site) + " outside 1.." +
                          std::to_string(n_sites),
                      site.line);
  }
  at_line(r.section().line, [&] { lead.validate(n_sites); });
  return lead;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Section> sections;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", line_no);
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!allowed_keys().contains(current)) throw ConfigError("unknown section [" + current + "]", line_no);
      if (sections.contains(current)) throw ConfigError("duplicate section [" + current + "]", line_no);
      sections[current].line = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    if (current.empty()) throw ConfigError("key outside of any section", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!allowed_keys().at(current).contains(key)) {
      throw ConfigError("unknown key '" + key + "' in [" + current + "]", line_no);
    }
    auto& entries = sections[current].entries;
    if (key != "defect" && entries.contains(key)) {
      throw ConfigError("duplicate key '" + key + "' in [" + current + "]", line_no);
    }
    entries.emplace(key, Entry{value, line_no});
    if (end == text.size()) break;
  }

  if (!sections.contains("wire")) throw ConfigError("missing [wire] section");
  if (!sections.contains("task")) throw ConfigError("missing [task] section");

  RunConfig cfg;
  const Reader wire(sections.at("wire"));
  const Entry& n_entry = wire.require("n", "wire");
  cfg.wire.n_sites = to_int(n_entry, "n");
  if (cfg.wire.n_sites < 2) throw ConfigError("wire needs at least 2 sites", n_entry.line);
  wire.opt("j", cfg.wire.hopping, to_double);
  double dre = 0.0, dim = 0.0;
  wire.opt("delta", dre, to_double);
  wire.opt("delta_im", dim, to_double);
  cfg.wire.pairing = cplx(dre, dim);
  wire.opt("mu", cfg.wire.chem_potential, to_double);
  if (const Entry* b = wire.find("boundary")) {
    if (b->value == "open") {
      cfg.wire.boundary = Boundary::open;
    } else if (b->value == "closed") {
      cfg.wire.boundary = Boundary::closed;
    } else if (b->value == "twisted") {
      cfg.wire.boundary = Boundary::twisted;
    } else {
      throw ConfigError("boundary must be open, closed or twisted, got '" + b->value + "'", b->line);
    }
  }
  {
    auto [lo, hi] = sections.at("wire").entries.equal_range("defect");
    std::vector<std::pair<const Entry*, Defect>> defects;
    for (auto it = lo; it != hi; ++it) {
      const Entry& e = it->second;
      const auto colon = e.value.find(':');
      if (colon == std::string::npos) throw ConfigError("defect expects 'site:potential'", e.line);
      const Entry site{trim(std::string_view(e.value).substr(0, colon)), e.line};
      const Entry pot{trim(std::string_view(e.value).substr(colon + 1)), e.line};
      Defect d{to_int(site, "defect site"), to_double(pot, "defect potential")};
      if (d.site < 1 || d.site > cfg.wire.n_sites) {
        throw ConfigError("defect site " + std::to_string(d.site) + " outside 1.." +
                              std::to_string(cfg.wire.n_sites),
                          e.line);
      }
      defects.emplace_back(&e, d);
    }
    std::sort(defects.begin(), defects.end(),
              [](const auto& a, const auto& b) { return a.first->line < b.first->line; });
    for (const auto& [e, d] : defects) {
      cfg.wire.defects.push_back(d);
      at_line(e->line, [&] { cfg.wire.validate(); });
    }
  }
  at_line(sections.at("wire").line, [&] { cfg.wire.validate(); });

  for (const char* name : {"lead.left", "lead.right"}) {
    if (!sections.contains(name)) continue;
    LeadConfig lead = read_lead(Reader(sections.at(name)), name, cfg.wire.n_sites);
    (std::string(name) == "lead.left" ? cfg.left : cfg.right) = lead;
  }

  const Section& task_section = sections.at("task");
  const Reader task(task_section);
  const Entry& kind = task.require("kind", "task");
  at_line(kind.line, [&] { cfg.task = task_from_string(kind.value); });
  cfg.name = to_string(cfg.task);
  if (const Entry* e = task.find("name")) cfg.name = e->value;
  cfg.output_dir = "out/" + cfg.name;
  if (const Entry* e = task.find("output")) cfg.output_dir = e->value;
  if (const Entry* e = task.find("self_energy")) {
    at_line(e->line, [&] { cfg.self_energy = self_energy_from_string(e->value); });
  }
  task.opt("quad_tol", cfg.quad.rel_tol, to_double);
  task.opt("quad_abs_tol", cfg.quad.abs_tol, to_double);
  task.opt("threads", cfg.threads, to_int);
  task.opt("dump_matrix", cfg.dump_matrix, to_bool);
  task.opt("gap_fraction", cfg.classify.gap_fraction, to_double);
  task.opt("byproduct_fraction", cfg.classify.byproduct_fraction, to_double);
  task.opt("v_min", cfg.v_min, to_double);
  task.opt("v_max", cfg.v_max, to_double);
  task.opt("points", cfg.points, to_int);
  task.opt("min_peak_height", cfg.min_peak_height, to_double);
  task.opt("min_peak_width", cfg.min_peak_width, to_double);
  task.opt("defect_site", cfg.defect_site, to_int);
  if (const Entry* e = task.find("sites")) {
    for (const auto& s : split_list(e->value)) {
      const int site = to_int(Entry{s, e->line}, "sites");
      if (site < 1 || site > cfg.wire.n_sites) {
        throw ConfigError("scan site " + s + " outside 1.." + std::to_string(cfg.wire.n_sites), e->line);
      }
      cfg.left_sites.push_back(site);
    }
  }
  if (const Entry* e = task.find("mu_p_list")) {
    for (const auto& s : split_list(e->value)) cfg.defect_potentials.push_back(to_double(Entry{s, e->line}, "mu_p_list"));
  }
  if (const Entry* e = task.find("modes")) {
    for (const auto& s : split_list(e->value)) cfg.mode_pairs.push_back(to_int(Entry{s, e->line}, "modes"));
  }
  if (const Entry* e = task.find("defect_site"); e && (cfg.defect_site < 1 || cfg.defect_site > cfg.wire.n_sites)) {
    throw ConfigError("defect_site " + e->value + " outside 1.." + std::to_string(cfg.wire.n_sites), e->line);
  }

  at_line(kind.line, [&] { cfg.validate(); });
  return cfg;
}

namespace {

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s;
}

void write_lead(std::ostringstream& os, const char* name, const LeadConfig& l) {
  os << "\n[" << name << "]\n"
     << "site = " << l.contact_site << "\n"
     << "lambda = " << format_double(l.lambda) << "\n"
     << "omega_c = " << format_double(l.omega_c) << "\n"
     << "mu = " << format_double(l.chem_potential) << "\n"
     << "temperature = " << format_double(l.temperature) << "\n";
}

}  // namespace

std::string to_config_text(const RunConfig& c) {
  std::ostringstream os;
  os << "[wire]\n"
     << "n = " << c.wire.n_sites << "\n"
     << "j = " << format_double(c.wire.hopping) << "\n"
     << "delta = " << format_double(c.wire.pairing.real()) << "\n"
     << "delta_im = " << format_double(c.wire.pairing.imag()) << "\n"
     << "mu = " << format_double(c.wire.chem_potential) << "\n"
     << "boundary = " << to_string(c.wire.boundary) << "\n";
  for (const auto& d : c.wire.defects) os << "defect = " << d.site << ":" << format_double(d.potential) << "\n";
  if (c.left) write_lead(os, "lead.left", *c.left);
  if (c.right) write_lead(os, "lead.right", *c.right);
  os << "\n[task]\n"
     << "kind = " << to_string(c.task) << "\n"
     << "name = " << c.name << "\n"
     << "output = " << c.output_dir << "\n"
     << "self_energy = " << to_string(c.self_energy) << "\n"
     << "quad_tol = " << format_double(c.quad.rel_tol) << "\n"
     << "quad_abs_tol = " << format_double(c.quad.abs_tol) << "\n"
     << "threads = " << c.threads << "\n"
     << "dump_matrix = " << (c.dump_matrix ? "true" : "false") << "\n"
     << "gap_fraction = " << format_double(c.classify.gap_fraction) << "\n"
     << "byproduct_fraction = " << format_double(c.classify.byproduct_fraction) << "\n";
  switch (c.task) {
    case TaskKind::conductance:
      os << "v_min = " << format_double(c.v_min) << "\n"
         << "v_max = " << format_double(c.v_max) << "\n"
         << "points = " << c.points << "\n"
         << "min_peak_height = " << format_double(c.min_peak_height) << "\n"
         << "min_peak_width = " << format_double(c.min_peak_width) << "\n";
      if (!c.left_sites.empty()) os << "sites = " << join_ints(c.left_sites) << "\n";
      break;
    case TaskKind::defect_sweep:
      os << "defect_site = " << c.defect_site << "\n"
         << "mu_p_list = " << join_doubles(c.defect_potentials) << "\n";
      break;
    case TaskKind::profiles:
      if (!c.mode_pairs.empty()) os << "modes = " << join_ints(c.mode_pairs) << "\n";
      break;
    case TaskKind::spectrum:
      break;
  }
  return os.str();
}

}  // namespace kqw
