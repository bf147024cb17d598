#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kqw/config.hpp"
#include "kqw/spectrum.hpp"
#include "kqw/transport.hpp"

namespace kqw {

/// '#' comment block opening every output file: program version, self-energy
/// mode and the canonical config between marker lines.
std::string output_preamble(const RunConfig& config);

/// Recovers the config text embedded in an output file (or returns `text`
/// unchanged when it holds no preamble).
std::string extract_embedded_config(std::string_view text);

void write_spectrum_csv(std::ostream& out, const RunConfig& config, const std::vector<ModePair>& pairs);
void write_profile_csv(std::ostream& out, const RunConfig& config, const EigenMode& mode);
void write_majorana_csv(std::ostream& out, const RunConfig& config, const EigenMode& mode);

struct DefectSweepRow {
  double potential = 0.0;
  double in_gap_energy = 0.0;  // lowest in-gap pair energy, NaN if none
  int in_gap_count = 0;
};
void write_defect_sweep_csv(std::ostream& out, const RunConfig& config, const std::vector<DefectSweepRow>& rows);

void write_conductance_csv(std::ostream& out, const RunConfig& config, const ConductanceCurve& curve);
void write_peaks_csv(std::ostream& out, const RunConfig& config, const std::vector<Peak>& peaks);

/// The config as structured JSON (the metadata sidecar's "config" entry).
nlohmann::ordered_json config_json(const RunConfig& config);

/// JSON number, with non-finite values mapped to null.
nlohmann::ordered_json json_number(double x);

}  // namespace kqw
