#pragma once

// Text formats: CSV for masks, tables and fields; JSON for polytopes,
// envelope sidecars, relaxation reports and density configs.
//
//   mask / table CSV   "# cloud: <d> <n> <min> <max>" (uniform grid with n
//                      points per axis), tables add "# coercivity: <C'|none>",
//                      then one comma-separated row per first argument.
//   slope field CSV    optional "# left: <a>" (default 0), then rows
//                      "right,slope_1[,slope_2]".
//   antiderivative CSV slope field CSV plus "# base: <c_1> [<c_2>]".

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "suprelax/envelopes.hpp"
#include "suprelax/hulls.hpp"
#include "suprelax/lattice.hpp"
#include "suprelax/oracle.hpp"

namespace suprelax {

/// Shortest decimal text that reads back to the same double.
std::string format_real(double x);

void write_mask_csv(const PairMask& mask, std::ostream& os);
PairMask read_mask_csv(std::istream& is);

void write_table_csv(const DensityTable& table, std::ostream& os);
DensityTable read_table_csv(std::istream& is);

void write_field_csv(const SlopeField& field, std::ostream& os);
SlopeField read_field_csv(std::istream& is);

void write_fn_csv(const PwAffineFn& fn, std::ostream& os);
PwAffineFn read_fn_csv(std::istream& is);

std::string polytopes_to_json(const PolytopeProductSet& set);
PolytopeProductSet polytopes_from_json(const std::string& text, CloudPtr cloud);

/// {"levels": [...], "fixups": n}
std::string envelope_sidecar_json(const EnvelopeResult& env);
EnvelopeResult envelope_from_parts(DensityTable table, const std::string& sidecar_json);

std::string report_to_json(const RelaxReport& report);
RelaxReport report_from_json(const std::string& text);

std::string lsc_to_json(const LscReport& report);

/// {"expr": "...", "d": 1, "grid": {"min": -2, "max": 2, "n": 81}} or
/// {"table_path": "w.csv"} (grid taken from the table header; "d", when
/// given, must match it). Relative table paths resolve against base_dir.
struct DensityConfig {
  std::optional<std::string> expr;
  std::optional<std::filesystem::path> table_path;
  std::optional<int> dim;  // 1 when absent for expressions
  std::optional<UniformGrid> grid;
};

DensityConfig parse_density_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
DensityTable load_density(const DensityConfig& cfg);

// File helpers; throw Io when the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace suprelax
