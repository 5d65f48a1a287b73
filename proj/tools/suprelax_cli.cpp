// suprelax command-line tool. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "suprelax/suprelax.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitResource = 2;

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using MaskPtr = std::unique_ptr<sr_mask, Deleter<sr_mask, sr_mask_free>>;
using PolyPtr = std::unique_ptr<sr_polytopes, Deleter<sr_polytopes, sr_polytopes_free>>;
using DensityPtr = std::unique_ptr<sr_density, Deleter<sr_density, sr_density_free>>;
using EnvPtr = std::unique_ptr<sr_envelope, Deleter<sr_envelope, sr_envelope_free>>;
using FieldPtr = std::unique_ptr<sr_field, Deleter<sr_field, sr_field_free>>;
using FnPtr = std::unique_ptr<sr_fn, Deleter<sr_fn, sr_fn_free>>;
using ReportPtr = std::unique_ptr<sr_report, Deleter<sr_report, sr_report_free>>;
using LscPtr = std::unique_ptr<sr_lsc, Deleter<sr_lsc, sr_lsc_free>>;

struct Failure {
  sr_status status;
  std::string message;
};

// Throws Failure with the library message prefixed by `context`
// (the flag and file involved).
void check(sr_status s, const std::string& context, const std::string& hint = {}) {
  if (s == SR_OK) return;
  std::string msg = context + ": " + sr_last_error();
  if (!hint.empty()) msg += " (" + hint + ")";
  throw Failure{s, msg};
}

int exit_code(sr_status s) { return s == SR_ERR_RESOURCE ? kExitResource : kExitDomain; }

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> ks;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size() || v == 0)
      throw Failure{SR_ERR_ARGUMENT, "--k: expected a comma-separated list of positive integers, got '" + text + "'"};
    ks.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ks;
}

std::string sidecar_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.extension() == ".json") return out + ".levels.json";
  return p.replace_extension(".json").string();
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that reads back identically.
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[64];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

DensityPtr load_density(const std::string& path) {
  sr_density* d = nullptr;
  check(sr_density_from_config(path.c_str(), &d), "--density " + path);
  return DensityPtr(d);
}

FieldPtr load_field(const std::string& path) {
  sr_field* f = nullptr;
  check(sr_field_read_csv(path.c_str(), &f), "--field " + path);
  return FieldPtr(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convexification envelopes and relaxation checks for nonlocal supremal functionals"};
  app.require_subcommand(1);

  sr_options opts;
  sr_options_init(&opts);
  app.add_option("--threads", opts.threads, "Worker threads (outputs do not depend on this)")->check(CLI::PositiveNumber);

  if (const char* cap = std::getenv("SUPRELAX_CLIQUE_CAP")) {
    try {
      opts.clique_vertex_cap = std::stoul(cap);
    } catch (const std::exception&) {
      std::cerr << "error: SUPRELAX_CLIQUE_CAP must be a positive integer, got '" << cap << "'\n";
      return kExitDomain;
    }
  }

  // hull
  std::string hull_in, hull_out, hull_kind = "sc", hull_poly;
  auto* hull = app.add_subcommand("hull", "Convex hull of a pair mask");
  hull->add_option("--in", hull_in, "Input mask CSV")->required();
  hull->add_option("--out", hull_out, "Output mask CSV")->required();
  hull->add_option("--kind", hull_kind, "sc | hat | cartesian")->check(CLI::IsMember({"sc", "hat", "cartesian"}));
  hull->add_option("--polytopes", hull_poly, "Also write the Cartesian hull factors as JSON");

  // envelope
  std::string env_density, env_kind, env_out, env_sidecar;
  auto* env = app.add_subcommand("envelope", "Level convex envelope of a density");
  env->add_option("--density", env_density, "Density config JSON")->required();
  env->add_option("--kind", env_kind, "slc | xlc | hat")->required()->check(CLI::IsMember({"slc", "xlc", "hat"}));
  env->add_option("--out", env_out, "Envelope table CSV")->required();
  env->add_option("--sidecar", env_sidecar, "Levels/fixups JSON (default: --out with .json extension)");

  // eval
  std::string eval_density, eval_field;
  auto* ev = app.add_subcommand("eval", "Print J(u) for the antiderivative of a slope field");
  ev->add_option("--density", eval_density, "Density config JSON")->required();
  ev->add_option("--field", eval_field, "Slope field CSV")->required();

  // relax
  std::string rx_density, rx_field, rx_out;
  auto* rx = app.add_subcommand("relax", "Relaxed value by brute force and by the envelope");
  rx->add_option("--density", rx_density, "Density config JSON")->required();
  rx->add_option("--field", rx_field, "Target slope field CSV")->required();
  rx->add_option("--out", rx_out, "Report JSON")->required();

  // oscillate
  std::string osc_witness, osc_out;
  std::size_t osc_k = 10;
  auto* osc = app.add_subcommand("oscillate", "Recovery sequence element from a relax report");
  osc->add_option("--witness", osc_witness, "Report JSON written by relax")->required();
  osc->add_option("--k", osc_k, "Blocks per target cell")->check(CLI::PositiveNumber);
  osc->add_option("--out", osc_out, "Antiderivative CSV")->required();

  // check-lsc
  std::string lsc_density, lsc_field, lsc_k = "2,4,8,16", lsc_out;
  auto* lsc = app.add_subcommand("check-lsc", "Lower semicontinuity experiment along oscillating sequences");
  lsc->add_option("--density", lsc_density, "Density config JSON")->required();
  lsc->add_option("--field", lsc_field, "Target slope field CSV")->required();
  lsc->add_option("--k", lsc_k, "Comma-separated refinement levels");
  lsc->add_option("--out", lsc_out, "Verdict JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitDomain;
  }

  try {
    if (*hull) {
      sr_mask* raw = nullptr;
      check(sr_mask_read_csv(hull_in.c_str(), &raw), "--in " + hull_in);
      MaskPtr in(raw);
      sr_mask* res = nullptr;
      if (hull_kind == "cartesian") {
        sr_polytopes* poly = nullptr;
        check(sr_mask_cartesian_hull(in.get(), &opts, &poly), "--in " + hull_in);
        PolyPtr p(poly);
        check(sr_polytopes_rasterize(p.get(), &res), "--in " + hull_in);
        if (!hull_poly.empty()) check(sr_polytopes_write_json(p.get(), hull_poly.c_str()), "--polytopes " + hull_poly);
      } else {
        check(sr_mask_hull(in.get(), hull_kind == "sc" ? SR_HULL_SC : SR_HULL_HAT, &res), "--in " + hull_in);
      }
      MaskPtr out(res);
      check(sr_mask_write_csv(out.get(), hull_out.c_str()), "--out " + hull_out);
    } else if (*env) {
      DensityPtr d = load_density(env_density);
      const sr_envelope_kind kind = env_kind == "slc" ? SR_ENV_SLC : env_kind == "xlc" ? SR_ENV_XLC : SR_ENV_HAT;
      sr_envelope* raw = nullptr;
      const sr_status s = sr_envelope_compute(d.get(), kind, &opts, &raw);
      check(s, "--density " + env_density, s == SR_ERR_PRECONDITION ? "symmetrize first with --kind hat" : "");
      EnvPtr e(raw);
      const std::string side = env_sidecar.empty() ? sidecar_path(env_out) : env_sidecar;
      check(sr_envelope_write(e.get(), env_out.c_str(), side.c_str()), "--out " + env_out);
    } else if (*ev) {
      DensityPtr d = load_density(eval_density);
      FieldPtr f = load_field(eval_field);
      double j = 0.0;
      check(sr_eval_sup(d.get(), f.get(), &j), "--field " + eval_field);
      std::cout << format_number(j) << '\n';
    } else if (*rx) {
      DensityPtr d = load_density(rx_density);
      FieldPtr f = load_field(rx_field);
      sr_report* raw = nullptr;
      const sr_status s = sr_relax(d.get(), f.get(), &opts, &raw);
      check(s, "--density " + rx_density, s == SR_ERR_PRECONDITION ? "symmetrize first with envelope --kind hat" : "");
      ReportPtr r(raw);
      check(sr_report_write_json(r.get(), rx_out.c_str()), "--out " + rx_out);
    } else if (*osc) {
      sr_report* raw = nullptr;
      check(sr_report_read_json(osc_witness.c_str(), &raw), "--witness " + osc_witness);
      ReportPtr r(raw);
      sr_fn* fn = nullptr;
      double dist = 0.0;
      check(sr_oscillate(r.get(), osc_k, &fn, &dist), "--witness " + osc_witness);
      FnPtr u(fn);
      check(sr_fn_write_csv(u.get(), osc_out.c_str()), "--out " + osc_out);
      std::cout << "distance " << format_number(dist) << '\n';
    } else if (*lsc) {
      const std::vector<std::size_t> ks = parse_k_list(lsc_k);
      DensityPtr d = load_density(lsc_density);
      FieldPtr f = load_field(lsc_field);
      sr_lsc* raw = nullptr;
      const sr_status s = sr_check_lsc(d.get(), f.get(), ks.data(), ks.size(), &opts, &raw);
      check(s, "--density " + lsc_density, s == SR_ERR_PRECONDITION ? "symmetrize first with envelope --kind hat" : "");
      LscPtr l(raw);
      check(sr_lsc_write_json(l.get(), lsc_out.c_str()), "--out " + lsc_out);
      std::cout << (sr_lsc_violated(l.get()) ? "lsc violated" : "consistent with lsc") << '\n';
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return exit_code(f.status);
  }
  return kExitOk;
}
