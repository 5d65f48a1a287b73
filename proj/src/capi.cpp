#include "suprelax/suprelax.h"

#include <filesystem>
#include <new>
#include <sstream>
#include <string>

#include "suprelax/envelopes.hpp"
#include "suprelax/error.hpp"
#include "suprelax/functionals.hpp"
#include "suprelax/hulls.hpp"
#include "suprelax/exprlang.hpp"
#include "suprelax/io.hpp"
#include "suprelax/oracle.hpp"

using namespace suprelax;

struct sr_mask {
  PairMask value;
};
struct sr_polytopes {
  PolytopeProductSet value;
};
struct sr_density {
  DensityTable value;
};
struct sr_envelope {
  EnvelopeResult value;
  sr_density table;
};
struct sr_field {
  SlopeField value;
};
struct sr_fn {
  PwAffineFn value;
};
struct sr_report {
  RelaxReport value;
};
struct sr_lsc {
  LscReport value;
};

namespace {

thread_local std::string g_last_error;

sr_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Domain: return SR_ERR_DOMAIN;
    case ErrorKind::Resource: return SR_ERR_RESOURCE;
    case ErrorKind::Parse: return SR_ERR_PARSE;
    case ErrorKind::Io: return SR_ERR_IO;
    case ErrorKind::Precondition: return SR_ERR_PRECONDITION;
    case ErrorKind::Internal: return SR_ERR_INTERNAL;
  }
  return SR_ERR_INTERNAL;
}

template <class F>
sr_status guard(F&& f) {
  try {
    f();
    return SR_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SR_ERR_RESOURCE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SR_ERR_INTERNAL;
  }
}

sr_status bad_arg(const char* what) {
  g_last_error = what;
  return SR_ERR_ARGUMENT;
}

HullOptions hull_options(const sr_options* o) {
  sr_options d;
  sr_options_init(&d);
  if (!o) o = &d;
  return HullOptions{o->clique_vertex_cap, o->square_cap, o->threads};
}

RelaxOptions relax_options(const sr_options* o) {
  sr_options d;
  sr_options_init(&d);
  if (!o) o = &d;
  RelaxOptions r;
  r.subset_cap = o->subset_cap;
  r.hull = hull_options(o);
  return r;
}

template <class T>
T parse_file(const char* path, T (*reader)(std::istream&)) {
  std::istringstream in(read_text_file(path));
  return reader(in);
}

template <class T>
void write_file(const char* path, const T& value, void (*writer)(const T&, std::ostream&)) {
  std::ostringstream out;
  writer(value, out);
  write_text_file(path, out.str());
}

}  // namespace

extern "C" {

const char* sr_version(void) { return "0.1.0"; }

const char* sr_last_error(void) { return g_last_error.c_str(); }

const char* sr_status_name(sr_status s) {
  switch (s) {
    case SR_OK: return "ok";
    case SR_ERR_DOMAIN: return "domain error";
    case SR_ERR_RESOURCE: return "resource cap exceeded";
    case SR_ERR_PARSE: return "parse error";
    case SR_ERR_IO: return "I/O error";
    case SR_ERR_PRECONDITION: return "precondition violated";
    case SR_ERR_INTERNAL: return "internal error";
    case SR_ERR_ARGUMENT: return "invalid argument";
  }
  return "unknown status";
}

void sr_options_init(sr_options* opts) {
  if (!opts) return;
  const HullOptions h;
  const RelaxOptions r;
  opts->threads = h.threads;
  opts->clique_vertex_cap = h.clique_vertex_cap;
  opts->square_cap = h.square_cap;
  opts->subset_cap = r.subset_cap;
}

// ---------------------------------------------------------------------------- masks

sr_status sr_mask_read_csv(const char* path, sr_mask** out) {
  if (!path || !out) return bad_arg("sr_mask_read_csv: null argument");
  return guard([&] { *out = new sr_mask{parse_file(path, read_mask_csv)}; });
}

sr_status sr_mask_write_csv(const sr_mask* mask, const char* path) {
  if (!mask || !path) return bad_arg("sr_mask_write_csv: null argument");
  return guard([&] { write_file(path, mask->value, write_mask_csv); });
}

size_t sr_mask_size(const sr_mask* mask) { return mask ? mask->value.size() : 0; }

int sr_mask_test(const sr_mask* mask, size_t i, size_t j) {
  if (!mask || i >= mask->value.size() || j >= mask->value.size()) return 0;
  return mask->value.test(i, j) ? 1 : 0;
}

int sr_mask_is_symmetric(const sr_mask* mask) { return mask && is_symmetric(mask->value) ? 1 : 0; }
int sr_mask_is_diagonal(const sr_mask* mask) { return mask && is_diagonal(mask->value) ? 1 : 0; }

void sr_mask_free(sr_mask* mask) { delete mask; }

sr_status sr_mask_hull(const sr_mask* mask, sr_hull_kind kind, sr_mask** out) {
  if (!mask || !out) return bad_arg("sr_mask_hull: null argument");
  switch (kind) {
    case SR_HULL_SC:
      return guard([&] { *out = new sr_mask{separately_convex_hull(mask->value)}; });
    case SR_HULL_HAT:
      return guard([&] { *out = new sr_mask{hat_subset(mask->value)}; });
    case SR_HULL_CARTESIAN:
      break;
  }
  return bad_arg("sr_mask_hull: use sr_mask_cartesian_hull for the Cartesian hull");
}

sr_status sr_mask_cartesian_hull(const sr_mask* mask, const sr_options* opts, sr_polytopes** out) {
  if (!mask || !out) return bad_arg("sr_mask_cartesian_hull: null argument");
  return guard([&] { *out = new sr_polytopes{cartesian_hull(mask->value, hull_options(opts))}; });
}

sr_status sr_mask_has_basic_cartesian_convexification(const sr_mask* mask, const sr_options* opts, int* out) {
  if (!mask || !out) return bad_arg("sr_mask_has_basic_cartesian_convexification: null argument");
  return guard([&] { *out = has_basic_cartesian_convexification(mask->value, hull_options(opts)) ? 1 : 0; });
}

size_t sr_polytopes_count(const sr_polytopes* set) { return set ? set->value.factors.size() : 0; }

sr_status sr_polytopes_rasterize(const sr_polytopes* set, sr_mask** out) {
  if (!set || !out) return bad_arg("sr_polytopes_rasterize: null argument");
  return guard([&] { *out = new sr_mask{rasterize(set->value, set->value.cloud)}; });
}

sr_status sr_polytopes_write_json(const sr_polytopes* set, const char* path) {
  if (!set || !path) return bad_arg("sr_polytopes_write_json: null argument");
  return guard([&] { write_text_file(path, polytopes_to_json(set->value)); });
}

void sr_polytopes_free(sr_polytopes* set) { delete set; }

// ---------------------------------------------------------------------------- densities

sr_status sr_density_from_config(const char* config_path, sr_density** out) {
  if (!config_path || !out) return bad_arg("sr_density_from_config: null argument");
  return guard([&] {
    const std::filesystem::path p(config_path);
    const DensityConfig cfg = parse_density_config(read_text_file(p), p.parent_path());
    *out = new sr_density{load_density(cfg)};
  });
}

sr_status sr_density_from_expr(const char* expr_text, int d, double min, double max, int n, sr_density** out) {
  if (!expr_text || !out) return bad_arg("sr_density_from_expr: null argument");
  return guard([&] {
    *out = new sr_density{sample_density(expr::parse(expr_text), share(SlopeCloud::uniform(d, n, min, max)))};
  });
}

sr_status sr_density_read_csv(const char* path, sr_density** out) {
  if (!path || !out) return bad_arg("sr_density_read_csv: null argument");
  return guard([&] { *out = new sr_density{parse_file(path, read_table_csv)}; });
}

sr_status sr_density_write_csv(const sr_density* density, const char* path) {
  if (!density || !path) return bad_arg("sr_density_write_csv: null argument");
  return guard([&] { write_file(path, density->value, write_table_csv); });
}

size_t sr_density_size(const sr_density* density) { return density ? density->value.size() : 0; }

double sr_density_value(const sr_density* density, size_t i, size_t j) {
  if (!density || i >= density->value.size() || j >= density->value.size()) return 0.0;
  return density->value(i, j);
}

int sr_density_is_symmetric(const sr_density* density) { return density && density->value.is_symmetric() ? 1 : 0; }
int sr_density_is_diagonal(const sr_density* density) { return density && density->value.is_diagonal() ? 1 : 0; }

sr_status sr_density_sublevel(const sr_density* density, double c, sr_mask** out) {
  if (!density || !out) return bad_arg("sr_density_sublevel: null argument");
  return guard([&] { *out = new sr_mask{sublevel(density->value, c)}; });
}

void sr_density_free(sr_density* density) { delete density; }

sr_status sr_envelope_compute(const sr_density* density, sr_envelope_kind kind, const sr_options* opts,
                              sr_envelope** out) {
  if (!density || !out) return bad_arg("sr_envelope_compute: null argument");
  return guard([&] {
    EnvelopeResult r = [&] {
      switch (kind) {
        case SR_ENV_SLC: return slc_envelope(density->value);
        case SR_ENV_XLC: return cartesian_lc_envelope(density->value, hull_options(opts));
        case SR_ENV_HAT: return EnvelopeResult{hat_density(density->value), {}, 0};
      }
      fail(ErrorKind::Precondition, "unknown envelope kind");
    }();
    DensityTable t = r.table;
    *out = new sr_envelope{std::move(r), sr_density{std::move(t)}};
  });
}

const sr_density* sr_envelope_table(const sr_envelope* env) { return env ? &env->table : nullptr; }
size_t sr_envelope_fixups(const sr_envelope* env) { return env ? env->value.fixups : 0; }
size_t sr_envelope_level_count(const sr_envelope* env) { return env ? env->value.levels.size() : 0; }

sr_status sr_envelope_write(const sr_envelope* env, const char* csv_path, const char* sidecar_path) {
  if (!env || !csv_path) return bad_arg("sr_envelope_write: null argument");
  return guard([&] {
    write_file(csv_path, env->value.table, write_table_csv);
    if (sidecar_path) write_text_file(sidecar_path, envelope_sidecar_json(env->value));
  });
}

void sr_envelope_free(sr_envelope* env) { delete env; }

// ---------------------------------------------------------------------------- fields

sr_status sr_field_read_csv(const char* path, sr_field** out) {
  if (!path || !out) return bad_arg("sr_field_read_csv: null argument");
  return guard([&] { *out = new sr_field{parse_file(path, read_field_csv)}; });
}

sr_status sr_field_write_csv(const sr_field* field, const char* path) {
  if (!field || !path) return bad_arg("sr_field_write_csv: null argument");
  return guard([&] { write_file(path, field->value, write_field_csv); });
}

size_t sr_field_cells(const sr_field* field) { return field ? field->value.size() : 0; }

void sr_field_free(sr_field* field) { delete field; }

sr_status sr_eval_sup(const sr_density* density, const sr_field* field, double* out) {
  if (!density || !field || !out) return bad_arg("sr_eval_sup: null argument");
  return guard([&] { *out = evaluate_sup(density->value, field->value); });
}

sr_status sr_feasibility(const sr_mask* mask, const sr_field* field, int* out) {
  if (!mask || !field || !out) return bad_arg("sr_feasibility: null argument");
  return guard([&] { *out = feasibility(mask->value, field->value) ? 1 : 0; });
}

sr_status sr_fn_write_csv(const sr_fn* fn, const char* path) {
  if (!fn || !path) return bad_arg("sr_fn_write_csv: null argument");
  return guard([&] { write_file(path, fn->value, write_fn_csv); });
}

sr_status sr_fn_eval(const sr_fn* fn, double x, double* out_components) {
  if (!fn || !out_components) return bad_arg("sr_fn_eval: null argument");
  return guard([&] {
    const Point u = fn->value(x);
    for (int k = 0; k < fn->value.dim(); ++k) out_components[k] = u[k];
  });
}

void sr_fn_free(sr_fn* fn) { delete fn; }

// ---------------------------------------------------------------------------- oracle

sr_status sr_relax(const sr_density* density, const sr_field* target, const sr_options* opts, sr_report** out) {
  if (!density || !target || !out) return bad_arg("sr_relax: null argument");
  return guard([&] { *out = new sr_report{relax_oracle(density->value, target->value, relax_options(opts))}; });
}

sr_status sr_report_read_json(const char* path, sr_report** out) {
  if (!path || !out) return bad_arg("sr_report_read_json: null argument");
  return guard([&] { *out = new sr_report{report_from_json(read_text_file(path))}; });
}

sr_status sr_report_write_json(const sr_report* report, const char* path) {
  if (!report || !path) return bad_arg("sr_report_write_json: null argument");
  return guard([&] { write_text_file(path, report_to_json(report->value)); });
}

namespace {
int opt_out(const std::optional<double>& v, double* out) {
  if (!v) return 0;
  if (out) *out = *v;
  return 1;
}
}  // namespace

int sr_report_oracle_value(const sr_report* r, double* out) { return r ? opt_out(r->value.oracle_value, out) : 0; }
int sr_report_envelope_value(const sr_report* r, double* out) { return r ? opt_out(r->value.envelope_value, out) : 0; }
int sr_report_gap(const sr_report* r, double* out) { return r ? opt_out(r->value.gap, out) : 0; }

void sr_report_free(sr_report* report) { delete report; }

sr_status sr_oscillate(const sr_report* report, size_t k, sr_fn** out, double* out_distance) {
  if (!report || !out) return bad_arg("sr_oscillate: null argument");
  return guard([&] {
    const RelaxReport& r = report->value;
    if (!r.oracle_value) fail(ErrorKind::Domain, "report has no witness (oracle hit its subset cap)");
    Oscillation osc = oscillation_sequence(r.witness.slopes, r.witness.weights, r.target, k, 0.5 * r.h * (1.0 + 1e-12));
    if (out_distance) *out_distance = osc.distance;
    *out = new sr_fn{std::move(osc.fn)};
  });
}

sr_status sr_check_lsc(const sr_density* density, const sr_field* target, const size_t* ks, size_t nk,
                       const sr_options* opts, sr_lsc** out) {
  if (!density || !target || (!ks && nk) || !out) return bad_arg("sr_check_lsc: null argument");
  return guard([&] {
    *out = new sr_lsc{lsc_experiment(density->value, target->value, std::span<const std::size_t>(ks, nk),
                                     relax_options(opts))};
  });
}

int sr_lsc_violated(const sr_lsc* lsc) { return lsc && lsc->value.verdict == LscVerdict::Violated ? 1 : 0; }

sr_status sr_lsc_write_json(const sr_lsc* lsc, const char* path) {
  if (!lsc || !path) return bad_arg("sr_lsc_write_json: null argument");
  return guard([&] { write_text_file(path, lsc_to_json(lsc->value)); });
}

void sr_lsc_free(sr_lsc* lsc) { delete lsc; }

}  // extern "C"
