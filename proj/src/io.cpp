#include "suprelax/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "suprelax/error.hpp"
#include "suprelax/exprlang.hpp"

namespace suprelax {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { fail(ErrorKind::Parse, what); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(std::string_view text, const std::string& where) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last) parse_fail("malformed number '" + t + "' in " + where);
  return v;
}

std::vector<double> parse_row(const std::string& line, std::size_t line_no) {
  std::vector<double> row;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    row.push_back(parse_real(std::string_view(line).substr(start, comma - start), "line " + std::to_string(line_no)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return row;
}

struct CsvDoc {
  std::vector<std::pair<std::string, std::string>> headers;  // key, value
  std::vector<std::vector<double>> rows;

  const std::string* header(const std::string& key) const {
    for (const auto& [k, v] : headers)
      if (k == key) return &v;
    return nullptr;
  }
};

CsvDoc read_csv(std::istream& is) {
  CsvDoc doc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto colon = t.find(':');
      if (colon == std::string::npos) continue;
      doc.headers.emplace_back(trim(std::string_view(t).substr(1, colon - 1)), trim(std::string_view(t).substr(colon + 1)));
      continue;
    }
    doc.rows.push_back(parse_row(t, line_no));
  }
  return doc;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

CloudPtr cloud_from_header(const CsvDoc& doc) {
  const std::string* h = doc.header("cloud");
  if (!h) parse_fail("missing '# cloud: <d> <n> <min> <max>' header");
  const auto tok = split_ws(*h);
  if (tok.size() != 4) parse_fail("cloud header needs 4 fields, got '" + *h + "'");
  const double d = parse_real(tok[0], "cloud header");
  const double n = parse_real(tok[1], "cloud header");
  if (d != 1.0 && d != 2.0) parse_fail("cloud dimension must be 1 or 2");
  if (n < 1.0 || n != static_cast<double>(static_cast<int>(n))) parse_fail("cloud point count must be a positive integer");
  return share(SlopeCloud::uniform(static_cast<int>(d), static_cast<int>(n), parse_real(tok[2], "cloud header"),
                                   parse_real(tok[3], "cloud header")));
}

std::string cloud_header(const SlopeCloud& cloud) {
  if (!cloud.grid())
    fail(ErrorKind::Domain, "only uniform-grid clouds can be written (the CSV header stores grid parameters)");
  const auto& g = *cloud.grid();
  return "# cloud: " + std::to_string(g.dim) + " " + std::to_string(g.n) + " " + format_real(g.min) + " " +
         format_real(g.max) + "\n";
}

void check_square(const CsvDoc& doc, std::size_t n, const char* what) {
  if (doc.rows.size() != n) parse_fail(std::string(what) + " has " + std::to_string(doc.rows.size()) + " rows, cloud needs " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i)
    if (doc.rows[i].size() != n)
      parse_fail(std::string(what) + " row " + std::to_string(i) + " has " + std::to_string(doc.rows[i].size()) +
                 " columns, expected " + std::to_string(n));
}

json point_json(const Point& p, int dim) {
  json a = json::array();
  for (int k = 0; k < dim; ++k) a.push_back(p[k]);
  return a;
}

Point point_from_json(const json& a, int dim) {
  if (!a.is_array() || static_cast<int>(a.size()) != dim) parse_fail("expected a point with " + std::to_string(dim) + " components");
  Point p{};
  for (int k = 0; k < dim; ++k) p[k] = a[k].get<double>();
  return p;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

json field_json(const SlopeField& s) {
  json cells = json::array();
  for (const auto& c : s.cells()) cells.push_back({{"right", c.right}, {"slope", point_json(c.slope, s.dim())}});
  return {{"d", s.dim()}, {"a", s.interval().a}, {"b", s.interval().b}, {"cells", cells}};
}

SlopeField field_from_json(const json& j) {
  const int dim = j.at("d").get<int>();
  std::vector<Cell> cells;
  for (const auto& c : j.at("cells")) cells.push_back(Cell{c.at("right").get<double>(), point_from_json(c.at("slope"), dim)});
  return SlopeField(dim, Interval::make(j.at("a").get<double>(), j.at("b").get<double>()), std::move(cells));
}

json report_json(const RelaxReport& r) {
  const int dim = r.target.dim();
  json slopes = json::array();
  for (const auto& p : r.witness.slopes) slopes.push_back(point_json(p, dim));
  return {{"oracle_value", opt_json(r.oracle_value)},
          {"cap_failure", !r.oracle_value.has_value()},
          {"envelope_value", opt_json(r.envelope_value)},
          {"envelope_note", r.envelope_note},
          {"gap", opt_json(r.gap)},
          {"h", r.h},
          {"witness", {{"indices", r.witness.indices}, {"slopes", slopes}, {"weights", r.witness.weights}}},
          {"target", field_json(r.target)},
          {"per_k", json::array()}};
}

template <class F>
auto guarded_json(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("JSON: ") + e.what());
  }
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) fail(ErrorKind::Internal, "number formatting failed");
  return std::string(buf, ptr);
}

// --------------------------------------------------------------------------- masks / tables

void write_mask_csv(const PairMask& mask, std::ostream& os) {
  os << cloud_header(*mask.cloud());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    for (std::size_t j = 0; j < mask.size(); ++j) os << (j ? "," : "") << (mask.test(i, j) ? '1' : '0');
    os << '\n';
  }
}

PairMask read_mask_csv(std::istream& is) {
  const CsvDoc doc = read_csv(is);
  CloudPtr cloud = cloud_from_header(doc);
  const std::size_t n = cloud->size();
  check_square(doc, n, "mask");
  std::vector<std::uint8_t> bits(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = doc.rows[i][j];
      if (v != 0.0 && v != 1.0) parse_fail("mask entries must be 0 or 1 (row " + std::to_string(i) + ")");
      bits[i * n + j] = v == 1.0;
    }
  return PairMask(std::move(cloud), std::move(bits));
}

void write_table_csv(const DensityTable& t, std::ostream& os) {
  os << cloud_header(*t.cloud());
  os << "# coercivity: " << (t.coercivity() ? format_real(*t.coercivity()) : std::string("none")) << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) os << (j ? "," : "") << format_real(t(i, j));
    os << '\n';
  }
}

DensityTable read_table_csv(std::istream& is) {
  const CsvDoc doc = read_csv(is);
  CloudPtr cloud = cloud_from_header(doc);
  const std::size_t n = cloud->size();
  check_square(doc, n, "table");
  std::vector<double> values;
  values.reserve(n * n);
  for (const auto& row : doc.rows) values.insert(values.end(), row.begin(), row.end());
  const std::string* c = doc.header("coercivity");
  if (!c) return DensityTable::with_estimated_coercivity(std::move(cloud), std::move(values));
  std::optional<double> coercivity;
  if (*c != "none") coercivity = parse_real(*c, "coercivity header");
  return DensityTable(std::move(cloud), std::move(values), coercivity);
}

// --------------------------------------------------------------------------- fields

void write_field_csv(const SlopeField& s, std::ostream& os) {
  os << "# left: " << format_real(s.interval().a) << '\n';
  for (const auto& c : s.cells()) {
    os << format_real(c.right);
    for (int k = 0; k < s.dim(); ++k) os << ',' << format_real(c.slope[k]);
    os << '\n';
  }
}

namespace {

SlopeField field_from_doc(const CsvDoc& doc) {
  double a = 0.0;
  if (const std::string* l = doc.header("left")) a = parse_real(*l, "left header");
  if (doc.rows.empty()) parse_fail("slope field has no cells");
  const std::size_t cols = doc.rows.front().size();
  if (cols < 2 || cols > 1 + kMaxDim) parse_fail("slope field rows need 2 or 3 columns");
  std::vector<Cell> cells;
  for (const auto& r : doc.rows) {
    if (r.size() != cols) parse_fail("slope field rows have inconsistent column counts");
    Cell c;
    c.right = r[0];
    for (std::size_t k = 1; k < cols; ++k) c.slope[k - 1] = r[k];
    cells.push_back(c);
  }
  const Interval iv = Interval::make(a, cells.back().right);
  return SlopeField(static_cast<int>(cols - 1), iv, std::move(cells));
}

}  // namespace

SlopeField read_field_csv(std::istream& is) { return field_from_doc(read_csv(is)); }

void write_fn_csv(const PwAffineFn& fn, std::ostream& os) {
  os << "# base:";
  for (int k = 0; k < fn.dim(); ++k) os << ' ' << format_real(fn.base()[k]);
  os << '\n';
  write_field_csv(fn.derivative(), os);
}

PwAffineFn read_fn_csv(std::istream& is) {
  const CsvDoc doc = read_csv(is);
  SlopeField field = field_from_doc(doc);
  Point base{};
  if (const std::string* b = doc.header("base")) {
    const auto tok = split_ws(*b);
    if (static_cast<int>(tok.size()) != field.dim()) parse_fail("base header needs one value per slope component");
    for (std::size_t k = 0; k < tok.size(); ++k) base[k] = parse_real(tok[k], "base header");
  }
  return PwAffineFn(base, std::move(field));
}

// --------------------------------------------------------------------------- JSON

std::string polytopes_to_json(const PolytopeProductSet& set) {
  const int dim = set.cloud ? set.cloud->dim() : 1;
  json factors = json::array();
  for (const auto& q : set.factors) {
    json verts = json::array();
    for (const auto& v : q.vertices) verts.push_back(point_json(v, dim));
    factors.push_back(verts);
  }
  return json{{"d", dim}, {"factors", factors}}.dump(2) + "\n";
}

PolytopeProductSet polytopes_from_json(const std::string& text, CloudPtr cloud) {
  return guarded_json([&] {
    const json j = json::parse(text);
    const int dim = cloud->dim();
    if (j.at("d").get<int>() != dim) parse_fail("polytope dimension does not match the cloud");
    PolytopeProductSet set{std::move(cloud), {}};
    for (const auto& f : j.at("factors")) {
      Polytope q;
      for (const auto& v : f) q.vertices.push_back(point_from_json(v, dim));
      set.factors.push_back(std::move(q));
    }
    return set;
  });
}

std::string envelope_sidecar_json(const EnvelopeResult& env) {
  return json{{"levels", env.levels}, {"fixups", env.fixups}}.dump(2) + "\n";
}

EnvelopeResult envelope_from_parts(DensityTable table, const std::string& sidecar) {
  return guarded_json([&] {
    const json j = json::parse(sidecar);
    return EnvelopeResult{std::move(table), j.at("levels").get<std::vector<double>>(), j.at("fixups").get<std::size_t>()};
  });
}

std::string report_to_json(const RelaxReport& r) { return report_json(r).dump(2) + "\n"; }

RelaxReport report_from_json(const std::string& text) {
  return guarded_json([&] {
    const json j = json::parse(text);
    SlopeField target = field_from_json(j.at("target"));
    const int dim = target.dim();
    RelaxReport r{std::move(target), j.at("h").get<double>(), opt_from_json(j, "oracle_value"),
                  opt_from_json(j, "envelope_value"), j.value("envelope_note", std::string{}), {},
                  opt_from_json(j, "gap")};
    const json& w = j.at("witness");
    r.witness.indices = w.at("indices").get<std::vector<std::size_t>>();
    for (const auto& p : w.at("slopes")) r.witness.slopes.push_back(point_from_json(p, dim));
    r.witness.weights = w.at("weights").get<std::vector<std::vector<double>>>();
    return r;
  });
}

std::string lsc_to_json(const LscReport& r) {
  json per_k = json::array();
  for (const auto& s : r.steps) per_k.push_back({{"k", s.k}, {"J", s.energy}, {"dist", s.distance}});
  json rel = report_json(r.relax);
  rel["per_k"] = per_k;
  return json{{"verdict", verdict_text(r.verdict)},
              {"J_target", r.target_energy},
              {"rate_constant", r.rate_constant},
              {"per_k", per_k},
              {"relax", rel}}
             .dump(2) +
         "\n";
}

DensityConfig parse_density_config(const std::string& text, const std::filesystem::path& base_dir) {
  return guarded_json([&] {
    const json j = json::parse(text);
    DensityConfig cfg;
    if (j.contains("expr")) cfg.expr = j["expr"].get<std::string>();
    if (j.contains("table_path")) {
      std::filesystem::path p = j["table_path"].get<std::string>();
      cfg.table_path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }
    if (cfg.expr.has_value() == cfg.table_path.has_value())
      parse_fail("density config needs exactly one of 'expr' or 'table_path'");
    if (j.contains("d")) {
      cfg.dim = j["d"].get<int>();
      if (*cfg.dim != 1 && *cfg.dim != 2) parse_fail("density config: d must be 1 or 2");
    }
    if (j.contains("grid")) {
      const json& g = j["grid"];
      cfg.grid = UniformGrid{cfg.dim.value_or(1), g.at("n").get<int>(), g.at("min").get<double>(),
                             g.at("max").get<double>()};
    } else if (cfg.expr) {
      parse_fail("density config with 'expr' needs a 'grid' {min, max, n}");
    }
    return cfg;
  });
}

DensityTable load_density(const DensityConfig& cfg) {
  if (cfg.table_path) {
    std::istringstream in(read_text_file(*cfg.table_path));
    DensityTable t = read_table_csv(in);
    if (cfg.dim && t.cloud()->dim() != *cfg.dim)
      fail(ErrorKind::Domain, "table dimension does not match 'd' in the density config");
    if (cfg.grid && !(t.cloud()->grid() == cfg.grid))
      fail(ErrorKind::Domain, "table grid does not match 'grid' in the density config");
    return t;
  }
  const auto& g = *cfg.grid;
  return sample_density(expr::parse(*cfg.expr), share(SlopeCloud::uniform(g.dim, g.n, g.min, g.max)));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

}  // namespace suprelax
