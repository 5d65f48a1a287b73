#include "suprelax/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "suprelax/error.hpp"
#include "suprelax/exprlang.hpp"
#include "suprelax/io.hpp"

namespace suprelax {

namespace {

std::string point_str(const Point& p, int dim) {
  std::string s = "(" + format_real(p[0]);
  for (int k = 1; k < dim; ++k) s += ", " + format_real(p[k]);
  return s + ")";
}

bool lex_less(const Point& p, const Point& q, int dim) {
  for (int k = 0; k < dim; ++k) {
    if (p[k] != q[k]) return p[k] < q[k];
  }
  return false;
}

}  // namespace

double distance(const Point& p, const Point& q, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
  return std::sqrt(s);
}

Interval Interval::make(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    fail(ErrorKind::Domain, "interval requires finite a < b, got (" + format_real(a) + ", " +
                                format_real(b) + ")");
  return Interval{a, b};
}

// ---------------------------------------------------------------------------
// SlopeCloud

SlopeCloud::SlopeCloud(int dim, std::vector<Point> points, std::optional<UniformGrid> grid)
    : dim_(dim), points_(std::move(points)), grid_(grid) {
  if (points_.empty()) fail(ErrorKind::Domain, "slope cloud must be nonempty");
  double h = std::numeric_limits<double>::infinity();
  if (dim_ == 1) {
    for (std::size_t i = 1; i < points_.size(); ++i) h = std::min(h, points_[i][0] - points_[i - 1][0]);
  } else {
    for (std::size_t i = 0; i < points_.size(); ++i)
      for (std::size_t j = i + 1; j < points_.size(); ++j)
        h = std::min(h, distance(points_[i], points_[j], dim_));
  }
  if (points_.size() > 1 && !(h > 0.0)) fail(ErrorKind::Domain, "slope cloud points must be distinct");
  spacing_ = points_.size() > 1 ? h : 1.0;
  // Report the nominal step for grids rather than the rounded minimum.
  if (grid_ && grid_->n > 1) spacing_ = (grid_->max - grid_->min) / (grid_->n - 1);
}

SlopeCloud SlopeCloud::uniform(int dim, int n, double lo, double hi) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::Domain, "cloud dimension must be 1 or 2");
  if (n < 1) fail(ErrorKind::Domain, "cloud needs at least one point per axis");
  if (!std::isfinite(lo) || !std::isfinite(hi) || (n > 1 && !(lo < hi)))
    fail(ErrorKind::Domain, "cloud range requires finite min < max");
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    // Convex combination keeps endpoints, the midpoint and other dyadic
    // fractions exact for symmetric ranges.
    axis[k] = n == 1 ? lo : (static_cast<double>(n - 1 - k) * lo + static_cast<double>(k) * hi) / (n - 1);
  }
  std::vector<Point> pts;
  if (dim == 1) {
    for (double x : axis) pts.push_back({x, 0.0});
  } else {
    for (double x : axis)
      for (double y : axis) pts.push_back({x, y});
  }
  return SlopeCloud(dim, std::move(pts), UniformGrid{dim, n, lo, n == 1 ? lo : hi});
}

SlopeCloud SlopeCloud::from_points(int dim, std::vector<Point> points) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::Domain, "cloud dimension must be 1 or 2");
  for (auto& p : points) {
    for (int k = 0; k < dim; ++k)
      if (!std::isfinite(p[k])) fail(ErrorKind::Domain, "cloud points must be finite");
    for (int k = dim; k < kMaxDim; ++k) p[k] = 0.0;
  }
  if (dim == 1) std::sort(points.begin(), points.end(), [](const Point& p, const Point& q) { return p[0] < q[0]; });
  return SlopeCloud(dim, std::move(points), std::nullopt);
}

std::size_t SlopeCloud::nearest(const Point& p) const {
  if (dim_ == 1) {
    const auto it = std::lower_bound(points_.begin(), points_.end(), p[0],
                                     [](const Point& q, double x) { return q[0] < x; });
    if (it == points_.begin()) return 0;
    if (it == points_.end()) return points_.size() - 1;
    const auto hi = static_cast<std::size_t>(it - points_.begin());
    // ties go to the smaller point
    return (p[0] - points_[hi - 1][0] <= (*it)[0] - p[0]) ? hi - 1 : hi;
  }
  std::size_t best = 0;
  double best_d = distance(points_[0], p, dim_);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double d = distance(points_[i], p, dim_);
    if (d < best_d || (d == best_d && lex_less(points_[i], points_[best], dim_))) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

std::optional<std::size_t> SlopeCloud::snap(const Point& p, double tol) const {
  const std::size_t i = nearest(p);
  if (distance(points_[i], p, dim_) <= tol) return i;
  return std::nullopt;
}

bool SlopeCloud::operator==(const SlopeCloud& other) const {
  return dim_ == other.dim_ && points_ == other.points_;
}

bool same_cloud(const CloudPtr& a, const CloudPtr& b) { return a == b || (a && b && *a == *b); }

// ---------------------------------------------------------------------------
// PairMask

PairMask::PairMask(CloudPtr cloud)
    : cloud_(std::move(cloud)), n_(cloud_->size()), bits_(n_ * n_, 0) {}

PairMask::PairMask(CloudPtr cloud, std::vector<std::uint8_t> bits)
    : cloud_(std::move(cloud)), n_(cloud_->size()), bits_(std::move(bits)) {
  if (bits_.size() != n_ * n_)
    fail(ErrorKind::Domain, "mask has " + std::to_string(bits_.size()) + " entries, cloud needs " +
                                std::to_string(n_ * n_));
  for (auto& b : bits_) b = b ? 1 : 0;
}

PairMask PairMask::full(CloudPtr cloud) {
  const std::size_t n = cloud->size();
  return PairMask(std::move(cloud), std::vector<std::uint8_t>(n * n, 1));
}

std::size_t PairMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool PairMask::subset_of(const PairMask& other) const {
  if (!same_cloud(cloud_, other.cloud_)) fail(ErrorKind::Precondition, "masks live on different clouds");
  for (std::size_t k = 0; k < bits_.size(); ++k)
    if (bits_[k] && !other.bits_[k]) return false;
  return true;
}

PairMask& PairMask::operator|=(const PairMask& other) {
  if (!same_cloud(cloud_, other.cloud_)) fail(ErrorKind::Precondition, "masks live on different clouds");
  for (std::size_t k = 0; k < bits_.size(); ++k) bits_[k] |= other.bits_[k];
  return *this;
}

bool PairMask::operator==(const PairMask& other) const {
  return same_cloud(cloud_, other.cloud_) && bits_ == other.bits_;
}

bool is_symmetric(const PairMask& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (m.test(i, j) != m.test(j, i)) return false;
  return true;
}

bool is_diagonal(const PairMask& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m.test(i, j) && !(m.test(i, i) && m.test(j, j))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// DensityTable

double pair_norm(const SlopeCloud& cloud, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (int k = 0; k < cloud.dim(); ++k) s += cloud[i][k] * cloud[i][k] + cloud[j][k] * cloud[j][k];
  return std::sqrt(s);
}

std::optional<double> estimate_coercivity(const SlopeCloud& cloud, std::span<const double> values) {
  const std::size_t n = cloud.size();
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double r = pair_norm(cloud, i, j);
      if (r > 0.0) c = std::min(c, values[i * n + j] / r);
    }
  if (!std::isfinite(c) || !(c > 0.0)) return std::nullopt;
  // The quotient may round up; step down until the certificate scan holds.
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = 0; j < n && ok; ++j)
        ok = values[i * n + j] >= c * pair_norm(cloud, i, j);
    if (ok) return c;
    c = std::nextafter(c, 0.0);
  }
}

DensityTable::DensityTable(CloudPtr cloud, std::vector<double> values, std::optional<double> coercivity)
    : cloud_(std::move(cloud)), n_(cloud_->size()), values_(std::move(values)), coercivity_(coercivity) {
  if (values_.size() != n_ * n_)
    fail(ErrorKind::Domain, "table has " + std::to_string(values_.size()) + " entries, cloud needs " +
                                std::to_string(n_ * n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (!std::isfinite(values_[i * n_ + j]))
        fail(ErrorKind::Domain, "non-finite density value at " + point_str((*cloud_)[i], cloud_->dim()) +
                                    ", " + point_str((*cloud_)[j], cloud_->dim()));
  if (coercivity_) {
    if (!(*coercivity_ > 0.0)) fail(ErrorKind::Domain, "coercivity constant must be positive");
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (values_[i * n_ + j] < *coercivity_ * pair_norm(*cloud_, i, j))
          fail(ErrorKind::Domain, "coercivity " + format_real(*coercivity_) + " violated at pair (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")");
  }
}

DensityTable DensityTable::with_estimated_coercivity(CloudPtr cloud, std::vector<double> values) {
  // Validate shape and finiteness before estimating.
  DensityTable t(std::move(cloud), std::move(values));
  t.coercivity_ = estimate_coercivity(*t.cloud_, t.values_);
  return t;
}

double DensityTable::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double DensityTable::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

std::vector<double> DensityTable::distinct_values() const {
  std::vector<double> v(values_);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool DensityTable::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

bool DensityTable::is_diagonal() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if ((*this)(i, j) < std::max((*this)(i, i), (*this)(j, j))) return false;
  return true;
}

bool DensityTable::operator==(const DensityTable& other) const {
  return same_cloud(cloud_, other.cloud_) && values_ == other.values_ && coercivity_ == other.coercivity_;
}

DensityTable sample_density(const expr::DensityExpr& e, CloudPtr cloud) {
  const int d = cloud->dim();
  if (e.max_index() > d)
    fail(ErrorKind::Domain, "expression references component " + std::to_string(e.max_index()) +
                                " but the cloud has dimension " + std::to_string(d));
  const std::size_t n = cloud->size();
  std::vector<double> values(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Point& xi = (*cloud)[i];
      const Point& eta = (*cloud)[j];
      try {
        values[i * n + j] = expr::evaluate(e, std::span(xi.data(), d), std::span(eta.data(), d));
      } catch (const Error& err) {
        fail(ErrorKind::Domain, std::string(err.what()) + " at xi=" + point_str(xi, d) +
                                    ", eta=" + point_str(eta, d));
      }
    }
  }
  return DensityTable::with_estimated_coercivity(std::move(cloud), std::move(values));
}

PairMask sublevel(const DensityTable& table, double c) {
  const auto vals = table.values();
  std::vector<std::uint8_t> bits(vals.size());
  for (std::size_t k = 0; k < vals.size(); ++k) bits[k] = vals[k] <= c ? 1 : 0;
  return PairMask(table.cloud(), std::move(bits));
}

// ---------------------------------------------------------------------------
// SlopeField / PwAffineFn

SlopeField::SlopeField(int dim, Interval interval, std::vector<Cell> cells)
    : dim_(dim), interval_(Interval::make(interval.a, interval.b)), cells_(std::move(cells)) {
  if (dim_ < 1 || dim_ > kMaxDim) fail(ErrorKind::Domain, "slope field dimension must be 1 or 2");
  if (cells_.empty()) fail(ErrorKind::Domain, "slope field needs at least one cell");
  double prev = interval_.a;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!(cells_[i].right > prev))
      fail(ErrorKind::Domain, "cell right endpoints must be strictly increasing (cell " + std::to_string(i) + ")");
    for (int k = 0; k < dim_; ++k)
      if (!std::isfinite(cells_[i].slope[k]))
        fail(ErrorKind::Domain, "non-finite slope in cell " + std::to_string(i));
    for (int k = dim_; k < kMaxDim; ++k) cells_[i].slope[k] = 0.0;
    prev = cells_[i].right;
  }
  if (cells_.back().right != interval_.b)
    fail(ErrorKind::Domain, "last cell must end at b = " + format_real(interval_.b));
}

SlopeField SlopeField::constant(int dim, Interval interval, const Point& slope) {
  return SlopeField(dim, interval, {Cell{interval.b, slope}});
}

bool SlopeField::operator==(const SlopeField& other) const {
  if (dim_ != other.dim_ || interval_.a != other.interval_.a || interval_.b != other.interval_.b ||
      cells_.size() != other.cells_.size())
    return false;
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (cells_[i].right != other.cells_[i].right || cells_[i].slope != other.cells_[i].slope) return false;
  return true;
}

PwAffineFn::PwAffineFn(Point base, SlopeField derivative)
    : base_(base), derivative_(std::move(derivative)) {
  for (int k = derivative_.dim(); k < kMaxDim; ++k) base_[k] = 0.0;
}

Point PwAffineFn::operator()(double x) const {
  const auto& s = derivative_;
  x = std::clamp(x, s.interval().a, s.interval().b);
  Point u = base_;
  for (std::size_t i = 0; i < s.size() && s.left(i) < x; ++i) {
    const double len = std::min(x, s.right(i)) - s.left(i);
    for (int k = 0; k < s.dim(); ++k) u[k] += s.slope(i)[k] * len;
  }
  return u;
}

std::vector<Point> PwAffineFn::knot_values() const {
  std::vector<Point> out{base_};
  Point u = base_;
  for (std::size_t i = 0; i < derivative_.size(); ++i) {
    for (int k = 0; k < derivative_.dim(); ++k) u[k] += derivative_.slope(i)[k] * derivative_.length(i);
    out.push_back(u);
  }
  return out;
}

}  // namespace suprelax
