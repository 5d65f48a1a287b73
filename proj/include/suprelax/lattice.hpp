#pragma once

// Core discretized objects: slope clouds, pair masks, density tables and
// piecewise-constant slope fields with their antiderivatives.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace suprelax {

namespace expr {
class DensityExpr;
}

inline constexpr int kMaxDim = 2;

/// A slope value in R^d, d <= 2. Coordinates beyond the cloud dimension are 0.
using Point = std::array<double, kMaxDim>;

double distance(const Point& p, const Point& q, int dim);

struct Interval {
  double a = 0.0;
  double b = 1.0;

  /// Throws Domain unless a < b and both are finite.
  static Interval make(double a, double b);
  double length() const { return b - a; }
};

/// Generator parameters of a uniform (product) grid. Only clouds that carry
/// these can be written to the CSV formats.
struct UniformGrid {
  int dim = 1;
  int n = 1;  // points per axis
  double min = 0.0;
  double max = 0.0;

  bool operator==(const UniformGrid&) const = default;
};

/// Finite set of distinct slope points. 1-d clouds are sorted ascending,
/// 2-d uniform clouds are in row-major order (first coordinate major).
class SlopeCloud {
 public:
  static SlopeCloud uniform(int dim, int n, double lo, double hi);
  static SlopeCloud from_points(int dim, std::vector<Point> points);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point> points() const { return points_; }

  /// Minimum pairwise distance (1 for a single-point cloud).
  double spacing() const { return spacing_; }
  const std::optional<UniformGrid>& grid() const { return grid_; }

  /// Nearest point index; ties go to the lexicographically smaller point.
  std::size_t nearest(const Point& p) const;
  /// nearest(p) when it lies within `tol`, nullopt otherwise.
  std::optional<std::size_t> snap(const Point& p, double tol) const;

  bool operator==(const SlopeCloud& other) const;

 private:
  SlopeCloud(int dim, std::vector<Point> points, std::optional<UniformGrid> grid);

  int dim_ = 1;
  std::vector<Point> points_;
  double spacing_ = 1.0;
  std::optional<UniformGrid> grid_;
};

using CloudPtr = std::shared_ptr<const SlopeCloud>;

inline CloudPtr share(SlopeCloud cloud) {
  return std::make_shared<const SlopeCloud>(std::move(cloud));
}

bool same_cloud(const CloudPtr& a, const CloudPtr& b);

/// Boolean relation on P x P. Entry (i, j) means (p_i, p_j) is in the set.
class PairMask {
 public:
  explicit PairMask(CloudPtr cloud);
  PairMask(CloudPtr cloud, std::vector<std::uint8_t> bits);
  static PairMask full(CloudPtr cloud);

  const CloudPtr& cloud() const { return cloud_; }
  std::size_t size() const { return n_; }

  bool test(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool on = true) { bits_[i * n_ + j] = on ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool subset_of(const PairMask& other) const;
  PairMask& operator|=(const PairMask& other);

  bool operator==(const PairMask& other) const;

 private:
  CloudPtr cloud_;
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

bool is_symmetric(const PairMask& mask);
bool is_diagonal(const PairMask& mask);

/// Values of a density W on P x P, row index = first argument.
class DensityTable {
 public:
  /// Throws Domain on non-finite entries or when `coercivity` is given but
  /// not certified by a full scan.
  DensityTable(CloudPtr cloud, std::vector<double> values,
               std::optional<double> coercivity = std::nullopt);

  /// Same as the constructor, with the coercivity constant estimated from
  /// the values (see estimate_coercivity).
  static DensityTable with_estimated_coercivity(CloudPtr cloud, std::vector<double> values);

  const CloudPtr& cloud() const { return cloud_; }
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> values() const { return values_; }
  const std::optional<double>& coercivity() const { return coercivity_; }

  double min_value() const;
  double max_value() const;
  /// Sorted distinct entries.
  std::vector<double> distinct_values() const;

  bool is_symmetric() const;
  /// W(i,j) >= max(W(i,i), W(j,j)) everywhere.
  bool is_diagonal() const;

  bool operator==(const DensityTable& other) const;

 private:
  CloudPtr cloud_;
  std::size_t n_ = 0;
  std::vector<double> values_;
  std::optional<double> coercivity_;
};

/// Euclidean norm of the pair (p_i, p_j) in R^{2d}.
double pair_norm(const SlopeCloud& cloud, std::size_t i, std::size_t j);

/// Largest C' with values >= C' |(p_i,p_j)| on every pair of positive norm,
/// or nullopt when that constant is not positive (or no such pair exists).
std::optional<double> estimate_coercivity(const SlopeCloud& cloud, std::span<const double> values);

/// Evaluates `expr` at every (p_i, p_j). Throws Domain naming the first pair
/// where the value is not finite.
DensityTable sample_density(const expr::DensityExpr& expr, CloudPtr cloud);

PairMask sublevel(const DensityTable& table, double c);

struct Cell {
  double right = 0.0;
  Point slope{};
};

/// Simple function on an interval: one constant slope per cell.
class SlopeField {
 public:
  SlopeField(int dim, Interval interval, std::vector<Cell> cells);

  /// One cell covering the whole interval.
  static SlopeField constant(int dim, Interval interval, const Point& slope);

  int dim() const { return dim_; }
  const Interval& interval() const { return interval_; }
  std::size_t size() const { return cells_.size(); }
  std::span<const Cell> cells() const { return cells_; }

  double left(std::size_t i) const { return i == 0 ? interval_.a : cells_[i - 1].right; }
  double right(std::size_t i) const { return cells_[i].right; }
  double length(std::size_t i) const { return right(i) - left(i); }
  const Point& slope(std::size_t i) const { return cells_[i].slope; }

  bool operator==(const SlopeField&) const;

 private:
  int dim_ = 1;
  Interval interval_;
  std::vector<Cell> cells_;
};

/// u(x) = base + integral_a^x s(t) dt for a simple function s.
class PwAffineFn {
 public:
  PwAffineFn(Point base, SlopeField derivative);

  const Point& base() const { return base_; }
  const SlopeField& derivative() const { return derivative_; }
  int dim() const { return derivative_.dim(); }

  Point operator()(double x) const;
  /// Values at the cell endpoints a = x_0 < x_1 < ... < x_m = b.
  std::vector<Point> knot_values() const;

 private:
  Point base_;
  SlopeField derivative_;
};

}  // namespace suprelax
