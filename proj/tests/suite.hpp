#pragma once

// Densities and targets on [-2, 2] with 81 points (h = 0.05) used by the
// relaxation, reduction and lsc checks.

#include <string>
#include <vector>

#include "suprelax/exprlang.hpp"
#include "suprelax/lattice.hpp"
#include "support.hpp"

namespace testsupport {

struct NamedDensity {
  std::string name;
  DensityTable table;
};

struct NamedTarget {
  std::string name;
  SlopeField field;
};

inline CloudPtr suite_cloud() { return line_cloud(81, -2.0, 2.0); }

inline DensityTable from_expr(const std::string& text, const CloudPtr& cloud) {
  return suprelax::sample_density(suprelax::expr::parse(text), cloud);
}

inline constexpr const char* kDoubleWell =
    "max(abs(xi_1^2-1)+0.1*abs(xi_1), abs(eta_1^2-1)+0.1*abs(eta_1))";

inline std::vector<NamedDensity> suite_densities() {
  const CloudPtr cloud = suite_cloud();
  std::vector<NamedDensity> out;
  out.push_back({"max-abs", from_expr("max(abs(xi_1),abs(eta_1))", cloud)});
  out.push_back({"double-well", from_expr(kDoubleWell, cloud)});
  out.push_back({"tilted double-well",
                 from_expr("max(abs(xi_1^2-1)+0.25*xi_1+0.5, abs(eta_1^2-1)+0.25*eta_1+0.5)", cloud)});

  // 0.5 on S1 x S1 and S2 x S2, 2 elsewhere.
  {
    const std::size_t n = cloud->size();
    auto in_s = [&](std::size_t i) {
      const double x = (*cloud)[i][0];
      if (x >= -1.5 - 1e-12 && x <= -0.5 + 1e-12) return 1;
      if (x >= 0.5 - 1e-12 && x <= 1.5 + 1e-12) return 2;
      return 0;
    };
    std::vector<double> v(n * n, 2.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (in_s(i) != 0 && in_s(i) == in_s(j)) v[i * n + j] = 0.5;
    out.push_back({"two-level mask", DensityTable(cloud, std::move(v))});
  }

  Rng rng(20240611);
  out.push_back({"random diagonal-symmetric", random_symmetric_diagonal(cloud, rng, 0.8, 20)});
  return out;
}

inline std::vector<NamedTarget> suite_targets() {
  using suprelax::Cell;
  using suprelax::Interval;
  std::vector<NamedTarget> out;
  out.push_back({"constant 0", SlopeField::constant(1, Interval{0.0, 1.0}, Point{0.0, 0.0})});
  out.push_back({"constant 0.5", SlopeField::constant(1, Interval{0.0, 1.0}, Point{0.5, 0.0})});
  out.push_back({"two-cell (-1,1)", SlopeField(1, Interval{0.0, 1.0}, {Cell{0.5, {-1.0, 0.0}}, Cell{1.0, {1.0, 0.0}}})});
  out.push_back({"four-cell ramp", SlopeField(1, Interval{0.0, 1.0},
                                              {Cell{0.25, {-1.5, 0.0}}, Cell{0.5, {-0.5, 0.0}},
                                               Cell{0.75, {0.5, 0.0}}, Cell{1.0, {1.5, 0.0}}})});
  return out;
}

}  // namespace testsupport
