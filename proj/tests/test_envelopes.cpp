#include <doctest.h>

#include <string>

#include "suite.hpp"
#include "support.hpp"
#include "suprelax/envelopes.hpp"
#include "suprelax/error.hpp"
#include "suprelax/hulls.hpp"

using namespace suprelax;
using namespace testsupport;

namespace {

bool below(const DensityTable& a, const DensityTable& b) {
  for (std::size_t k = 0; k < a.values().size(); ++k)
    if (a.values()[k] > b.values()[k]) return false;
  return true;
}

// Independent slc envelope: lowest c such that (i,j) lies in the triple-rule
// closure of the c-sublevel set.
DensityTable reference_slc(const DensityTable& v) {
  const std::size_t n = v.size();
  std::vector<double> out(n * n, -1.0);
  for (double c : v.distinct_values()) {
    const auto hull = reference_sc_hull(sublevel(v, c));
    for (std::size_t k = 0; k < n * n; ++k)
      if (hull[k] && out[k] < 0.0) out[k] = c;
  }
  return DensityTable(v.cloud(), out);
}

}  // namespace

TEST_SUITE("envelopes") {
  TEST_CASE("max-abs is its own envelope") {
    const CloudPtr cloud = line_cloud(21, -2.0, 2.0);
    const DensityTable w = from_expr("max(abs(xi_1),abs(eta_1))", cloud);
    const EnvelopeResult r = slc_envelope(w);
    CHECK(r.table.values().size() == w.values().size());
    CHECK(std::equal(r.table.values().begin(), r.table.values().end(), w.values().begin()));
    CHECK(r.fixups == 0);
  }

  TEST_CASE("double well fills the gap between the wells") {
    const CloudPtr cloud = suite_cloud();
    const DensityTable w = from_expr(kDoubleWell, cloud);
    const EnvelopeResult r = slc_envelope(w);
    CHECK(r.table(40, 40) == doctest::Approx(0.1));  // (0, 0)
    CHECK(r.table(20, 60) == doctest::Approx(0.1));
    CHECK(w(40, 40) == 1.0);
    CHECK(r.fixups > 0);
    CHECK(std::is_sorted(r.levels.begin(), r.levels.end()));
  }

  TEST_CASE("slc envelope agrees with the reference and is a fixed point") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const CloudPtr cloud = line_cloud(rng.integer(1, 25), -1.0, 1.0);
      const DensityTable v = random_symmetric_diagonal(cloud, rng, rng.uniform(0.0, 2.0), trial % 3 ? 8 : 0);
      const EnvelopeResult r = slc_envelope(v);
      const DensityTable ref = reference_slc(v);
      CHECK(std::equal(r.table.values().begin(), r.table.values().end(), ref.values().begin()));
      CHECK(below(r.table, v));
      CHECK(r.table.is_symmetric());
      CHECK(r.table.is_diagonal());
      const EnvelopeResult again = slc_envelope(r.table);
      CHECK(std::equal(again.table.values().begin(), again.table.values().end(), r.table.values().begin()));
    }
  }

  TEST_CASE("preconditions") {
    const CloudPtr cloud = line_cloud(3, -1.0, 1.0);
    const DensityTable asym(cloud, {0, 1, 1, 2, 0, 1, 1, 1, 0});
    try {
      slc_envelope(asym);
      FAIL("expected a precondition error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Precondition);
      CHECK(std::string(e.what()).find("hat_density") != std::string::npos);
    }
    CHECK_THROWS_AS(cartesian_lc_envelope(asym), Error);
    CHECK_NOTHROW(slc_envelope(hat_density(asym)));
    CHECK_THROWS_AS(slc_envelope(hat_density(DensityTable(share(SlopeCloud::uniform(2, 2, 0, 1)),
                                                          std::vector<double>(16, 1.0)))),
                    Error);
  }

  TEST_CASE("hat density composed with the envelope") {
    Rng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
      const CloudPtr cloud = line_cloud(rng.integer(2, 20), -1.0, 1.0);
      const DensityTable w = random_table(cloud, rng, 5);
      const DensityTable hat = hat_density(w);
      const EnvelopeResult env = slc_envelope(hat);
      CHECK(below(env.table, hat));
      for (double c : hat.distinct_values())
        CHECK(sublevel(env.table, c) == separately_convex_hull(hat_subset(sublevel(w, c))));
    }
  }

  TEST_CASE("Cartesian envelope in d = 2 has convexified sublevel sets") {
    Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
      const CloudPtr cloud = share(SlopeCloud::uniform(2, 4, -1.0, 1.0));
      const DensityTable w = random_symmetric_diagonal(cloud, rng, rng.uniform(0.5, 2.0), 4);
      HullOptions opts;
      opts.threads = 1 + trial % 3;
      try {
        const EnvelopeResult r = cartesian_lc_envelope(w, opts);
        CHECK(below(r.table, w));
        for (double c : w.distinct_values()) {
          const PairMask level = sublevel(r.table, c);
          CHECK(cartesian_hull_mask(level) == level);
          CHECK(level == cartesian_hull_mask(sublevel(w, c)));
        }
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
      }
    }
  }

  TEST_CASE("Cartesian envelope reports the level without a basic convexification") {
    const CloudPtr cloud = share(SlopeCloud::uniform(2, 7, 0.0, 6.0));
    auto at = [](std::size_t x, std::size_t y) { return x * 7 + y; };
    const std::size_t n = cloud->size();
    std::vector<double> v(n * n, 1.0);
    for (const auto& a : std::vector<std::vector<std::size_t>>{
             {at(0, 1), at(6, 1)}, {at(1, 0), at(1, 6)}, {at(0, 6), at(6, 0)}})
      for (auto i : a)
        for (auto j : a) v[i * n + j] = 0.25;
    const DensityTable w(cloud, v);
    REQUIRE(w.is_symmetric());
    REQUIRE(w.is_diagonal());
    try {
      cartesian_lc_envelope(w);
      FAIL("expected a domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Domain);
      CHECK(std::string(e.what()).find("0.25") != std::string::npos);
    }
  }

  TEST_CASE("Cartesian envelope equals the slc envelope in d = 1") {
    Rng rng(34);
    for (int trial = 0; trial < 20; ++trial) {
      const CloudPtr cloud = line_cloud(rng.integer(2, 40), -1.0, 1.0);
      const DensityTable v = random_symmetric_diagonal(cloud, rng, rng.uniform(0.3, 2.0), 10);
      const EnvelopeResult a = slc_envelope(v);
      const EnvelopeResult b = cartesian_lc_envelope(v);
      CHECK(std::equal(a.table.values().begin(), a.table.values().end(), b.table.values().begin()));
      CHECK(a.levels == b.levels);
    }
  }
}
