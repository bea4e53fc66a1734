#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "e2boost/netmodel.hpp"

using namespace e2boost;
using std::numbers::pi;

namespace {

// Independent construction: work with polar angles only. When the angle BRU is
// at most 90 degrees the panel runs along the internal bisector of RB and RU,
// otherwise it is perpendicular to it. Returned modulo pi.
double panel_angle_oracle(double bx, double by, double ux, double uy) {
  const double tb = std::atan2(by, bx), tu = std::atan2(uy, ux);
  double diff = std::remainder(tu - tb, 2 * pi);  // signed angle B -> U in (-pi, pi]
  const double bisector = tb + diff / 2;
  const bool acute = std::abs(diff) <= pi / 2 + 1e-15;
  double a = acute ? bisector : bisector + pi / 2;
  a = std::fmod(a, pi);
  if (a < 0) a += pi;
  return a;
}

double mod_pi(double a) {
  a = std::fmod(a, pi);
  if (a < 0) a += pi;
  return a;
}

bool same_line(double a, double b) {
  const double d = std::abs(mod_pi(a) - mod_pi(b));
  return d < 1e-12 || std::abs(d - pi) < 1e-12;
}

}  // namespace

TEST_CASE("orientation: right angle case") {
  const double phi = compute_ris_orientation({1, 0, 0}, {0, 0, 10}, {0, 1, 0});
  CHECK(phi == doctest::Approx(pi / 4).epsilon(1e-15));
}

TEST_CASE("orientation: collinear points fall back to the normal of RU") {
  const double phi = compute_ris_orientation({2, 0, 0}, {0, 0, 10}, {1, 0, 0});
  CHECK(phi == doctest::Approx(0.0));
}

TEST_CASE("orientation: zero-length vectors are rejected") {
  CHECK_THROWS_AS(compute_ris_orientation({0, 0, 0}, {0, 0, 10}, {1, 1, 0}), GeometryError);
  CHECK_THROWS_AS(compute_ris_orientation({1, 0, 0}, {3, 3, 10}, {3, 3, 0}), GeometryError);
}

TEST_CASE("orientation matches the rotate-and-bisect construction") {
  const double phi = compute_ris_orientation({0, 100, 20}, {50, 100, 10}, {150, 150, 1.5});
  CHECK(same_line(phi, panel_angle_oracle(-50, 0, 100, 50)));

  Rng rng(2024);
  for (int i = 0; i < 500; ++i) {
    const Position3D r{uniform01(rng) * 200, uniform01(rng) * 200, 10};
    const Position3D b{uniform01(rng) * 200, uniform01(rng) * 200, 20};
    const Position3D u{uniform01(rng) * 200, uniform01(rng) * 200, 1.5};
    const double got = compute_ris_orientation(b, r, u);
    CHECK(got >= -pi / 2);
    CHECK(got <= pi / 2);
    CHECK(same_line(got, panel_angle_oracle(b.x - r.x, b.y - r.y, u.x - r.x, u.y - r.y)));
  }
}

TEST_CASE("orientation is translation invariant") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const Position3D r{uniform01(rng) * 200, uniform01(rng) * 200, 10};
    const Position3D b{uniform01(rng) * 200, uniform01(rng) * 200, 20};
    const Position3D u{uniform01(rng) * 200, uniform01(rng) * 200, 1.5};
    const double dx = uniform01(rng) * 1000 - 500, dy = uniform01(rng) * 1000 - 500;
    const double a = compute_ris_orientation(b, r, u);
    const double t = compute_ris_orientation({b.x + dx, b.y + dy, b.z}, {r.x + dx, r.y + dy, r.z},
                                             {u.x + dx, u.y + dy, u.z});
    CHECK(a == doctest::Approx(t).epsilon(1e-9));
  }
}

TEST_CASE("element grid") {
  SUBCASE("central element is the panel center") {
    const auto g = make_ris({115, 195, 10}, 101, 101, 0.01, 0.01, 0.3);
    CHECK(g.element_count() == 101u * 101u);
    CHECK(g.element(50, 50) == Position3D{115, 195, 10});
  }
  SUBCASE("unit offsets along the panel direction") {
    const auto g0 = make_ris({0, 0, 10}, 101, 101, 0.01, 0.01, 0.0);
    CHECK(g0.element(51, 50).x == doctest::Approx(0.01));
    CHECK(g0.element(51, 50).y == doctest::Approx(0.0));
    CHECK(g0.element(51, 50).z == doctest::Approx(10.0));
    const auto g90 = make_ris({0, 0, 10}, 101, 101, 0.01, 0.01, pi / 2);
    CHECK(g90.element(51, 50).x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g90.element(51, 50).y == doctest::Approx(0.01));
    CHECK(g0.element(50, 51).z == doctest::Approx(10.01));
  }
  SUBCASE("grid reproduces the closed form everywhere") {
    const auto g = make_ris({95, 165, 10}, 11, 7, 0.02, 0.03, -0.7);
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) {
        const double off = (r + 1 - 6) * 0.02;
        const auto& e = g.element(r, c);
        CHECK(e.x == 95 + off * std::cos(-0.7));
        CHECK(e.y == 165 + off * std::sin(-0.7));
        CHECK(e.z == 10 + (c + 1 - 4) * 0.03);
      }
  }
}

TEST_CASE("distances are symmetric and satisfy the triangle inequality") {
  const auto s = fig3_scenario();
  std::vector<Position3D> pts{s.bs};
  pts.insert(pts.end(), s.devices.begin(), s.devices.end());
  for (const auto& r : s.riss) pts.push_back(r.center);
  for (const auto& a : pts)
    for (const auto& b : pts) {
      CHECK(distance(a, b) == distance(b, a));
      for (const auto& c : pts) CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
    }
}

TEST_CASE("validation") {
  SUBCASE("shipped layout is valid") { CHECK(validate_scenario(fig3_scenario()).empty()); }
  SUBCASE("rates not descending") {
    auto s = fig3_scenario();
    std::swap(s.sf_table.rates[0], s.sf_table.rates[1]);
    const auto v = validate_scenario(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].path == "sf_table.rates");
  }
  SUBCASE("activity probability out of range") {
    auto s = fig3_scenario();
    s.ris_active_prob[1] = 1.3;
    const auto v = validate_scenario(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].path.find("ris_active_prob") == 0);
  }
  SUBCASE("devices closer than the minimum spacing") {
    auto s = fig3_scenario();
    s.devices[1] = {s.devices[0].x + 1, s.devices[0].y, s.devices[0].z};
    CHECK_FALSE(validate_scenario(s).empty());
  }
  SUBCASE("stale element grid") {
    auto s = fig3_scenario();
    s.riss[0].orientation += 0.1;
    CHECK_FALSE(validate_scenario(s).empty());
  }
}

TEST_CASE("device sampling respects the disc and the spacing") {
  Rng rng(11);
  const Disc disc{150, 150, 22.5};
  for (int rep = 0; rep < 20; ++rep) {
    const auto pts = sample_devices_in_disc(disc, 11, 5.0, 1.5, rng);
    REQUIRE(pts.size() == 11);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(std::hypot(pts[i].x - 150, pts[i].y - 150) <= 22.5);
      CHECK(pts[i].z == 1.5);
      for (std::size_t j = i + 1; j < pts.size(); ++j) CHECK(distance_xy(pts[i], pts[j]) >= 5.0);
    }
  }
  CHECK_THROWS_AS(sample_devices_in_disc({0, 0, 1}, 5, 5.0, 1.5, rng), GeometryError);
}

TEST_CASE("phase mode parsing") {
  CHECK(parse_phase_mode("optimal").mode == PhaseMode::OptimalForUEs);
  const auto c = parse_phase_mode("constant:170");
  CHECK(c.mode == PhaseMode::Constant);
  CHECK(c.rho == 170);
  CHECK(parse_phase_mode(to_string(c)) == c);
  CHECK_THROWS(parse_phase_mode("constant:abc"));
  CHECK_THROWS(parse_phase_mode("sideways"));
}
