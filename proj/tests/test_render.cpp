#include <doctest.h>

#include <cmath>
#include <random>
#include <regex>
#include <sstream>

#include "egosocial/render.hpp"

using namespace egosocial;

namespace {

std::vector<std::pair<double, double>> series_points(const std::string& svg) {
  const std::regex poly(R"re(<polygon class="series" data-name="[^"]*" points="([^"]*)")re");
  std::vector<std::pair<double, double>> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
    std::istringstream pts((*it)[1]);
    std::string pair;
    while (pts >> pair) {
      const auto comma = pair.find(',');
      out.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
    }
  }
  return out;
}

RadarSpec one_series(AxisVector values) {
  RadarSpec s;
  s.series.push_back({"only", values});
  return s;
}

}  // namespace

TEST_CASE("a series of halves is a regular pentagon at mid radius") {
  const RadarSpec spec = one_series({0.5, 0.5, 0.5, 0.5, 0.5});
  const RadarGeometry g = radar_geometry(spec);
  const auto pts = series_points(render_radar(spec));
  REQUIRE(pts.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const double dx = pts[i].first - g.cx, dy = g.cy - pts[i].second;
    CHECK(std::hypot(dx, dy) == doctest::Approx(g.radius / 2).epsilon(1e-6));
    const double angle = std::atan2(dy, dx) * 180.0 / M_PI;
    CHECK(std::remainder(angle - axis_angle_degrees(i), 360.0) == doctest::Approx(0.0).epsilon(1e-4));
  }
  CHECK(axis_angle_degrees(0) == 90.0);
  CHECK(axis_angle_degrees(1) == 18.0);
}

TEST_CASE("a series of zeros collapses to the center") {
  const RadarSpec spec = one_series({0, 0, 0, 0, 0});
  const RadarGeometry g = radar_geometry(spec);
  for (const auto& [x, y] : series_points(render_radar(spec))) {
    CHECK(x == doctest::Approx(g.cx));
    CHECK(y == doctest::Approx(g.cy));
  }
}

TEST_CASE("rendering is pure and validates its input") {
  RadarSpec spec = one_series({0.1, 0.9, 0.3, 1.0, 0.0});
  spec.provenance = "abc123";
  CHECK(render_radar(spec) == render_radar(spec));
  CHECK(render_radar(spec).find("<!-- provenance abc123 -->") != std::string::npos);
  CHECK(render_radar(spec).find("Sociality (T/A)") != std::string::npos);
  CHECK_THROWS(render_radar(one_series({0.1, 1.2, 0, 0, 0})));
  CHECK_THROWS(render_radar(RadarSpec{}));
}

TEST_CASE("side-by-side panels each get their own center") {
  RadarSpec spec;
  spec.overlay = false;
  spec.series = {{"a", {0.5, 0.5, 0.5, 0.5, 0.5}}, {"b", {1, 1, 1, 1, 1}}};
  CHECK(radar_geometry(spec, 1).cx > radar_geometry(spec, 0).cx);
  CHECK(series_points(render_radar(spec)).size() == 10);
}

TEST_CASE("names are escaped") {
  RadarSpec spec = one_series({0.5, 0.5, 0.5, 0.5, 0.5});
  spec.series[0].name = "A&B <x>";
  const std::string svg = render_radar(spec);
  CHECK(svg.find("A&amp;B &lt;x&gt;") != std::string::npos);
}

TEST_CASE("durations and numbers") {
  CHECK(format_duration(503) == "8h 23m");
  CHECK(format_duration(59.6) == "1h 0m");
  CHECK(format_duration(0) == "0h 0m");
  CHECK(parse_duration("8h 23m") == 503);
  CHECK(parse_duration("15h 52min") == 952);
  CHECK_THROWS(parse_duration("8:23"));
  CHECK(format_number(12) == "12");
  CHECK(format_number(12.5) == "12.5");
  CHECK(format_number(1.0 / 3) == "0.33");
  for (const char* s : {"0h 0m", "8h 23m", "11h 39m", "123h 5m"}) CHECK(format_duration(parse_duration(s)) == s);
}

TEST_CASE("table rows") {
  CHECK(format_trait_cells({"User 1", 9, 12, 12, 12, 503, 7, false}) == "9 | 12 | 12 | 12 | 8h 23m");
  CHECK(format_trait_cells({"Loner", 0, 0, 0, 0, 480, 1, true}) == "0 | 0 | 0 | 0 | 8h 0m");
}

TEST_CASE("random traits round-trip through the table to formatting precision") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 40), alone(0, 900);
  std::vector<SocialTraits> traits;
  for (int i = 0; i < 10; ++i)
    traits.push_back({"w" + std::to_string(i), u(rng), u(rng), u(rng), u(rng), alone(rng), 7, false});
  const std::string table = render_table(traits);
  const auto back = parse_table(table);
  REQUIRE(back.size() == traits.size());
  for (std::size_t i = 0; i < traits.size(); ++i) {
    CHECK(back[i].wearer_id == traits[i].wearer_id);
    CHECK(std::abs(back[i].num_p_day - traits[i].num_p_day) <= 0.005 + 1e-12);
    CHECK(std::abs(back[i].t_inter - traits[i].t_inter) <= 0.005 + 1e-12);
    CHECK(std::abs(back[i].t_alone - traits[i].t_alone) <= 0.5 + 1e-12);
  }
  CHECK(render_table(back) == table);
}
