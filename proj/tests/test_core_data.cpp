#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "flowgraph/attraction.hpp"
#include "flowgraph/encode.hpp"
#include "flowgraph/error.hpp"
#include "flowgraph/geo.hpp"
#include "flowgraph/rng.hpp"

using namespace flowgraph;

namespace {

Attraction make_attraction(const std::string& id) {
  Attraction a;
  a.id = id;
  a.name = "name " + id;
  a.lon = 116.4;
  a.lat = 39.9;
  a.area = 1000.0;
  a.adname = "dongcheng";
  a.ticket_price = 60.0;
  a.type = "historical sites";
  a.ranking = 4.5;
  a.comment_number = 1200.0;
  a.level = "5A";
  a.est_visit_time = 3.0;
  return a;
}

}  // namespace

TEST_CASE("encode_level maps grades to 1..5") {
  CHECK(encode_level("no-level") == 1);
  CHECK(encode_level("2A") == 2);
  CHECK(encode_level("3A") == 3);
  CHECK(encode_level("4A") == 4);
  CHECK(encode_level("5A") == 5);
  CHECK_THROWS_AS(encode_level("6A"), SchemaError);
  CHECK_THROWS_AS(encode_level(""), SchemaError);
}

TEST_CASE("ordinal encoding is lexicographic and order-independent") {
  const auto enc = CategoryEncoder::fit({"b", "a", "b"});
  CHECK(enc.size() == 2);
  CHECK(enc.transform("a") == 0);
  CHECK(enc.transform("b") == 1);

  const auto single = CategoryEncoder::fit({"x"});
  CHECK(single.transform("x") == 0);

  const auto shuffled = CategoryEncoder::fit({"b", "a"});
  CHECK(shuffled.transform("a") == 0);

  // stable across permuted inputs
  Rng rng(7);
  std::vector<std::string> labels = {"zoo", "park", "museum", "park", "alley"};
  const auto reference = CategoryEncoder::fit(labels);
  for (int round = 0; round < 10; ++round) {
    rng.shuffle(labels);
    const auto enc2 = CategoryEncoder::fit(labels);
    CHECK(enc2.labels() == reference.labels());
  }

  CHECK_THROWS_AS(reference.transform("unknown"), SchemaError);
  CHECK_THROWS_AS(CategoryEncoder::fit({}), SchemaError);
}

TEST_CASE("min-max scaler maps columns to [0,1], constants to 0") {
  using Row = std::vector<double>;
  const auto s = FeatureScaler::fit({{2}, {4}, {6}});
  CHECK(s.transform(Row{2})[0] == doctest::Approx(0.0));
  CHECK(s.transform(Row{4})[0] == doctest::Approx(0.5));
  CHECK(s.transform(Row{6})[0] == doctest::Approx(1.0));

  const auto constant = FeatureScaler::fit({{7}, {7}});
  CHECK(constant.transform(Row{7})[0] == 0.0);

  const auto identity = FeatureScaler::fit({{0}, {1}});
  CHECK(identity.transform(Row{0})[0] == 0.0);
  CHECK(identity.transform(Row{1})[0] == 1.0);

  CHECK_THROWS_AS(FeatureScaler::fit({}), SchemaError);
}

TEST_CASE("rescaling already-scaled data is the identity") {
  Rng rng(11);
  std::vector<std::vector<double>> rows(20, std::vector<double>(4));
  for (auto& row : rows) {
    for (auto& v : row) v = rng.uniform(-50.0, 50.0);
  }
  const auto scaler = FeatureScaler::fit(rows);
  const auto scaled = scaler.transform(rows);
  const auto refit = FeatureScaler::fit(scaled);
  const auto rescaled = refit.transform(scaled);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(rescaled[r][c] == doctest::Approx(scaled[r][c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("haversine distance") {
  const LonLat beijing{116.39, 39.93};
  CHECK(haversine_distance(beijing, beijing) == 0.0);

  // quarter meridian: equator to pole
  const double quarter = haversine_distance({0.0, 0.0}, {0.0, 90.0});
  CHECK(quarter == doctest::Approx(10'007'543.0).epsilon(1e-7));

  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const LonLat a{rng.uniform(-180, 180), rng.uniform(-90, 90)};
    const LonLat b{rng.uniform(-180, 180), rng.uniform(-90, 90)};
    const double dab = haversine_distance(a, b);
    CHECK(dab == haversine_distance(b, a));
    CHECK(dab >= 0.0);
  }
}

TEST_CASE("feature vectors use the fixed column order and scaler bounds") {
  std::vector<Attraction> attractions;
  auto lo = make_attraction("low");
  lo.lon = 116.0; lo.lat = 39.0; lo.area = 100; lo.adname = "aaa"; lo.ticket_price = 0;
  lo.type = "amusement park"; lo.ranking = 3; lo.comment_number = 10; lo.level = "no-level";
  lo.est_visit_time = 1;
  auto hi = make_attraction("high");
  hi.lon = 117.0; hi.lat = 40.0; hi.area = 900; hi.adname = "bbb"; hi.ticket_price = 200;
  hi.type = "natural scenery"; hi.ranking = 5; hi.comment_number = 9000; hi.level = "5A";
  hi.est_visit_time = 8;
  attractions = {lo, hi};

  const auto codec = FeatureCodec::fit(attractions);
  const auto v_lo = codec.feature_vector(lo);
  const auto v_hi = codec.feature_vector(hi);
  REQUIRE(v_lo.size() == kFeatureCount);
  for (double v : v_lo) CHECK(v == 0.0);
  for (double v : v_hi) CHECK(v == 1.0);

  // level codes enter before scaling: 4A -> 4
  auto mid = make_attraction("mid");
  mid.level = "4A";
  mid.adname = "aaa";
  mid.type = "amusement park";
  const auto raw = codec.raw_vector(mid);
  CHECK(raw[8] == 4.0);
  CHECK(raw[3] == 0.0);  // adname "aaa" -> code 0

  auto odd = make_attraction("odd");
  odd.adname = "zzz";  // unseen category
  CHECK_THROWS_AS(codec.feature_vector(odd), SchemaError);
}

TEST_CASE("attraction validation enforces schema invariants") {
  auto a = make_attraction("x");
  CHECK_NOTHROW(validate_attraction(a));
  a.lat = 95.0;
  CHECK_THROWS_AS(validate_attraction(a), SchemaError);
  a = make_attraction("x");
  a.type = "theme park";  // not one of the six categories
  CHECK_THROWS_AS(validate_attraction(a), SchemaError);
  a = make_attraction("x");
  a.est_visit_time = 0.0;
  CHECK_THROWS_AS(validate_attraction(a), SchemaError);

  CHECK_THROWS_AS(validate_attractions({make_attraction("dup"), make_attraction("dup")}),
                  SchemaError);
}

TEST_CASE("attractions.csv round trip and header validation") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "flowgraph_core_data_test";
  fs::create_directories(dir);

  auto a = make_attraction("forbidden_city");
  a.aliases = {"Gugong", "Palace Museum"};
  auto b = make_attraction("summer_palace");
  b.type = "natural scenery";
  save_attractions_csv(dir / "attractions.csv", {a, b});
  const auto loaded = load_attractions_csv(dir / "attractions.csv");
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].id == "forbidden_city");
  CHECK(loaded[0].aliases == std::vector<std::string>{"Gugong", "Palace Museum"});
  CHECK(loaded[1].type == "natural scenery");
  CHECK(loaded[0].lon == a.lon);

  std::ofstream bad(dir / "bad.csv");
  bad << "id,name\nx,y\n";
  bad.close();
  CHECK_THROWS_AS(load_attractions_csv(dir / "bad.csv"), DataError);
  fs::remove_all(dir);
}
