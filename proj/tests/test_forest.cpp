#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "flowgraph/error.hpp"
#include "flowgraph/forest.hpp"
#include "flowgraph/rng.hpp"

using namespace flowgraph;

namespace {

std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t p, Rng& rng) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(p));
  for (std::size_t i = 0; i < n; ++i) {
    rows[i][0] = static_cast<double>(i);  // strictly distinct first feature
    for (std::size_t c = 1; c < p; ++c) rows[i][c] = rng.uniform(-5.0, 5.0);
  }
  return rows;
}

// Recomputes the weighted SSE decomposition for every internal node of a
// tree fitted without bootstrap (sample = all rows).
void check_split_quality(const RegressionTree& tree, const std::vector<std::vector<double>>& x,
                         const std::vector<double>& y) {
  struct Frame {
    int node;
    std::vector<std::size_t> idx;
  };
  std::vector<std::size_t> all(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) all[i] = i;
  std::vector<Frame> stack = {{0, all}};
  auto sse = [&](const std::vector<std::size_t>& idx) {
    double mean = 0.0;
    for (std::size_t i : idx) mean += y[i];
    mean /= static_cast<double>(idx.size());
    double out = 0.0;
    for (std::size_t i : idx) out += (y[i] - mean) * (y[i] - mean);
    return out;
  };
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(frame.node)];
    CHECK(node.count == frame.idx.size());
    if (node.is_leaf()) continue;
    std::vector<std::size_t> left, right;
    for (std::size_t i : frame.idx) {
      (x[i][static_cast<std::size_t>(node.feature)] <= node.threshold ? left : right).push_back(i);
    }
    CHECK(!left.empty());
    CHECK(!right.empty());
    CHECK(sse(frame.idx) > sse(left) + sse(right));  // strictly reduced
    stack.push_back({node.left, std::move(left)});
    stack.push_back({node.right, std::move(right)});
  }
}

}  // namespace

TEST_CASE("pair feature rows") {
  std::vector<double> fi(10, 0.25);
  std::vector<double> fj(10, 0.75);

  const auto row = pair_features_raw(fi, fj, 0.5);
  REQUIRE(row.size() == 21);
  CHECK(row[0] == 0.25);
  CHECK(row[10] == 0.75);
  CHECK(row[20] == 0.5);

  const auto same = pair_features_raw(fi, fi, 0.0);
  CHECK(same[0] == same[10]);
  CHECK(same[20] == 0.0);

  const auto swapped = pair_features_raw(fj, fi, 0.5);
  for (std::size_t c = 0; c < 10; ++c) {
    CHECK(swapped[c] == row[10 + c]);
    CHECK(swapped[10 + c] == row[c]);
  }

  std::vector<double> short_vec(4, 0.0);
  CHECK_THROWS_AS(pair_features_raw(fi, short_vec, 0.0), DataError);

  Eigen::VectorXd ei = Eigen::VectorXd::Zero(500);
  Eigen::VectorXd ej = Eigen::VectorXd::Zero(500);
  const auto embed_row = pair_features_embed(ei, ej, 0.0);
  CHECK(embed_row.size() == 1001);
  for (double v : embed_row) CHECK(v == 0.0);
}

TEST_CASE("constant targets give constant predictions") {
  Rng rng(1);
  const auto x = random_rows(40, 4, rng);
  const std::vector<double> y(40, 3.25);
  const auto forest = Forest::fit(x, y, {}, 7);
  for (const auto& row : x) CHECK(forest.predict(row) == 3.25);
  std::vector<double> fresh = {99.0, 0.0, 0.0, 0.0};
  CHECK(forest.predict(fresh) == 3.25);
}

TEST_CASE("single unpruned tree memorizes distinct rows") {
  Rng rng(2);
  const auto x = random_rows(30, 3, rng);
  std::vector<double> y(30);
  for (std::size_t i = 0; i < 30; ++i) y[i] = rng.uniform(-10.0, 10.0);

  ForestConfig config;
  config.n_estimators = 1;
  config.bootstrap = false;
  config.max_depth = 0;  // unlimited
  config.max_features = 3;
  const auto forest = Forest::fit(x, y, config, 3);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(forest.predict(x[i]) == doctest::Approx(y[i]).epsilon(1e-12));
  }
}

TEST_CASE("fits are seed-deterministic") {
  Rng rng(4);
  const auto x = random_rows(60, 5, rng);
  std::vector<double> y(60);
  for (auto& v : y) v = rng.uniform(0.0, 100.0);

  const auto a = Forest::fit(x, y, {}, 42);
  const auto b = Forest::fit(x, y, {}, 42);
  REQUIRE(a.trees().size() == b.trees().size());
  for (std::size_t t = 0; t < a.trees().size(); ++t) {
    const auto& ta = a.trees()[t].nodes;
    const auto& tb = b.trees()[t].nodes;
    REQUIRE(ta.size() == tb.size());
    for (std::size_t k = 0; k < ta.size(); ++k) {
      CHECK(ta[k].feature == tb[k].feature);
      CHECK(ta[k].threshold == tb[k].threshold);
      CHECK(ta[k].value == tb[k].value);
    }
  }

  const auto c = Forest::fit(x, y, {}, 43);
  bool any_difference = false;
  for (const auto& row : x) {
    if (a.predict(row) != c.predict(row)) {
      any_difference = true;
      break;
    }
  }
  CHECK(any_difference);
}

TEST_CASE("predictions stay within the training target range") {
  Rng rng(5);
  const auto x = random_rows(80, 4, rng);
  std::vector<double> y(80);
  for (auto& v : y) v = rng.uniform(-40.0, 160.0);
  const double lo = *std::min_element(y.begin(), y.end());
  const double hi = *std::max_element(y.begin(), y.end());

  const auto forest = Forest::fit(x, y, {}, 11);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> probe = {rng.uniform(-100.0, 200.0), rng.uniform(-50.0, 50.0),
                                 rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
    const double pred = forest.predict(probe);
    CHECK(pred >= lo);
    CHECK(pred <= hi);
  }

  std::vector<double> wrong_width(3, 0.0);
  CHECK_THROWS_AS(forest.predict(wrong_width), DataError);
}

TEST_CASE("single-tree forest predicts its leaf mean") {
  std::vector<std::vector<double>> x = {{0.0}, {1.0}, {2.0}, {3.0}};
  std::vector<double> y = {1.0, 1.0, 5.0, 5.0};
  ForestConfig config;
  config.n_estimators = 1;
  config.bootstrap = false;
  config.max_depth = 1;
  config.max_features = 1;
  const auto forest = Forest::fit(x, y, config, 0);
  CHECK(forest.predict(std::vector<double>{0.5}) == 1.0);
  CHECK(forest.predict(std::vector<double>{2.5}) == 5.0);
}

TEST_CASE("depth bound holds for every tree") {
  Rng rng(6);
  const auto x = random_rows(200, 6, rng);
  std::vector<double> y(200);
  for (auto& v : y) v = rng.uniform(0.0, 1.0);

  ForestConfig config;
  config.max_depth = 4;
  const auto forest = Forest::fit(x, y, config, 9);
  for (const auto& tree : forest.trees()) CHECK(tree.depth() <= 4);

  ForestConfig deep;
  deep.max_depth = 25;
  const auto forest25 = Forest::fit(x, y, deep, 9);
  for (const auto& tree : forest25.trees()) CHECK(tree.depth() <= 25);
}

TEST_CASE("accepted splits strictly reduce weighted variance") {
  Rng rng(7);
  const auto x = random_rows(120, 5, rng);
  std::vector<double> y(120);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i][1] * 2.0 + rng.uniform(-0.5, 0.5);

  ForestConfig config;
  config.n_estimators = 4;
  config.bootstrap = false;  // sample = all rows, so routing is recomputable
  config.max_features = 5;
  const auto forest = Forest::fit(x, y, config, 13);
  for (const auto& tree : forest.trees()) check_split_quality(tree, x, y);
}

TEST_CASE("symmetrized pair prediction is exactly order-invariant") {
  Rng rng(8);
  const std::size_t f = 10;
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  std::vector<std::vector<double>> nodes(12, std::vector<double>(f));
  for (auto& node : nodes) {
    for (auto& v : node) v = rng.uniform(0.0, 1.0);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const double d = rng.uniform(0.0, 1.0);
      const double y = rng.uniform(1.0, 300.0);
      rows.push_back(pair_features_raw(nodes[i], nodes[j], d));
      rows.push_back(pair_features_raw(nodes[j], nodes[i], d));
      targets.push_back(y);
      targets.push_back(y);
    }
  }
  const auto forest = Forest::fit(rows, targets, {}, 99);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const double d = rng.uniform(0.0, 1.0);
      const double pij = predict_pair_symmetric(forest, nodes[i], nodes[j], d);
      const double pji = predict_pair_symmetric(forest, nodes[j], nodes[i], d);
      CHECK(pij == pji);  // bitwise, not approximate
    }
  }
}

TEST_CASE("fit rejects empty or mismatched data") {
  CHECK_THROWS_AS(Forest::fit({}, {}, {}, 0), DataError);
  CHECK_THROWS_AS(Forest::fit({{1.0}}, {1.0, 2.0}, {}, 0), DataError);
  CHECK_THROWS_AS(Forest::fit({{1.0}, {1.0, 2.0}}, {1.0, 2.0}, {}, 0), DataError);
}

TEST_CASE("default forest configuration") {
  const ForestConfig config;
  CHECK(config.n_estimators == 30);
  CHECK(config.max_depth == 25);
  CHECK(config.min_samples_split == 2);
  CHECK(config.bootstrap);
  CHECK(config.max_features == 0);  // ceil(p/3) at fit time
}
