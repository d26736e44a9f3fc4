#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "pdfool/forest.hpp"
#include "pdfool/gbm.hpp"
#include "pdfool/knn.hpp"
#include "pdfool/linear.hpp"
#include "pdfool/pd.hpp"
#include "pdfool/tree.hpp"
#include "test_util.hpp"

using namespace pdfool;

TEST_CASE("grid construction") {
  Matrix values(3, 2);
  values << 0.0, 5.0, 0.5, 5.0, 1.0, 5.0;
  const Dataset data(values);

  SUBCASE("equidistant points spanning the observed range") {
    const Grid grid = build_grid(data, 0, 5);
    CHECK(grid.points.size() == 5);
    CHECK(grid.points[0] == 0.0);
    CHECK(grid.points[1] == 0.25);
    CHECK(grid.points[2] == 0.5);
    CHECK(grid.points[3] == 0.75);
    CHECK(grid.points[4] == 1.0);
  }
  SUBCASE("endpoints equal the column min and max") {
    const Grid grid = build_grid(data, 0, 7);
    CHECK(grid.points[0] == data.values().col(0).minCoeff());
    CHECK(grid.points[6] == data.values().col(0).maxCoeff());
  }
  SUBCASE("constant column is rejected") {
    CHECK_THROWS_AS(build_grid(data, 1, 5), std::invalid_argument);
  }
  SUBCASE("categorical column is rejected") {
    Matrix v(2, 1);
    v << 0.0, 1.0;
    const Dataset cat(v, {"c"}, {ColumnKind::CategoricalInteger});
    CHECK_THROWS_AS(build_grid(cat, 0, 5), std::invalid_argument);
  }
  SUBCASE("degenerate grids are rejected") {
    CHECK_THROWS_AS(build_grid(data, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(data, 5, 5), std::invalid_argument);
  }
}

TEST_CASE("stable mean is permutation invariant") {
  Rng rng(3);
  Vector values(101);
  for (Index i = 0; i < values.size(); ++i) {
    values[i] = rng.uniform(-10.0, 10.0) * std::pow(10.0, rng.uniform(-3, 3));
  }
  const Scalar reference = stable_mean(values);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Scalar> shuffled(values.data(), values.data() + values.size());
    Rng shuffler(100 + trial);
    shuffler.shuffle(shuffled);
    Vector permuted =
        Eigen::Map<Vector>(shuffled.data(), static_cast<Index>(shuffled.size()));
    CHECK(stable_mean(permuted) == reference);
  }
  CHECK(reference ==
        doctest::Approx(values.mean()).epsilon(1e-12));
}

TEST_CASE("constant model gives a flat profile") {
  TreeNode leaf;
  leaf.value = 3.5;
  const TreeModel model(CartTree({leaf}), 2, OutputMode::Regression, 0);
  Rng rng(5);
  const Matrix data = testutil::random_matrix(rng, 10, 2);
  Grid grid{0, Vector::LinSpaced(6, 0.0, 1.0)};
  const PDProfile profile = partial_dependence(model, data, grid);
  CHECK((profile.values.array() == 3.5).all());
  CHECK((profile.centered.array() == 0.0).all());
}

TEST_CASE("linear model profile matches hand evaluation") {
  // f(x) = 2 x1 + x2 over rows (0,0) and (1,2): at z = 0.5 the profile is
  // ((2*0.5 + 0) + (2*0.5 + 2)) / 2 = 2.
  const LinearModel model((Vector(2) << 2.0, 1.0).finished(), 0.0,
                          OutputMode::Regression, 0);
  Matrix data(2, 2);
  data << 0.0, 0.0, 1.0, 2.0;
  Grid grid{0, (Vector(3) << 0.0, 0.5, 1.0).finished()};
  const PDProfile profile = partial_dependence(model, data, grid);
  CHECK(profile.values[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(profile.values[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(profile.values[2] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("profile equals the brute-force estimator") {
  Rng rng(11);
  const LabeledData data = generate_friedman(40, 0, 77);
  const auto model = fit_gbm(data, GbmSpec{8, 3});
  const Grid grid = build_grid(data.features, 0, 7);
  const PDProfile profile =
      partial_dependence(*model, data.features, grid);
  const Vector oracle =
      testutil::brute_force_pd(*model, data.features.values(), grid);
  CHECK((profile.values - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("centering sums to zero and preserves shape") {
  const LabeledData data = generate_friedman(30, 0, 7);
  const auto model = fit_tree(data, TreeSpec{4});
  const Grid grid = build_grid(data.features, 1, 9);
  const PDProfile profile = partial_dependence(*model, data.features, grid);
  CHECK(std::abs(profile.centered.sum()) < 1e-12);
  const Vector reconstructed =
      profile.centered.array() + (profile.values - profile.centered)[0];
  CHECK((reconstructed - profile.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("profile is invariant under row permutation") {
  const LabeledData data = generate_friedman(33, 1, 13);
  const auto model = fit_knn(data, KnnSpec{4});
  const Grid grid = build_grid(data.features, 0, 6);
  const PDProfile reference =
      partial_dependence(*model, data.features, grid);

  Matrix permuted = data.features.values();
  Rng rng(9);
  std::vector<Index> order(static_cast<std::size_t>(permuted.rows()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
  rng.shuffle(order);
  Matrix shuffled(permuted.rows(), permuted.cols());
  for (Index i = 0; i < permuted.rows(); ++i) {
    shuffled.row(i) = permuted.row(order[static_cast<std::size_t>(i)]);
  }
  const PDProfile permuted_profile = partial_dependence(*model, shuffled, grid);
  CHECK(permuted_profile.values == reference.values);
  CHECK(permuted_profile.centered == reference.centered);
}

TEST_CASE("duplicating every row leaves the profile unchanged") {
  const LabeledData data = generate_friedman(16, 0, 19);
  const auto model = fit_tree(data, TreeSpec{3});
  const Grid grid = build_grid(data.features, 2, 5);
  const Matrix& x = data.features.values();
  Matrix doubled(2 * x.rows(), x.cols());
  doubled.topRows(x.rows()) = x;
  doubled.bottomRows(x.rows()) = x;
  const PDProfile a = partial_dependence(*model, x, grid);
  const PDProfile b = partial_dependence(*model, doubled, grid);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pointwise-dominated model has a pointwise-dominated profile") {
  const LabeledData data = generate_friedman(25, 0, 23);
  const auto low = fit_tree(data, TreeSpec{4});
  CartTree bumped = low->tree();
  Rng rng(15);
  for (TreeNode& node : bumped.nodes()) {
    if (node.is_leaf()) node.value += rng.uniform(0.0, 2.0);
  }
  const TreeModel high(std::move(bumped), 5, OutputMode::Regression, 0);
  const Grid grid = build_grid(data.features, 0, 8);
  const PDProfile p_low = partial_dependence(*low, data.features, grid);
  const PDProfile p_high = partial_dependence(high, data.features, grid);
  CHECK((p_low.values.array() <= p_high.values.array() + 1e-15).all());
}

TEST_CASE("centered linear profile does not depend on the dataset") {
  const LinearModel model((Vector(3) << 1.5, -0.7, 0.3).finished(), 2.0,
                          OutputMode::Regression, 0);
  Grid grid{1, Vector::LinSpaced(7, -1.0, 1.0)};
  Rng rng(21);
  const Matrix a = testutil::random_matrix(rng, 20, 3, -2.0, 2.0);
  const Matrix b = testutil::random_matrix(rng, 35, 3, 5.0, 9.0);
  const PDProfile pa = partial_dependence(model, a, grid);
  const PDProfile pb = partial_dependence(model, b, grid);
  CHECK((pa.centered - pb.centered).cwiseAbs().maxCoeff() < 1e-12);

  // And it equals beta_c * (z - mean(Z)).
  const Scalar z_mean = grid.points.mean();
  for (Index k = 0; k < grid.points.size(); ++k) {
    CHECK(pa.centered[k] ==
          doctest::Approx(-0.7 * (grid.points[k] - z_mean)).epsilon(1e-12));
  }
}

TEST_CASE("profile csv serialization") {
  const LabeledData data = generate_friedman(12, 0, 29);
  const auto model = fit_linear(data);
  const Grid grid = build_grid(data.features, 0, 4);
  const PDProfile profile = partial_dependence(*model, data.features, grid);
  const auto dir = testutil::scratch_dir("profile");
  const auto path = dir / "profile.csv";
  save_profile(profile, path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "z,pd,pd_centered");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 4);
  std::filesystem::remove_all(dir);
}
