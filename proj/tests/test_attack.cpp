#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "pdfool/attack.hpp"
#include "pdfool/knn.hpp"
#include "pdfool/linear.hpp"
#include "pdfool/tree.hpp"
#include "test_util.hpp"

using namespace pdfool;

TEST_CASE("distance is the mean squared difference") {
  Vector a(2), b(2);
  a << 0.0, 0.0;
  b << 1.0, 3.0;
  CHECK(distance(a, a) == 0.0);
  CHECK(distance(a, b) == 5.0);

  SUBCASE("symmetric and nonnegative on random vectors") {
    Rng rng(3);
    for (int trial = 0; trial < 25; ++trial) {
      Vector u(6), v(6);
      for (Index i = 0; i < 6; ++i) {
        u[i] = rng.uniform(-5.0, 5.0);
        v[i] = rng.uniform(-5.0, 5.0);
      }
      CHECK(distance(u, v) == distance(v, u));
      CHECK(distance(u, v) >= 0.0);
    }
  }
  SUBCASE("length mismatch is rejected") {
    Vector c(3);
    c.setZero();
    CHECK_THROWS_AS(distance(a, c), std::invalid_argument);
  }
}

TEST_CASE("attack loss at the trivial points") {
  const LabeledData data = generate_friedman(25, 0, 5);
  const auto model = fit_tree(data, TreeSpec{4});
  const Grid grid = build_grid(data.features, 0, 6);
  const Matrix& x_prime = data.features.values();

  SUBCASE("robustness loss at the original dataset is zero") {
    const AttackConfig config = make_robustness_config(grid, {0});
    CHECK(attack_loss(x_prime, *model, config, x_prime) == 0.0);
    const AttackConfig raw = make_robustness_config(grid, {0}, false);
    CHECK(attack_loss(x_prime, *model, raw, x_prime) == 0.0);
  }
  SUBCASE("targeted loss vanishes when the target is already met") {
    const PDProfile profile = partial_dependence(*model, x_prime, grid);
    const AttackConfig config =
        make_targeted_config(grid, {0}, profile.values, false);
    CHECK(attack_loss(x_prime, *model, config, x_prime) == 0.0);
  }
  SUBCASE("robustness loss is never positive, targeted never negative") {
    Rng rng(7);
    const AttackConfig robustness = make_robustness_config(grid, {0});
    const AttackConfig targeted = make_targeted_config(
        grid, {0}, build_target(TargetKind::IncreasingRamp, grid, 2.0));
    for (int trial = 0; trial < 10; ++trial) {
      Matrix x = x_prime;
      for (Index j = 1; j < x.cols(); ++j) {
        for (Index i = 0; i < x.rows(); ++i) x(i, j) += rng.normal(0.0, 0.3);
      }
      CHECK(attack_loss(x, *model, robustness, x_prime) <= 0.0);
      CHECK(attack_loss(x, *model, targeted, x_prime) >= 0.0);
    }
  }
}

TEST_CASE("centered robustness loss of a linear model is always zero") {
  const LinearModel model((Vector(3) << 2.0, -1.0, 0.5).finished(), 1.0,
                          OutputMode::Regression, 0);
  Rng rng(11);
  const Matrix x_prime = testutil::random_matrix(rng, 30, 3);
  Grid grid{0, Vector::LinSpaced(8, 0.0, 1.0)};
  const AttackConfig config = make_robustness_config(grid, {0}, true);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = testutil::random_matrix(rng, 30, 3, -3.0, 3.0);
    CHECK(std::abs(attack_loss(x, model, config, x_prime)) < 1e-12);
  }
}

TEST_CASE("attack loss is invariant under row permutation") {
  const LabeledData data = generate_friedman(20, 0, 13);
  const auto model = fit_knn(data, KnnSpec{3});
  const Grid grid = build_grid(data.features, 0, 5);
  const Matrix& x_prime = data.features.values();
  const AttackConfig config = make_robustness_config(grid, {0});

  Rng rng(17);
  Matrix x = x_prime;
  for (Index j = 1; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) x(i, j) += rng.normal(0.0, 0.2);
  }
  const Scalar reference = attack_loss(x, *model, config, x_prime);
  Matrix shuffled = x;
  shuffled.row(0).swap(shuffled.row(19));
  shuffled.row(3).swap(shuffled.row(11));
  CHECK(attack_loss(shuffled, *model, config, x_prime) == reference);
}

TEST_CASE("constant output shifts cancel in centered losses") {
  const Vector coeffs = (Vector(2) << 1.0, -2.0).finished();
  const LinearModel base(coeffs, 0.0, OutputMode::Regression, 0);
  const LinearModel shifted(coeffs, 7.0, OutputMode::Regression, 0);
  Rng rng(19);
  const Matrix x_prime = testutil::random_matrix(rng, 15, 2);
  const Matrix x = testutil::random_matrix(rng, 15, 2, 0.3, 1.4);
  Grid grid{0, Vector::LinSpaced(5, 0.0, 1.0)};

  const AttackConfig centered_r = make_robustness_config(grid, {0}, true);
  CHECK(attack_loss(x, base, centered_r, x_prime) ==
        doctest::Approx(attack_loss(x, shifted, centered_r, x_prime))
            .epsilon(1e-12));

  const Vector target = build_target(TargetKind::IncreasingRamp, grid, 1.0);
  const AttackConfig centered_t = make_targeted_config(grid, {0}, target, true);
  CHECK(attack_loss(x, base, centered_t, x_prime) ==
        doctest::Approx(attack_loss(x, shifted, centered_t, x_prime))
            .epsilon(1e-12));

  // The non-centered targeted loss sees the shift.
  const AttackConfig raw_t = make_targeted_config(grid, {0}, target, false);
  const Scalar base_loss = attack_loss(x, base, raw_t, x_prime);
  const Scalar shifted_loss = attack_loss(x, shifted, raw_t, x_prime);
  CHECK(std::abs(base_loss - shifted_loss) > 1.0);
}

TEST_CASE("level-shifted data moves the raw profile but not the centered one") {
  // With a linear model, poisoning a free column shifts the profile level:
  // visible to the non-centered robustness loss, invisible to the centered.
  const LinearModel model((Vector(2) << 1.0, 2.0).finished(), 0.0,
                          OutputMode::Regression, 0);
  Rng rng(23);
  const Matrix x_prime = testutil::random_matrix(rng, 20, 2);
  Matrix x = x_prime;
  x.col(1).array() += 0.8;  // free column shifted
  Grid grid{0, Vector::LinSpaced(5, 0.0, 1.0)};

  const AttackConfig raw = make_robustness_config(grid, {0}, false);
  const AttackConfig centered = make_robustness_config(grid, {0}, true);
  CHECK(attack_loss(x, model, raw, x_prime) < -1e-3);
  CHECK(std::abs(attack_loss(x, model, centered, x_prime)) < 1e-12);
}

TEST_CASE("target construction") {
  Grid grid{0, (Vector(3) << 0.0, 0.5, 1.0).finished()};

  SUBCASE("increasing ramp spans plus-minus half the amplitude") {
    const Vector t = build_target(TargetKind::IncreasingRamp, grid, 2.0);
    CHECK(t[0] == -1.0);
    CHECK(t[1] == 0.0);
    CHECK(t[2] == 1.0);
  }
  SUBCASE("constant target is all zeros") {
    const Vector t = build_target(TargetKind::Constant, grid, 5.0);
    CHECK((t.array() == 0.0).all());
  }
  SUBCASE("decreasing ramp is the reverse of increasing") {
    const Vector inc = build_target(TargetKind::IncreasingRamp, grid, 3.0);
    const Vector dec = build_target(TargetKind::DecreasingRamp, grid, 3.0);
    CHECK(dec == inc.reverse().eval());
  }
  SUBCASE("file round trip and mismatch errors") {
    const auto dir = testutil::scratch_dir("target");
    const Vector t = build_target(TargetKind::IncreasingRamp, grid, 4.0);
    const auto path = dir / "target.csv";
    save_target(grid, t, path);
    const Vector loaded = load_target(path, grid);
    CHECK(loaded == t);

    Grid longer{0, Vector::LinSpaced(5, 0.0, 1.0)};
    CHECK_THROWS_AS(load_target(path, longer), std::runtime_error);
    Grid misaligned{0, (Vector(3) << 0.0, 0.6, 1.0).finished()};
    CHECK_THROWS_AS(load_target(path, misaligned), std::runtime_error);
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("attack config validation") {
  const LabeledData data = generate_heart_like(40, 3);
  const Grid grid = build_grid(data.features, 0, 5);  // age

  SUBCASE("explained column must be constant") {
    AttackConfig config;
    config.strategy = AttackStrategy::Robustness;
    config.explained_column = 0;
    config.grid = grid;
    config.constant_columns = {};  // missing the explained column
    CHECK_THROWS_AS(validate_attack_config(config, data.features),
                    std::invalid_argument);
  }
  SUBCASE("free categorical columns are rejected") {
    const AttackConfig config = make_robustness_config(grid, {0});
    CHECK_THROWS_AS(validate_attack_config(config, data.features),
                    std::invalid_argument);
    // With every categorical held constant it passes.
    std::set<Index> constant{0};
    for (Index j = 0; j < data.features.n_cols(); ++j) {
      if (data.features.column_kinds()[static_cast<std::size_t>(j)] ==
          ColumnKind::CategoricalInteger) {
        constant.insert(j);
      }
    }
    CHECK_NOTHROW(validate_attack_config(
        make_robustness_config(grid, constant), data.features));
  }
  SUBCASE("target presence must match the strategy") {
    const LabeledData friedman = generate_friedman(20, 0, 3);
    const Grid fgrid = build_grid(friedman.features, 0, 4);
    AttackConfig targeted = make_targeted_config(
        fgrid, {0}, build_target(TargetKind::Constant, fgrid, 0.0));
    CHECK_NOTHROW(validate_attack_config(targeted, friedman.features));
    targeted.target.reset();
    CHECK_THROWS_AS(validate_attack_config(targeted, friedman.features),
                    std::invalid_argument);

    AttackConfig robustness = make_robustness_config(fgrid, {0});
    robustness.target = Vector::Zero(4);
    CHECK_THROWS_AS(validate_attack_config(robustness, friedman.features),
                    std::invalid_argument);

    AttackConfig short_target = make_targeted_config(fgrid, {0}, Vector::Zero(3));
    CHECK_THROWS_AS(validate_attack_config(short_target, friedman.features),
                    std::invalid_argument);
  }
}
