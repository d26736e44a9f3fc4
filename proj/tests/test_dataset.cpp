#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "pdfool/dataset.hpp"
#include "test_util.hpp"

using namespace pdfool;

TEST_CASE("friedman response matches the closed form") {
  // 10*sin(pi/4) + 0 + 5 + 2.5
  CHECK(friedman_response(0.5, 0.5, 0.5, 0.5, 0.5) ==
        doctest::Approx(10.0 * std::sin(std::numbers::pi / 4.0) + 7.5)
            .epsilon(1e-15));
  CHECK(friedman_response(0.0, 0.0, 0.5, 0.0, 0.0) == 0.0);
}

TEST_CASE("friedman generator shape, range and determinism") {
  const LabeledData data = generate_friedman(50, 8, 123);
  CHECK(data.features.n_rows() == 50);
  CHECK(data.features.n_cols() == 13);
  CHECK(data.features.column_names()[0] == "X1");
  CHECK(data.features.column_names()[4] == "X5");
  CHECK(data.features.column_names()[5] == "N1");
  CHECK(data.features.column_names()[12] == "N8");
  CHECK(data.features.values().minCoeff() >= 0.0);
  CHECK(data.features.values().maxCoeff() < 1.0);

  const LabeledData again = generate_friedman(50, 8, 123);
  CHECK(data.features.values() == again.features.values());
  CHECK(data.target == again.target);

  const LabeledData other = generate_friedman(50, 8, 124);
  CHECK(data.features.values() != other.features.values());

  CHECK_THROWS_AS(generate_friedman(0, 0, 1), std::invalid_argument);
}

TEST_CASE("friedman target recomputes from features") {
  const LabeledData data = generate_friedman(200, 3, 7);
  const Matrix& x = data.features.values();
  for (Index i = 0; i < x.rows(); ++i) {
    const Scalar expected =
        friedman_response(x(i, 0), x(i, 1), x(i, 2), x(i, 3), x(i, 4));
    CHECK(std::abs(expected - data.target[i]) < 1e-12);
  }
}

TEST_CASE("friedman noise columns are unrelated to the target") {
  const LabeledData data = generate_friedman(2000, 8, 99);
  const Matrix& x = data.features.values();
  const Vector& y = data.target;
  const Scalar y_mean = y.mean();
  const Scalar y_sd = std::sqrt((y.array() - y_mean).square().mean());
  for (Index j = 5; j < 13; ++j) {
    const Scalar c_mean = x.col(j).mean();
    const Scalar c_sd = std::sqrt((x.col(j).array() - c_mean).square().mean());
    const Scalar cov =
        ((x.col(j).array() - c_mean) * (y.array() - y_mean)).mean();
    CHECK(std::abs(cov / (c_sd * y_sd)) < 0.08);
  }
}

TEST_CASE("column stats") {
  Matrix values(3, 2);
  values << 1.0, 0.0, 1.0, 2.0, 1.0, 1.0;
  const Dataset data(values);
  const ColumnStats stats = column_stats(data);

  SUBCASE("constant column has zero sd") {
    CHECK(stats.min[0] == 1.0);
    CHECK(stats.max[0] == 1.0);
    CHECK(stats.mean[0] == 1.0);
    CHECK(stats.sd[0] == 0.0);
  }
  SUBCASE("population sd of [0,2,1]") {
    CHECK(stats.mean[1] == doctest::Approx(1.0));
    // population sd of {0,2,1} = sqrt(2/3)
    CHECK(stats.sd[1] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  }
  SUBCASE("two-point column") {
    Matrix two(2, 1);
    two << 0.0, 2.0;
    const ColumnStats s = column_stats(Dataset(two));
    CHECK(s.mean[0] == 1.0);
    CHECK(s.sd[0] == 1.0);
  }
  SUBCASE("stats invariant under row permutation") {
    Matrix permuted(3, 2);
    permuted.row(0) = values.row(2);
    permuted.row(1) = values.row(0);
    permuted.row(2) = values.row(1);
    const ColumnStats s = column_stats(Dataset(permuted));
    CHECK(s.min == stats.min);
    CHECK(s.max == stats.max);
    CHECK(s.mean[1] == doctest::Approx(stats.mean[1]).epsilon(1e-15));
    CHECK(s.sd[1] == doctest::Approx(stats.sd[1]).epsilon(1e-15));
  }
}

TEST_CASE("dataset invariants") {
  Matrix values(2, 2);
  values << 1.0, 2.0, 3.0, 4.0;

  CHECK_THROWS_AS(Dataset(values, {"a", "a"},
                          {ColumnKind::Continuous, ColumnKind::Continuous}),
                  std::invalid_argument);

  Matrix bad = values;
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(Dataset{bad}, std::invalid_argument);

  Matrix frac = values;
  frac(0, 1) = 2.5;
  CHECK_THROWS_AS(Dataset(frac, {"a", "b"},
                          {ColumnKind::Continuous,
                           ColumnKind::CategoricalInteger}),
                  std::invalid_argument);
  CHECK_NOTHROW(Dataset(values, {"a", "b"},
                        {ColumnKind::Continuous,
                         ColumnKind::CategoricalInteger}));

  const Dataset data(values);
  CHECK(data.column_index("X2") == 1);
  CHECK_THROWS_AS(data.column_index("nope"), std::invalid_argument);
  CHECK_THROWS_AS(data.with_values(Matrix::Zero(3, 2)), std::invalid_argument);
}

TEST_CASE("csv loading") {
  const auto dir = testutil::scratch_dir("csv");

  SUBCASE("minimal file") {
    const auto path = dir / "mini.csv";
    std::ofstream(path) << "a,b,y\n1,2,3\n";
    const LabeledData data = load_csv(path, "y", {});
    CHECK(data.features.n_rows() == 1);
    CHECK(data.features.n_cols() == 2);
    CHECK(data.features.values()(0, 0) == 1.0);
    CHECK(data.features.values()(0, 1) == 2.0);
    CHECK(data.target[0] == 3.0);
  }

  SUBCASE("bad cell names its location") {
    const auto path = dir / "bad.csv";
    std::ofstream(path) << "a,b,y\n1,abc,3\n";
    try {
      load_csv(path, "y", {});
      FAIL("expected a parse error");
    } catch (const std::runtime_error& err) {
      const std::string what = err.what();
      CHECK(what.find("'abc'") != std::string::npos);
      CHECK(what.find("line 2") != std::string::npos);
      CHECK(what.find("'b'") != std::string::npos);
    }
  }

  SUBCASE("error paths") {
    CHECK_THROWS_AS(load_csv(dir / "missing.csv", "y", {}), std::runtime_error);
    const auto dup = dir / "dup.csv";
    std::ofstream(dup) << "a,a,y\n1,2,3\n";
    CHECK_THROWS_AS(load_csv(dup, "y", {}), std::runtime_error);
    const auto ok = dir / "ok.csv";
    std::ofstream(ok) << "a,b,y\n1,2,3\n";
    CHECK_THROWS_AS(load_csv(ok, "missing_target", {}), std::runtime_error);
    CHECK_THROWS_AS(load_csv(ok, "y", {"nope"}), std::runtime_error);
    const auto ragged = dir / "ragged.csv";
    std::ofstream(ragged) << "a,b,y\n1,2\n";
    CHECK_THROWS_AS(load_csv(ragged, "y", {}), std::runtime_error);
  }

  SUBCASE("declared categoricals are flagged and validated") {
    const auto path = dir / "cat.csv";
    std::ofstream(path) << "a,b,y\n1,2,3\n0,1,2\n";
    const LabeledData data = load_csv(path, "y", {"b"});
    CHECK(data.features.column_kinds()[1] == ColumnKind::CategoricalInteger);
    const auto frac = dir / "frac.csv";
    std::ofstream(frac) << "a,b,y\n1,2.5,3\n";
    CHECK_THROWS_AS(load_csv(frac, "y", {"b"}), std::invalid_argument);
  }

  std::filesystem::remove_all(dir);
}

TEST_CASE("csv round trip is value-identical") {
  const auto dir = testutil::scratch_dir("roundtrip");
  const LabeledData data = generate_friedman(60, 2, 31);
  const auto path = dir / "data.csv";
  save_csv(data, "y", path);
  const LabeledData loaded = load_csv(path, "y", {});
  CHECK(loaded.features.values() == data.features.values());
  CHECK(loaded.target == data.target);
  CHECK(loaded.features.column_names() == data.features.column_names());

  // Second serialization is byte-identical to the first.
  const auto path2 = dir / "data2.csv";
  save_csv(loaded, "y", path2);
  std::ifstream a(path), b(path2);
  const std::string sa((std::istreambuf_iterator<char>(a)),
                       std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)),
                       std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  std::filesystem::remove_all(dir);
}

TEST_CASE("heart-like generator matches the expected schema") {
  const LabeledData data = generate_heart_like(303, 11);
  CHECK(data.features.n_rows() == 303);
  CHECK(data.features.n_cols() == 13);
  int categorical = 0;
  for (const ColumnKind kind : data.features.column_kinds()) {
    if (kind == ColumnKind::CategoricalInteger) ++categorical;
  }
  CHECK(categorical == 8);

  // Evenly-distributed binary target.
  Index ones = 0;
  for (Index i = 0; i < data.target.size(); ++i) {
    CHECK((data.target[i] == 0.0 || data.target[i] == 1.0));
    if (data.target[i] == 1.0) ++ones;
  }
  CHECK(ones > 120);
  CHECK(ones < 183);

  const LabeledData again = generate_heart_like(303, 11);
  CHECK(again.features.values() == data.features.values());

  // Loader sees the same schema after a disk round trip.
  const auto dir = testutil::scratch_dir("heart");
  const auto path = dir / "heart.csv";
  save_csv(data, "output", path);
  const LabeledData loaded = load_csv(
      path, "output",
      {"sex", "cp", "fbs", "restecg", "exng", "slp", "caa", "thall"});
  CHECK(loaded.features.n_rows() == 303);
  CHECK(loaded.features.n_cols() == 13);
  CHECK(loaded.features.values() == data.features.values());
  std::filesystem::remove_all(dir);
}
