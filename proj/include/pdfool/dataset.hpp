#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "pdfool/types.hpp"

namespace pdfool {

enum class ColumnKind { Continuous, CategoricalInteger };

/// Numeric table with named, typed columns. Immutable after construction and
/// safe to read concurrently. Categorical columns are stored as whole-number
/// reals and validated as such.
class Dataset {
 public:
  Dataset(Matrix values, std::vector<std::string> column_names,
          std::vector<ColumnKind> column_kinds);

  /// Convenience: all columns continuous, names generated as X1..XP.
  explicit Dataset(Matrix values);

  const Matrix& values() const { return values_; }
  const std::vector<std::string>& column_names() const { return names_; }
  const std::vector<ColumnKind>& column_kinds() const { return kinds_; }
  Index n_rows() const { return values_.rows(); }
  Index n_cols() const { return values_.cols(); }

  /// Index of a named column; throws if absent.
  Index column_index(const std::string& name) const;

  /// Same schema, new values. Validates the replacement.
  Dataset with_values(Matrix values) const;

 private:
  Matrix values_;
  std::vector<std::string> names_;
  std::vector<ColumnKind> kinds_;
};

/// Per-column summaries. Standard deviation uses divisor N (population form),
/// so sd is exactly 0 for constant columns.
struct ColumnStats {
  Vector min;
  Vector max;
  Vector mean;
  Vector sd;
};

ColumnStats column_stats(const Dataset& data);

struct LabeledData {
  Dataset features;
  Vector target;  // regression value or class label in {0, 1}
};

/// Response surface of the synthetic regression benchmark:
/// 10*sin(pi*x1*x2) + 20*(x3-0.5)^2 + 10*x4 + 5*x5.
Scalar friedman_response(Scalar x1, Scalar x2, Scalar x3, Scalar x4, Scalar x5);

/// Synthetic regression data: 5 informative columns X1..X5 plus
/// n_noise_extra noise columns N1..Nk, all i.i.d. uniform on [0, 1].
/// Equal seeds give bit-identical output.
LabeledData generate_friedman(Index n_rows, Index n_noise_extra,
                              std::uint64_t seed);

/// Synthetic binary-classification data shaped like the UCI heart table:
/// 5 continuous and 8 integer-coded columns, evenly split target.
LabeledData generate_heart_like(Index n_rows, std::uint64_t seed);

/// Reads a headered, comma-separated numeric table. The target column is
/// removed from the features; columns listed in categorical_columns are
/// flagged CategoricalInteger. Parse failures report row and column.
LabeledData load_csv(const std::filesystem::path& path,
                     const std::string& target_column,
                     const std::set<std::string>& categorical_columns);

/// Same parsing, but every column is a feature (no target to drop).
Dataset load_dataset_csv(const std::filesystem::path& path,
                         const std::set<std::string>& categorical_columns);

void save_csv(const Dataset& data, const std::filesystem::path& path);
void save_csv(const LabeledData& data, const std::string& target_name,
              const std::filesystem::path& path);

/// Shortest decimal form that round-trips to the same double.
std::string format_value(Scalar value);

}  // namespace pdfool
