#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "pdfool/attack.hpp"

namespace pdfool {

struct GeneticParams {
  int pop_count = 50;
  Scalar crossover_ratio = 0.5;      // fraction of the population that parents
  Scalar std_ratio = 0.1;            // mutation noise as a fraction of column sd
  Scalar init_std_multiplier = 3.0;  // first mutation uses std_ratio * this
  bool mutation_with_constraints = true;
  int elitism_count = 2;
  int max_iterations = 200;
  std::uint64_t seed = 0;
};

void validate_genetic_params(const GeneticParams& params);

/// Candidate datasets with their cached losses. Every individual has the same
/// shape as the original dataset and carries its constant columns bit-equal.
struct Population {
  std::vector<Matrix> individuals;
  std::vector<Scalar> losses;  // parallel to individuals, valid after evaluate
};

/// Pairs a random crossover_ratio fraction of the population without
/// replacement; each pair contributes one child whose columns come from
/// either parent with probability 1/2. Children are appended. An odd parent
/// count drops the unpaired parent.
void crossover(Population& population, Scalar crossover_ratio,
               std::uint64_t seed);

/// Adds zero-mean Gaussian noise to every free cell, with per-column sd equal
/// to std(X') * std_ratio. Columns in constant_columns never change. With
/// constraints on, a value pushed outside the original column range [min, max]
/// is replaced by a uniform draw between its pre-mutation value and the
/// violated boundary.
void mutate(Population& population, const Matrix& x_prime,
            const std::set<Index>& constant_columns, Scalar std_ratio,
            bool with_constraints, std::uint64_t seed);

/// Loss per individual; order-independent.
void evaluate(Population& population, const AttackLoss& loss);
void evaluate(Population& population, const Model& model,
              const AttackConfig& config, const Matrix& x_prime);

/// Reduces the population to pop_count, ordered by loss ascending. The best
/// elitism_count individuals always survive; the rest are drawn without
/// replacement with probability proportional to (size - rank + 1).
void select_survivors(Population& population, int pop_count, int elitism_count,
                      std::uint64_t seed);

/// Model-agnostic poisoning: evolves whole datasets against the attack loss.
/// The model is only ever queried through predict.
AttackResult genetic_attack(const Model& model, const Dataset& x_prime,
                            const AttackConfig& config,
                            const GeneticParams& params);

}  // namespace pdfool
