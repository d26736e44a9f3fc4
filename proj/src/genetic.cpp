#include "pdfool/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pdfool/rng.hpp"

namespace pdfool {

void validate_genetic_params(const GeneticParams& params) {
  if (params.pop_count < 2) {
    throw std::invalid_argument("GeneticParams: pop_count must be >= 2");
  }
  if (!(params.crossover_ratio > 0.0) || params.crossover_ratio > 1.0) {
    throw std::invalid_argument(
        "GeneticParams: crossover_ratio must be in (0, 1]");
  }
  if (params.std_ratio < 0.0) {
    throw std::invalid_argument("GeneticParams: std_ratio must be >= 0");
  }
  if (!(params.init_std_multiplier > 1.0)) {
    throw std::invalid_argument(
        "GeneticParams: init_std_multiplier must be > 1");
  }
  if (params.elitism_count < 1) {
    throw std::invalid_argument("GeneticParams: elitism_count must be >= 1");
  }
  if (params.elitism_count >= params.pop_count) {
    throw std::invalid_argument(
        "GeneticParams: elitism_count must be < pop_count");
  }
  if (params.max_iterations < 1) {
    throw std::invalid_argument("GeneticParams: max_iterations must be >= 1");
  }
}

void crossover(Population& population, Scalar crossover_ratio,
               std::uint64_t seed) {
  const std::size_t size = population.individuals.size();
  if (size < 2) {
    throw std::invalid_argument("crossover: population needs >= 2 individuals");
  }
  if (!(crossover_ratio > 0.0) || crossover_ratio > 1.0) {
    throw std::invalid_argument("crossover: ratio must be in (0, 1]");
  }
  Rng rng(seed);
  const auto n_parents = static_cast<std::size_t>(
      crossover_ratio * static_cast<Scalar>(size));
  if (n_parents < 2) return;
  const std::vector<std::size_t> parents = rng.sample_indices(size, n_parents);

  const std::size_t n_pairs = n_parents / 2;  // odd leftover parent dropped
  for (std::size_t pair = 0; pair < n_pairs; ++pair) {
    const Matrix& first = population.individuals[parents[2 * pair]];
    const Matrix& second = population.individuals[parents[2 * pair + 1]];
    Matrix child = first;
    for (Index j = 0; j < child.cols(); ++j) {
      if (rng.uniform() < 0.5) child.col(j) = second.col(j);
    }
    population.individuals.push_back(std::move(child));
  }
  population.losses.clear();  // stale after growth
}

void mutate(Population& population, const Matrix& x_prime,
            const std::set<Index>& constant_columns, Scalar std_ratio,
            bool with_constraints, std::uint64_t seed) {
  if (std_ratio < 0.0) {
    throw std::invalid_argument("mutate: std_ratio must be >= 0");
  }
  const Index n_cols = x_prime.cols();
  Vector sd(n_cols), lo(n_cols), hi(n_cols);
  for (Index j = 0; j < n_cols; ++j) {
    lo[j] = x_prime.col(j).minCoeff();
    hi[j] = x_prime.col(j).maxCoeff();
    const Scalar mean = x_prime.col(j).mean();
    sd[j] = lo[j] == hi[j]
                ? 0.0
                : std::sqrt((x_prime.col(j).array() - mean).square().sum() /
                            static_cast<Scalar>(x_prime.rows()));
  }

  Rng rng(seed);
  for (Matrix& individual : population.individuals) {
    if (individual.rows() != x_prime.rows() ||
        individual.cols() != x_prime.cols()) {
      throw std::invalid_argument("mutate: individual shape differs from X'");
    }
    for (Index j = 0; j < n_cols; ++j) {
      if (constant_columns.count(j)) continue;
      const Scalar noise_sd = sd[j] * std_ratio;
      for (Index i = 0; i < individual.rows(); ++i) {
        const Scalar before = individual(i, j);
        Scalar value = before + rng.normal(0.0, noise_sd);
        if (with_constraints) {
          if (value < lo[j]) {
            value = rng.uniform(lo[j], before);
          } else if (value > hi[j]) {
            value = rng.uniform(before, hi[j]);
          }
        }
        individual(i, j) = value;
      }
    }
  }
  population.losses.clear();
}

void evaluate(Population& population, const AttackLoss& loss) {
  population.losses.resize(population.individuals.size());
  for (std::size_t i = 0; i < population.individuals.size(); ++i) {
    population.losses[i] = loss(population.individuals[i]);
  }
}

void evaluate(Population& population, const Model& model,
              const AttackConfig& config, const Matrix& x_prime) {
  evaluate(population, AttackLoss(model, config, x_prime));
}

void select_survivors(Population& population, int pop_count, int elitism_count,
                      std::uint64_t seed) {
  const std::size_t size = population.individuals.size();
  if (population.losses.size() != size) {
    throw std::invalid_argument("select_survivors: population not evaluated");
  }
  if (pop_count < 1 || static_cast<std::size_t>(pop_count) > size) {
    throw std::invalid_argument(
        "select_survivors: pop_count must be in [1, population size]");
  }
  if (elitism_count < 0 || elitism_count > pop_count) {
    throw std::invalid_argument(
        "select_survivors: elitism_count must be in [0, pop_count]");
  }

  // Rank by loss ascending; ties keep insertion order.
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return population.losses[a] < population.losses[b];
                   });

  std::vector<std::size_t> chosen(
      order.begin(), order.begin() + static_cast<std::size_t>(elitism_count));

  // Linear rank weights over the full ordering: rank r (1 = best) gets
  // weight size - r + 1. Elites are already in, so draws start past them.
  Rng rng(seed);
  std::vector<std::size_t> ranks;  // candidate positions in `order`
  std::vector<Scalar> weights;
  for (std::size_t r = static_cast<std::size_t>(elitism_count); r < size; ++r) {
    ranks.push_back(r);
    weights.push_back(static_cast<Scalar>(size - r));  // r is 0-based here
  }
  for (int slot = elitism_count; slot < pop_count; ++slot) {
    Scalar total = std::accumulate(weights.begin(), weights.end(), 0.0);
    Scalar draw = rng.uniform() * total;
    std::size_t pick = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      draw -= weights[i];
      if (draw < 0.0) {
        pick = i;
        break;
      }
      if (i + 1 == weights.size()) pick = i;  // guard against rounding
    }
    chosen.push_back(order[ranks[pick]]);
    ranks.erase(ranks.begin() + static_cast<std::ptrdiff_t>(pick));
    weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(pick));
  }

  // Survivors ordered by loss ascending.
  std::stable_sort(chosen.begin(), chosen.end(), [&](std::size_t a,
                                                     std::size_t b) {
    return population.losses[a] < population.losses[b];
  });

  Population next;
  next.individuals.reserve(chosen.size());
  next.losses.reserve(chosen.size());
  for (const std::size_t idx : chosen) {
    next.individuals.push_back(std::move(population.individuals[idx]));
    next.losses.push_back(population.losses[idx]);
  }
  population = std::move(next);
}

AttackResult genetic_attack(const Model& model, const Dataset& x_prime,
                            const AttackConfig& config,
                            const GeneticParams& params) {
  validate_attack_config(config, x_prime);
  validate_genetic_params(params);

  const Matrix& original = x_prime.values();
  const AttackLoss loss(model, config, original);
  const PDProfile profile_before =
      partial_dependence(model, original, config.grid);

  Rng master(params.seed);

  Population population;
  population.individuals.assign(static_cast<std::size_t>(params.pop_count),
                                original);
  mutate(population, original, config.constant_columns,
         params.std_ratio * params.init_std_multiplier,
         params.mutation_with_constraints, master.next_raw());

  // The best individual seen at any evaluation is kept aside: later
  // mutations also touch the elites, so the final population alone cannot
  // guarantee a non-increasing best loss.
  Matrix best;
  Scalar best_loss = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> trace;
  trace.reserve(static_cast<std::size_t>(params.max_iterations));

  for (int iteration = 0; iteration < params.max_iterations; ++iteration) {
    crossover(population, params.crossover_ratio, master.next_raw());
    mutate(population, original, config.constant_columns, params.std_ratio,
           params.mutation_with_constraints, master.next_raw());
    evaluate(population, loss);
    for (std::size_t i = 0; i < population.individuals.size(); ++i) {
      if (population.losses[i] < best_loss) {
        best_loss = population.losses[i];
        best = population.individuals[i];
      }
    }
    trace.push_back(best_loss);
    if (iteration < params.max_iterations - 1) {
      select_survivors(population, params.pop_count, params.elitism_count,
                       master.next_raw());
    }
  }

  AttackResult result{
      .poisoned = x_prime.with_values(best),
      .loss_trace = std::move(trace),
      .profile_before = profile_before,
      .profile_after = partial_dependence(model, best, config.grid),
      .final_loss = best_loss,
  };
  result.raw_distance =
      distance(result.profile_after.centered, result.profile_before.centered);
  result.scaled_distance = result.raw_distance;
  return result;
}

}  // namespace pdfool
