#pragma once

#include <cstdint>

#include "eqvar/sem_core.hpp"

namespace eqvar {

enum class GraphFamily { ChainRandom, HighDimSmallK, HighDimHub, RandomOrder, FullyConnected };

/// Sign-symmetric coefficient laws: magnitude uniform on [lo, hi], sign
/// equiprobable. PlusMinus and TwoSided draw the same distribution; the
/// two names mirror the two interval notations used in the benchmark
/// settings.
enum class CoeffLaw { PlusMinus, TwoSided };

struct CoeffSpec {
    CoeffLaw law = CoeffLaw::PlusMinus;
    double lo = 0.3;
    double hi = 1.0;
};

struct GraphRecipe {
    GraphFamily family = GraphFamily::ChainRandom;
    int p = 0;
    double pc = 0.0;  // ChainRandom / RandomOrder only
    CoeffSpec coeff;
    std::uint64_t seed = 0;
};

enum class HighDimVariant { SmallK, Hub };

/// Chain 1 -> 2 -> ... -> p plus each skip pair (v, u), v < u - 1,
/// independently with probability pc. The ordering 1..p is the unique
/// topological ordering.
WeightedDag gen_chain_random(const GraphRecipe& recipe);

/// Chain plus, for every vertex beyond the second, two extra parents
/// drawn without replacement from the eligible pool. SmallK restricts
/// the pool to vertices of current out-degree below four (Markov
/// blankets stay bounded); Hub restricts it to the first few vertices,
/// which grow into hubs. A pool is re-evaluated after each single draw
/// and taken whole when it has fewer than two members. Maximum in-degree
/// is three by construction.
WeightedDag gen_highdim(const GraphRecipe& recipe, HighDimVariant variant);

/// Uniformly random topological ordering, then every pair included with
/// probability pc, directed along the ordering.
WeightedDag gen_random_order(const GraphRecipe& recipe);

/// Every pair v < u gets the edge v -> u.
WeightedDag gen_fully_connected(const GraphRecipe& recipe);

/// Dispatch on recipe.family.
WeightedDag generate_graph(const GraphRecipe& recipe);

/// Draws n i.i.d. error rows per the model's ErrorSpec and propagates
/// them through the structural equations in topological order. Bitwise
/// deterministic for a given seed.
Matrix sample_data(const SemModel& model, long n, std::uint64_t seed);

}  // namespace eqvar
