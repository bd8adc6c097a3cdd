#include "eqvar/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eqvar/rng.hpp"

namespace eqvar {

namespace {

void check_recipe(const GraphRecipe& recipe, bool uses_pc) {
    if (recipe.p < 1) throw InvalidArgument("graph recipe: p must be at least 1");
    if (uses_pc && !(recipe.pc >= 0.0 && recipe.pc <= 1.0))
        throw InvalidArgument("graph recipe: pc must lie in [0, 1]");
    if (!(recipe.coeff.lo > 0.0 && recipe.coeff.lo < recipe.coeff.hi))
        throw InvalidArgument("graph recipe: coefficient law needs 0 < lo < hi");
}

double draw_coeff(Rng& rng, const CoeffSpec& coeff) {
    const double magnitude = rng.uniform(coeff.lo, coeff.hi);
    return rng.rademacher() * magnitude;
}

}  // namespace

WeightedDag gen_chain_random(const GraphRecipe& recipe) {
    check_recipe(recipe, true);
    Rng rng(recipe.seed);
    const int p = recipe.p;
    Matrix b = Matrix::Zero(p, p);
    for (int v = 0; v + 1 < p; ++v) b(v + 1, v) = draw_coeff(rng, recipe.coeff);
    for (int v = 0; v < p; ++v) {
        for (int u = v + 2; u < p; ++u) {
            if (rng.bernoulli(recipe.pc)) b(u, v) = draw_coeff(rng, recipe.coeff);
        }
    }
    return WeightedDag(std::move(b));
}

WeightedDag gen_highdim(const GraphRecipe& recipe, HighDimVariant variant) {
    check_recipe(recipe, false);
    if (recipe.p < 4) throw InvalidArgument("high-dimensional recipe needs p >= 4");
    Rng rng(recipe.seed);
    const int p = recipe.p;
    Matrix b = Matrix::Zero(p, p);
    std::vector<int> out_degree(p, 0);
    for (int v = 0; v + 1 < p; ++v) {
        b(v + 1, v) = draw_coeff(rng, recipe.coeff);
        ++out_degree[v];
    }

    for (int v = 2; v < p; ++v) {
        for (int extra = 0; extra < 2; ++extra) {
            const int ceiling = variant == HighDimVariant::Hub ? std::min(v, 9) : v;
            std::vector<int> pool;
            for (int u = 0; u < ceiling; ++u) {
                if (b(v, u) != 0.0) continue;  // already a parent (chain or earlier draw)
                if (variant == HighDimVariant::SmallK && out_degree[u] >= 4) continue;
                pool.push_back(u);
            }
            if (pool.empty()) break;
            const int u = pool[rng.below(pool.size())];
            b(v, u) = draw_coeff(rng, recipe.coeff);
            ++out_degree[u];
        }
    }
    return WeightedDag(std::move(b));
}

WeightedDag gen_random_order(const GraphRecipe& recipe) {
    check_recipe(recipe, true);
    Rng rng(recipe.seed);
    const int p = recipe.p;
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = p - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[i], perm[j]);
    }
    std::vector<int> pos(p);
    for (int i = 0; i < p; ++i) pos[perm[i]] = i;

    Matrix b = Matrix::Zero(p, p);
    for (int v = 0; v < p; ++v) {
        for (int u = v + 1; u < p; ++u) {
            if (!rng.bernoulli(recipe.pc)) continue;
            if (pos[v] < pos[u]) b(u, v) = draw_coeff(rng, recipe.coeff);
            else b(v, u) = draw_coeff(rng, recipe.coeff);
        }
    }
    return WeightedDag(std::move(b));
}

WeightedDag gen_fully_connected(const GraphRecipe& recipe) {
    check_recipe(recipe, false);
    Rng rng(recipe.seed);
    const int p = recipe.p;
    Matrix b = Matrix::Zero(p, p);
    for (int v = 0; v < p; ++v) {
        for (int u = v + 1; u < p; ++u) b(u, v) = draw_coeff(rng, recipe.coeff);
    }
    return WeightedDag(std::move(b));
}

WeightedDag generate_graph(const GraphRecipe& recipe) {
    switch (recipe.family) {
        case GraphFamily::ChainRandom: return gen_chain_random(recipe);
        case GraphFamily::HighDimSmallK: return gen_highdim(recipe, HighDimVariant::SmallK);
        case GraphFamily::HighDimHub: return gen_highdim(recipe, HighDimVariant::Hub);
        case GraphFamily::RandomOrder: return gen_random_order(recipe);
        case GraphFamily::FullyConnected: return gen_fully_connected(recipe);
    }
    throw InvalidArgument("unknown graph family");
}

Matrix sample_data(const SemModel& model, long n, std::uint64_t seed) {
    if (n < 1) throw InvalidArgument("sample size must be at least 1");
    const int p = model.p();
    Rng rng(seed);
    const double sd = std::sqrt(model.sigma2());

    Matrix eps(n, p);
    if (model.errors().kind == ErrorKind::Gaussian) {
        for (int j = 0; j < p; ++j) {
            for (long i = 0; i < n; ++i) eps(i, j) = sd * rng.normal();
        }
    } else {
        for (int j = 0; j < p; ++j) {
            for (long i = 0; i < n; ++i) eps(i, j) = sd * rng.rademacher();
        }
    }

    // X = (I - B)^{-1} eps, column by column in topological order.
    Matrix x = std::move(eps);
    const Matrix& b = model.dag().coefficients();
    for (int j : model.dag().topological_order()) {
        for (int k = 0; k < p; ++k) {
            if (b(j, k) != 0.0) x.col(j) += b(j, k) * x.col(k);
        }
    }
    return x;
}

}  // namespace eqvar
