#pragma once

#include <algorithm>
#include <vector>

#include "eqvar/rng.hpp"
#include "eqvar/sem_core.hpp"
#include "eqvar/simgen.hpp"

namespace eqvar::test {

/// Random DAG with a uniformly random ordering, edge probability drawn
/// from [0.2, 0.8], coefficients sign-symmetric with magnitude in
/// [min_coef, 1], and 2..max_p variables.
inline SemModel random_model(std::uint64_t seed, int max_p = 8, double min_coef = 0.3,
                             double sigma2 = 1.0) {
    Rng rng(Rng::derive(seed, 0xA11CE));
    GraphRecipe recipe;
    recipe.family = GraphFamily::RandomOrder;
    recipe.p = 2 + static_cast<int>(rng.below(max_p - 1));
    recipe.pc = rng.uniform(0.2, 0.8);
    recipe.coeff = CoeffSpec{CoeffLaw::PlusMinus, min_coef, 1.0};
    recipe.seed = Rng::derive(seed, 0xDA6);
    return SemModel(gen_random_order(recipe), ErrorSpec::gaussian(sigma2));
}

/// All ancestral sets (closed under parents), including the empty set.
inline std::vector<std::vector<int>> ancestral_sets(const WeightedDag& dag) {
    const int p = dag.p();
    std::vector<std::vector<int>> out;
    for (unsigned mask = 0; mask < (1u << p); ++mask) {
        bool ancestral = true;
        for (int j = 0; j < p && ancestral; ++j) {
            if (!(mask & (1u << j))) continue;
            for (int k : dag.parents(j)) {
                if (!(mask & (1u << k))) {
                    ancestral = false;
                    break;
                }
            }
        }
        if (!ancestral) continue;
        std::vector<int> c;
        for (int j = 0; j < p; ++j) {
            if (mask & (1u << j)) c.push_back(j);
        }
        out.push_back(std::move(c));
    }
    return out;
}

inline std::vector<int> complement(const std::vector<int>& c, int p) {
    std::vector<int> out;
    for (int j = 0; j < p; ++j) {
        if (!std::binary_search(c.begin(), c.end(), j)) out.push_back(j);
    }
    return out;
}

/// Pair-counting Kendall tau-b, quadratic time; oracle for the fast path.
inline double kendall_oracle(const Vector& x, const Vector& y) {
    const long n = x.size();
    long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0, tie_both = 0;
    for (long i = 0; i < n; ++i) {
        for (long j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0) ++tie_both;
            else if (dx == 0.0) ++tie_x;
            else if (dy == 0.0) ++tie_y;
            else if (dx * dy > 0.0) ++concordant;
            else ++discordant;
        }
    }
    const double n0 = 0.5 * static_cast<double>(n) * (n - 1);
    const double t1 = static_cast<double>(tie_x + tie_both);
    const double t2 = static_cast<double>(tie_y + tie_both);
    return (static_cast<double>(concordant) - static_cast<double>(discordant)) /
           std::sqrt((n0 - t1) * (n0 - t2));
}

/// Random symmetric positive-definite matrix with unit-scale diagonal.
inline Eigen::MatrixXd random_spd(Rng& rng, int p) {
    Eigen::MatrixXd m(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) m(i, j) = rng.normal();
    }
    Eigen::MatrixXd s = m * m.transpose() / static_cast<double>(p);
    s += 0.2 * Eigen::MatrixXd::Identity(p, p);
    return 0.5 * (s + s.transpose().eval());
}

}  // namespace eqvar::test
