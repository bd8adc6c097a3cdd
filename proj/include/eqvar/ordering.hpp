#pragma once

#include <cstdint>

#include "eqvar/cov_kernels.hpp"
#include "eqvar/sem_core.hpp"

namespace eqvar {

enum class OrderingMode { TopDownFull, TopDownSubset, BottomUp };

struct OrderingConfig {
    OrderingMode mode = OrderingMode::TopDownFull;
    int q = 0;  // maximum in-degree bound; TopDownSubset only

    static OrderingConfig top_down_full() { return {OrderingMode::TopDownFull, 0}; }
    static OrderingConfig top_down_subset(int q) { return {OrderingMode::TopDownSubset, q}; }
    static OrderingConfig bottom_up() { return {OrderingMode::BottomUp, 0}; }
};

/// Thrown when an ordering run hits a singular conditioning set before
/// all p variables are placed (the p > n regime in full mode). Carries
/// the successfully placed prefix and the 1-based step that failed.
struct Exhausted : Error {
    Ordering partial;
    int step;

    Exhausted(Ordering placed, int failed_step)
        : Error("ordering exhausted at step " + std::to_string(failed_step) +
                " (singular conditioning set)"),
          partial(std::move(placed)),
          step(failed_step) {}
};

/// Top-down ordering: repeatedly appends the candidate with the smallest
/// conditional variance given the variables ordered so far. In full mode
/// the criterion conditions on everything ordered; in subset mode it is
/// minimized over conditioning sets of size q drawn from the ordered
/// prefix. Ties break to the lowest variable index. Deterministic.
Ordering order_topdown(const CovarianceEstimate& S, const OrderingConfig& config);

/// Bottom-up ordering: repeatedly removes the variable with the smallest
/// precision-matrix diagonal over the remaining set. Sinks are found
/// first but the returned sequence is stored in causal order, directly
/// comparable with order_topdown output.
Ordering order_bottomup(const CovarianceEstimate& S);

/// Dispatch helper for benchmark code.
Ordering run_ordering(const CovarianceEstimate& S, const OrderingConfig& config);

struct BoundInputs {
    int p = 0;
    int q = 0;  // high-dim only
    double epsilon = 0.05;
    double gamma2_over_sigma2 = 0.0;
    double max_sigma_jj = 1.0;
    double zeta = 1.0;
    double lambda_min = 1.0;
    double sigma2 = 1.0;
};

/// Smallest integer sample size strictly satisfying the low-dimensional
/// recovery guarantee. Natural logarithms throughout. A +infinity zeta
/// (edgeless graph) yields 0: every ordering of an edgeless graph is
/// already valid. Saturates at the maximum representable value.
long long sample_size_bound_lowdim(const BoundInputs& b);

/// High-dimensional analogue: the p^2 factor drops to (q+1)^2.
long long sample_size_bound_highdim(const BoundInputs& b);

}  // namespace eqvar
