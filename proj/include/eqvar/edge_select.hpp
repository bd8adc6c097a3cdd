#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

#include "eqvar/sem_core.hpp"

namespace eqvar {

/// Lasso solution on the original variable scale. `lambda` is the
/// penalty of the internally standardized problem
/// (1/2n)||y - Xb||^2 + lambda ||b||_1.
struct LassoFit {
    Vector coefficients;
    double lambda = 0.0;
    double intercept = 0.0;
    std::optional<double> cv_error;
};

/// Cyclic coordinate descent at a fixed penalty. Columns are
/// standardized to unit 1/n-variance internally; coefficients come back
/// on the original scale. Converged when the largest standardized
/// coefficient change in a sweep drops below 1e-7.
LassoFit lasso_fit(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                   double lambda);

/// K-fold cross-validated lasso over a 50-point geometric penalty grid
/// from lambda_max down to 1e-3 lambda_max. Fold assignment is by
/// contiguous blocks after a seed-derived rotation, so runs are
/// reproducible. Returns the full-data refit at the largest penalty
/// whose held-out error is within one standard error of the minimum
/// (standard error taken across fold means).
LassoFit cv_lasso(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y, int folds,
                  std::uint64_t seed = 0);

/// Largest stationarity violation of a fit, on the standardized scale:
/// active coordinates should sit at |gradient| = lambda, inactive ones
/// at or below it. Zero (up to roundoff) for any exact solution.
double lasso_kkt_violation(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                           const LassoFit& fit);

/// Penalized objective of a fit on the standardized problem the solver
/// minimizes; handy for optimization sanity checks.
double lasso_objective(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                       const LassoFit& fit);

/// Directed graph estimate: adjacency(j, k) is the fitted weight of edge
/// k -> j. Only predecessor -> successor entries of the generating
/// ordering can be nonzero.
struct EstimatedGraph {
    Matrix adjacency;
    double threshold = 1e-8;

    int p() const { return static_cast<int>(adjacency.rows()); }
    long edge_count() const;
};

/// Recovers the graph given an ordering: each variable is regressed on
/// all of its predecessors with the cross-validated lasso, and
/// coefficients above the numeric-zero threshold become edges.
EstimatedGraph select_edges(const Eigen::Ref<const Matrix>& X, const Ordering& ordering, int folds,
                            std::uint64_t seed = 0);

}  // namespace eqvar
