#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

#include "eqvar/errors.hpp"

namespace eqvar {

/// Symmetric covariance matrix (sample or exact) with sample-size
/// metadata. `n == kPopulation` marks exact population matrices.
struct CovarianceEstimate {
    Eigen::MatrixXd S;
    long n = 0;
    bool centered = true;

    static constexpr long kPopulation = std::numeric_limits<long>::max();

    CovarianceEstimate(Eigen::MatrixXd s, long sample_size, bool was_centered);
    static CovarianceEstimate population(Eigen::MatrixXd s);

    int p() const { return static_cast<int>(S.rows()); }
    bool is_population() const { return n == kPopulation; }
};

/// Mean-centers columns, then S = (1/n) Xc' Xc. The 1/n normalization
/// matches E(XX') for centered data.
CovarianceEstimate sample_covariance(const Eigen::Ref<const Eigen::MatrixXd>& X);

namespace chol {

/// Pivot floor for a raw factorization attempt, relative to the mean
/// diagonal of the submatrix.
inline constexpr double kRawPivotRel = 1e-12;
/// Diagonal jitter for the single retry, relative to the mean diagonal.
inline constexpr double kJitterRel = 1e-9;

double mean_diagonal(const Eigen::MatrixXd& a);

/// Lower Cholesky factor with the documented safeguard: one raw attempt
/// (pivots must exceed kRawPivotRel times the mean diagonal), then one
/// retry on a + jitter*I whose pivots must exceed twice the jitter.
/// Returns false when the matrix is singular at the jitter scale, which
/// is the p > n stopping signal.
bool factor_spd(const Eigen::MatrixXd& a, Eigen::MatrixXd& lower);

}  // namespace chol

/// Schur complement S_jj - S_{j,T} S_{T,T}^{-1} S_{T,j}: the variance of
/// variable j conditional on the set `theta` (any order; empty set gives
/// the marginal variance). Algebraically equals the reciprocal of entry
/// (j, j) of the inverse of S over theta + {j}.
double conditional_variance(const CovarianceEstimate& S, const std::vector<int>& theta, int j);

struct SubsetResult {
    double value = 0.0;
    std::vector<int> subset;  // ascending
    long nodes_explored = 0;
};

/// Minimum of conditional_variance(S, C, j) over C subseteq theta with
/// |C| = min(q, |theta|), by branch and bound. The bound uses the
/// monotonicity of the conditional variance in the conditioning set: a
/// partial selection is pruned when conditioning on everything still
/// available cannot beat the incumbent. Exactly matches the exhaustive
/// oracle, including the tie-break to the lexicographically smallest
/// subset.
SubsetResult best_subset_conditional_variance(const CovarianceEstimate& S,
                                              const std::vector<int>& theta, int j, int q);

/// Plain enumeration over all size-min(q, |theta|) subsets; ground truth
/// for the branch-and-bound search. Guarded against combinatorial
/// blowup; intended for tests.
SubsetResult exhaustive_subset_oracle(const CovarianceEstimate& S, const std::vector<int>& theta,
                                      int j, int q);

/// Diagonal of the inverse of S restricted to `remaining`, via Cholesky.
/// Returned values align with the order of `remaining`.
std::vector<double> precision_diagonal(const CovarianceEstimate& S,
                                       const std::vector<int>& remaining);

}  // namespace eqvar
