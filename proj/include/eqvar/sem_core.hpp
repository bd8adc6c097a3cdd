#pragma once

#include <Eigen/Dense>

#include <vector>

#include "eqvar/cov_kernels.hpp"
#include "eqvar/errors.hpp"

namespace eqvar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorKind { Gaussian, Rademacher };

/// Error-term law shared by all p structural equations. Both supported
/// kinds are sub-Gaussian; gamma2() is the (squared) sub-Gaussian
/// parameter implied by the kind, which equals sigma2 for a Gaussian and
/// for a symmetric two-point law bounded by sqrt(sigma2).
struct ErrorSpec {
    ErrorKind kind = ErrorKind::Gaussian;
    double sigma2 = 1.0;

    static ErrorSpec gaussian(double sigma2);
    static ErrorSpec rademacher(double sigma2);

    double gamma2() const { return sigma2; }
};

/// Weighted directed acyclic graph over variables 0..p-1, stored as the
/// p x p coefficient matrix B with B(j, k) the weight of edge k -> j.
/// Construction validates the zero diagonal and acyclicity of the exact
/// nonzero support (no thresholding); a canonical topological order is
/// computed once by Kahn's algorithm with lowest-index tie-breaking.
class WeightedDag {
public:
    explicit WeightedDag(Matrix coefficients);

    int p() const { return static_cast<int>(b_.rows()); }
    const Matrix& coefficients() const { return b_; }
    double weight(int child, int parent) const { return b_(child, parent); }

    bool has_edge(int src, int dst) const { return b_(dst, src) != 0.0; }
    std::vector<int> parents(int j) const;
    std::vector<int> children(int j) const;
    int in_degree(int j) const;
    int max_in_degree() const;
    long edge_count() const;
    /// Edges as (src, dst) pairs, sorted ascending.
    std::vector<std::pair<int, int>> edges() const;

    /// Canonical topological order (sources first).
    const std::vector<int>& topological_order() const { return topo_; }

    /// Ancestors / descendants including j itself.
    std::vector<int> ancestors(int j) const;
    std::vector<int> descendants(int j) const;

    /// Markov blanket: parents, children, and children's other parents.
    int markov_blanket_size(int j) const;
    int max_markov_blanket_size() const;

    /// Induced subgraph B[keep, keep]; `keep` indices in ascending order.
    WeightedDag subgraph(const std::vector<int>& keep) const;

private:
    Matrix b_;
    std::vector<int> topo_;
};

/// Validates a coefficient matrix and wraps it as a WeightedDag.
WeightedDag validate_dag(const Matrix& coefficients);

/// Linear structural equation model with one shared error variance: each
/// variable is a weighted sum of its parents plus an independent error
/// drawn from `errors`. The model variance sigma2 is the ErrorSpec's.
class SemModel {
public:
    SemModel(WeightedDag dag, ErrorSpec errors);

    const WeightedDag& dag() const { return dag_; }
    double sigma2() const { return errors_.sigma2; }
    const ErrorSpec& errors() const { return errors_; }
    int p() const { return dag_.p(); }

private:
    WeightedDag dag_;
    ErrorSpec errors_;
};

/// Result of an ordering run: a permutation of 0..p-1 in causal order
/// (sources first), the per-step criterion value in variance units, and
/// the conditioning subset chosen at each step (empty outside subset
/// mode). For bottom-up runs all three arrays are aligned with the
/// returned causal order, and the recorded criterion is the reciprocal
/// of the minimized precision so that units match.
struct Ordering {
    std::vector<int> sequence;
    std::vector<double> step_criteria;
    std::vector<std::vector<int>> step_subsets;

    int p() const { return static_cast<int>(sequence.size()); }
};

/// Exact covariance sigma2 * (I-B)^{-1} (I-B)^{-T}, computed by unit
/// triangular solves under the topological permutation.
CovarianceEstimate population_covariance(const SemModel& model);

/// Minimum squared edge coefficient; +infinity when the edge set is
/// empty (every ordering of an edgeless graph is valid, and the bound
/// calculators treat the sentinel as "no sample-size requirement").
double zeta(const WeightedDag& dag);

/// True iff every edge of the graph points forward in `sequence`.
bool is_topological(const std::vector<int>& sequence, const WeightedDag& dag);

/// Divides column j by a[j]. Feeding the result to any ordering
/// operation handles models whose error variances are a_j^2 * sigma2
/// with known a.
Matrix rescale_known_ratios(const Matrix& data, const Vector& a);

/// Covariance version: entry (i, j) divided by a[i] * a[j].
CovarianceEstimate rescale_known_ratios(const CovarianceEstimate& cov, const Vector& a);

}  // namespace eqvar
