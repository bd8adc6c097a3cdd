#include "eqvar/cov_kernels.hpp"

#include <algorithm>
#include <cmath>

namespace eqvar {

CovarianceEstimate::CovarianceEstimate(Eigen::MatrixXd s, long sample_size, bool was_centered)
    : S(std::move(s)), n(sample_size), centered(was_centered) {
    if (S.rows() != S.cols() || S.rows() < 1)
        throw SizeMismatch("covariance matrix must be square and non-empty");
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) throw InvalidArgument("covariance matrix is not symmetric");
    for (Eigen::Index j = 0; j < S.rows(); ++j) {
        if (S(j, j) < 0.0) throw InvalidArgument("covariance matrix has a negative diagonal entry");
    }
}

CovarianceEstimate CovarianceEstimate::population(Eigen::MatrixXd s) {
    return CovarianceEstimate(std::move(s), kPopulation, true);
}

CovarianceEstimate sample_covariance(const Eigen::Ref<const Eigen::MatrixXd>& X) {
    const long n = X.rows();
    if (n < 2) throw TooFewRows("sample covariance needs at least two rows");
    Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
    Eigen::MatrixXd s = (centered.transpose() * centered) / static_cast<double>(n);
    s = 0.5 * (s + s.transpose().eval());
    return CovarianceEstimate(std::move(s), n, true);
}

namespace chol {

double mean_diagonal(const Eigen::MatrixXd& a) {
    return a.rows() == 0 ? 0.0 : a.diagonal().mean();
}

namespace {

// One factorization attempt with a fixed diagonal shift and pivot floor.
bool attempt(const Eigen::MatrixXd& a, double shift, double pivot_floor, Eigen::MatrixXd& lower) {
    const Eigen::Index m = a.rows();
    lower.setZero(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        double pivot = a(k, k) + shift - lower.row(k).head(k).squaredNorm();
        if (!(pivot > pivot_floor)) return false;
        lower(k, k) = std::sqrt(pivot);
        for (Eigen::Index i = k + 1; i < m; ++i) {
            double v = a(i, k) - lower.row(i).head(k).dot(lower.row(k).head(k));
            lower(i, k) = v / lower(k, k);
        }
    }
    return true;
}

}  // namespace

bool factor_spd(const Eigen::MatrixXd& a, Eigen::MatrixXd& lower) {
    if (a.rows() == 0) {
        lower.resize(0, 0);
        return true;
    }
    const double mean_diag = mean_diagonal(a);
    if (attempt(a, 0.0, kRawPivotRel * mean_diag, lower)) return true;
    // Exactly rank-deficient matrices keep pivots near the jitter scale
    // after the shift, so the retry floor sits a few multiples above it.
    const double jitter = kJitterRel * mean_diag;
    return attempt(a, jitter, 4.0 * jitter, lower);
}

}  // namespace chol

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& s, const std::vector<int>& rows,
                          const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = s(rows[a], cols[b]);
    }
    return out;
}

void check_index(const CovarianceEstimate& S, int j) {
    if (j < 0 || j >= S.p()) throw InvalidArgument("variable index out of range");
}

double schur_value(const CovarianceEstimate& S, const std::vector<int>& theta, int j,
                   bool* ok = nullptr) {
    if (theta.empty()) {
        if (ok) *ok = true;
        return S.S(j, j);
    }
    Eigen::MatrixXd a = submatrix(S.S, theta, theta);
    Eigen::MatrixXd lower;
    if (!chol::factor_spd(a, lower)) {
        if (ok) {
            *ok = false;
            return 0.0;
        }
        throw SingularConditioningSet("conditioning set covariance is singular");
    }
    Eigen::VectorXd rhs(theta.size());
    for (std::size_t a_i = 0; a_i < theta.size(); ++a_i) rhs[a_i] = S.S(theta[a_i], j);
    Eigen::VectorXd z = lower.triangularView<Eigen::Lower>().solve(rhs);
    if (ok) *ok = true;
    return S.S(j, j) - z.squaredNorm();
}

}  // namespace

double conditional_variance(const CovarianceEstimate& S, const std::vector<int>& theta, int j) {
    check_index(S, j);
    for (int t : theta) {
        check_index(S, t);
        if (t == j) throw InvalidArgument("conditioning set must not contain the target");
    }
    return schur_value(S, theta, j);
}

std::vector<double> precision_diagonal(const CovarianceEstimate& S,
                                       const std::vector<int>& remaining) {
    if (remaining.empty()) throw InvalidArgument("remaining set must be non-empty");
    for (int t : remaining) check_index(S, t);
    Eigen::MatrixXd a = submatrix(S.S, remaining, remaining);
    Eigen::MatrixXd lower;
    if (!chol::factor_spd(a, lower))
        throw SingularConditioningSet("remaining-set covariance is singular");
    // (A^{-1})_ii is the squared norm of column i of L^{-1}.
    Eigen::MatrixXd linv = lower.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(a.rows(), a.rows()));
    std::vector<double> out(remaining.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) out[i] = linv.col(i).squaredNorm();
    return out;
}

namespace {

struct SubsetSearch {
    const CovarianceEstimate& S;
    const std::vector<int>& pool;  // sorted candidate indices
    int j;
    int size;
    double prune_slack;

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_subset;
    bool found = false;
    long nodes = 0;

    std::vector<int> partial;

    void run() {
        partial.clear();
        partial.reserve(size);
        descend(0);
    }

    void descend(std::size_t start) {
        ++nodes;
        if (static_cast<int>(partial.size()) == size) {
            bool ok = false;
            const double v = schur_value(S, partial, j, &ok);
            if (ok && v < best) {
                best = v;
                best_subset = partial;
                found = true;
            }
            return;
        }
        const int missing = size - static_cast<int>(partial.size());
        if (static_cast<int>(pool.size() - start) < missing) return;

        // Lower bound: conditioning on the partial set plus everything
        // still available. The conditional variance is non-increasing in
        // the conditioning set, so no completion can fall below it.
        if (found) {
            std::vector<int> full = partial;
            full.insert(full.end(), pool.begin() + start, pool.end());
            bool ok = false;
            const double bound = schur_value(S, full, j, &ok);
            if (ok && bound >= best + prune_slack) return;
        }
        for (std::size_t i = start; i <= pool.size() - missing; ++i) {
            partial.push_back(pool[i]);
            descend(i + 1);
            partial.pop_back();
        }
    }
};

std::vector<int> sorted_pool(const CovarianceEstimate& S, const std::vector<int>& theta, int j,
                             int q) {
    check_index(S, j);
    if (q < 1) throw InvalidArgument("subset size q must be at least 1");
    std::vector<int> pool = theta;
    std::sort(pool.begin(), pool.end());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        check_index(S, pool[i]);
        if (pool[i] == j) throw InvalidArgument("candidate pool must not contain the target");
        if (i > 0 && pool[i] == pool[i - 1]) throw InvalidArgument("candidate pool has duplicates");
    }
    return pool;
}

}  // namespace

SubsetResult best_subset_conditional_variance(const CovarianceEstimate& S,
                                              const std::vector<int>& theta, int j, int q) {
    std::vector<int> pool = sorted_pool(S, theta, j, q);
    const int size = std::min<int>(q, static_cast<int>(pool.size()));
    if (size == 0) return SubsetResult{S.S(j, j), {}, 1};

    SubsetSearch search{S, pool, j, size, 1e-12 * (1.0 + S.S.diagonal().maxCoeff())};
    search.run();
    if (!search.found)
        throw SingularConditioningSet("every candidate conditioning subset is singular");
    return SubsetResult{search.best, std::move(search.best_subset), search.nodes};
}

SubsetResult exhaustive_subset_oracle(const CovarianceEstimate& S, const std::vector<int>& theta,
                                      int j, int q) {
    std::vector<int> pool = sorted_pool(S, theta, j, q);
    const int size = std::min<int>(q, static_cast<int>(pool.size()));
    if (size == 0) return SubsetResult{S.S(j, j), {}, 1};

    double combos = 1.0;
    for (int i = 0; i < size; ++i) combos *= static_cast<double>(pool.size() - i) / (i + 1);
    if (combos > 1e6) throw CombinatorialBlowup("subset enumeration exceeds the 1e6 guard");

    SubsetResult out;
    out.value = std::numeric_limits<double>::infinity();
    bool found = false;
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    std::vector<int> subset(size);
    while (true) {
        ++out.nodes_explored;
        for (int i = 0; i < size; ++i) subset[i] = pool[idx[i]];
        bool ok = false;
        const double v = schur_value(S, subset, j, &ok);
        if (ok && v < out.value) {
            out.value = v;
            out.subset = subset;
            found = true;
        }
        // next lexicographic combination
        int i = size - 1;
        while (i >= 0 && idx[i] == static_cast<int>(pool.size()) - size + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int k = i + 1; k < size; ++k) idx[k] = idx[k - 1] + 1;
    }
    if (!found) throw SingularConditioningSet("every candidate conditioning subset is singular");
    return out;
}

}  // namespace eqvar
