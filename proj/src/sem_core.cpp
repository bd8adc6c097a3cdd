#include "eqvar/sem_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace eqvar {

ErrorSpec ErrorSpec::gaussian(double sigma2) {
    if (!(sigma2 > 0.0)) throw InvalidArgument("error variance must be positive");
    return ErrorSpec{ErrorKind::Gaussian, sigma2};
}

ErrorSpec ErrorSpec::rademacher(double sigma2) {
    if (!(sigma2 > 0.0)) throw InvalidArgument("error variance must be positive");
    return ErrorSpec{ErrorKind::Rademacher, sigma2};
}

WeightedDag::WeightedDag(Matrix coefficients) : b_(std::move(coefficients)) {
    if (b_.rows() != b_.cols() || b_.rows() < 1)
        throw SizeMismatch("coefficient matrix must be square and non-empty");
    const int p = static_cast<int>(b_.rows());
    for (int j = 0; j < p; ++j) {
        if (b_(j, j) != 0.0) throw NonZeroDiagonal("coefficient matrix has a nonzero diagonal entry");
    }

    // Kahn's algorithm on the exact nonzero support, always taking the
    // lowest-index ready node so the stored order is canonical.
    std::vector<int> indeg(p, 0);
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) {
            if (b_(j, k) != 0.0) ++indeg[j];
        }
    }
    std::vector<bool> placed(p, false);
    topo_.reserve(p);
    for (int step = 0; step < p; ++step) {
        int next = -1;
        for (int j = 0; j < p; ++j) {
            if (!placed[j] && indeg[j] == 0) {
                next = j;
                break;
            }
        }
        if (next < 0) throw CyclicGraph("coefficient support contains a directed cycle");
        placed[next] = true;
        topo_.push_back(next);
        for (int k = 0; k < p; ++k) {
            if (b_(k, next) != 0.0) --indeg[k];
        }
    }
}

std::vector<int> WeightedDag::parents(int j) const {
    std::vector<int> out;
    for (int k = 0; k < p(); ++k) {
        if (b_(j, k) != 0.0) out.push_back(k);
    }
    return out;
}

std::vector<int> WeightedDag::children(int j) const {
    std::vector<int> out;
    for (int k = 0; k < p(); ++k) {
        if (b_(k, j) != 0.0) out.push_back(k);
    }
    return out;
}

int WeightedDag::in_degree(int j) const {
    int d = 0;
    for (int k = 0; k < p(); ++k) {
        if (b_(j, k) != 0.0) ++d;
    }
    return d;
}

int WeightedDag::max_in_degree() const {
    int m = 0;
    for (int j = 0; j < p(); ++j) m = std::max(m, in_degree(j));
    return m;
}

long WeightedDag::edge_count() const {
    long c = 0;
    for (int j = 0; j < p(); ++j) {
        for (int k = 0; k < p(); ++k) {
            if (b_(j, k) != 0.0) ++c;
        }
    }
    return c;
}

std::vector<std::pair<int, int>> WeightedDag::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int src = 0; src < p(); ++src) {
        for (int dst = 0; dst < p(); ++dst) {
            if (b_(dst, src) != 0.0) out.emplace_back(src, dst);
        }
    }
    return out;
}

std::vector<int> WeightedDag::ancestors(int j) const {
    std::vector<bool> seen(p(), false);
    std::vector<int> stack{j};
    seen[j] = true;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int k = 0; k < p(); ++k) {
            if (b_(v, k) != 0.0 && !seen[k]) {
                seen[k] = true;
                stack.push_back(k);
            }
        }
    }
    std::vector<int> out;
    for (int v = 0; v < p(); ++v) {
        if (seen[v]) out.push_back(v);
    }
    return out;
}

std::vector<int> WeightedDag::descendants(int j) const {
    std::vector<bool> seen(p(), false);
    std::vector<int> stack{j};
    seen[j] = true;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int k = 0; k < p(); ++k) {
            if (b_(k, v) != 0.0 && !seen[k]) {
                seen[k] = true;
                stack.push_back(k);
            }
        }
    }
    std::vector<int> out;
    for (int v = 0; v < p(); ++v) {
        if (seen[v]) out.push_back(v);
    }
    return out;
}

int WeightedDag::markov_blanket_size(int j) const {
    std::set<int> blanket;
    for (int k : parents(j)) blanket.insert(k);
    for (int c : children(j)) {
        blanket.insert(c);
        for (int k : parents(c)) {
            if (k != j) blanket.insert(k);
        }
    }
    return static_cast<int>(blanket.size());
}

int WeightedDag::max_markov_blanket_size() const {
    int m = 0;
    for (int j = 0; j < p(); ++j) m = std::max(m, markov_blanket_size(j));
    return m;
}

WeightedDag WeightedDag::subgraph(const std::vector<int>& keep) const {
    const int m = static_cast<int>(keep.size());
    Matrix sub(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) sub(a, b) = b_(keep[a], keep[b]);
    }
    return WeightedDag(std::move(sub));
}

WeightedDag validate_dag(const Matrix& coefficients) { return WeightedDag(coefficients); }

SemModel::SemModel(WeightedDag dag, ErrorSpec errors) : dag_(std::move(dag)), errors_(errors) {
    if (!(errors_.sigma2 > 0.0)) throw InvalidArgument("error variance must be positive");
}

CovarianceEstimate population_covariance(const SemModel& model) {
    const WeightedDag& dag = model.dag();
    const int p = dag.p();
    const std::vector<int>& topo = dag.topological_order();

    // Under the topological permutation I - B is unit lower triangular,
    // so the total-effect matrix comes from one triangular solve.
    Matrix m = Matrix::Identity(p, p);
    for (std::size_t a = 0; a < topo.size(); ++a) {
        for (std::size_t b = 0; b < a; ++b) m(a, b) = -dag.coefficients()(topo[a], topo[b]);
    }
    Matrix pi = m.triangularView<Eigen::UnitLower>().solve(Matrix::Identity(p, p));
    Matrix sigma_perm = model.sigma2() * (pi * pi.transpose());

    Matrix sigma(p, p);
    for (std::size_t a = 0; a < topo.size(); ++a) {
        for (std::size_t b = 0; b < topo.size(); ++b) sigma(topo[a], topo[b]) = sigma_perm(a, b);
    }
    sigma = 0.5 * (sigma + sigma.transpose().eval());
    return CovarianceEstimate::population(std::move(sigma));
}

double zeta(const WeightedDag& dag) {
    double best = std::numeric_limits<double>::infinity();
    const Matrix& b = dag.coefficients();
    for (int j = 0; j < dag.p(); ++j) {
        for (int k = 0; k < dag.p(); ++k) {
            if (b(j, k) != 0.0) best = std::min(best, b(j, k) * b(j, k));
        }
    }
    return best;
}

bool is_topological(const std::vector<int>& sequence, const WeightedDag& dag) {
    const int p = dag.p();
    if (static_cast<int>(sequence.size()) != p)
        throw LengthMismatch("sequence length does not match the number of variables");
    std::vector<int> pos(p, -1);
    for (int i = 0; i < p; ++i) {
        const int v = sequence[i];
        if (v < 0 || v >= p || pos[v] >= 0) throw InvalidArgument("sequence is not a permutation");
        pos[v] = i;
    }
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) {
            if (dag.coefficients()(j, k) != 0.0 && pos[k] > pos[j]) return false;
        }
    }
    return true;
}

Matrix rescale_known_ratios(const Matrix& data, const Vector& a) {
    if (a.size() != data.cols()) throw SizeMismatch("scale vector length does not match columns");
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (!(a[j] > 0.0)) throw NonPositiveScale("scales must be strictly positive");
    }
    Matrix out = data;
    for (Eigen::Index j = 0; j < a.size(); ++j) out.col(j) /= a[j];
    return out;
}

CovarianceEstimate rescale_known_ratios(const CovarianceEstimate& cov, const Vector& a) {
    if (a.size() != cov.S.rows()) throw SizeMismatch("scale vector length does not match matrix");
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (!(a[j] > 0.0)) throw NonPositiveScale("scales must be strictly positive");
    }
    Eigen::MatrixXd s = cov.S;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) /= a[i] * a[j];
    }
    return CovarianceEstimate(std::move(s), cov.n, cov.centered);
}

}  // namespace eqvar
