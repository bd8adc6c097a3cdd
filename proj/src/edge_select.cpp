#include "eqvar/edge_select.hpp"

#include <algorithm>
#include <cmath>

#include "eqvar/rng.hpp"

namespace eqvar {

namespace {

constexpr double kCoordTol = 1e-7;
constexpr long kMaxSweeps = 100000;
constexpr int kGridPoints = 50;
constexpr double kGridFloor = 1e-3;
constexpr double kEdgeThreshold = 1e-8;

struct Standardized {
    Matrix xs;          // standardized active columns
    Vector yc;          // centered response
    Vector mean;        // per original column
    Vector scale;       // 1/n standard deviation per original column
    std::vector<int> active;  // original indices of nonconstant columns
    double y_mean = 0.0;
};

Standardized standardize(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Vector>& y) {
    const long n = x.rows();
    const long d = x.cols();
    Standardized out;
    out.mean = x.colwise().mean();
    out.scale = Vector::Zero(d);
    out.y_mean = y.mean();
    out.yc = y.array() - out.y_mean;

    for (long j = 0; j < d; ++j) {
        const double var = (x.col(j).array() - out.mean[j]).square().sum() / static_cast<double>(n);
        out.scale[j] = std::sqrt(var);
        if (out.scale[j] > 0.0) out.active.push_back(static_cast<int>(j));
    }
    out.xs.resize(n, out.active.size());
    for (std::size_t k = 0; k < out.active.size(); ++k) {
        const int j = out.active[k];
        out.xs.col(k) = (x.col(j).array() - out.mean[j]) / out.scale[j];
    }
    return out;
}

// Coordinate descent in the Gram ("covariance updating") form. `beta`
// holds the warm start and receives the solution.
void descend(const Matrix& gram, const Vector& corr, double lambda, Vector& beta) {
    const long d = corr.size();
    Vector gram_beta = gram * beta;
    for (long sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double max_change = 0.0;
        for (long j = 0; j < d; ++j) {
            const double old = beta[j];
            const double rho = corr[j] - gram_beta[j] + old;  // gram(j, j) == 1
            double next = 0.0;
            if (rho > lambda) next = rho - lambda;
            else if (rho < -lambda) next = rho + lambda;
            if (next != old) {
                gram_beta += gram.col(j) * (next - old);
                beta[j] = next;
                max_change = std::max(max_change, std::abs(next - old));
            }
        }
        if (max_change < kCoordTol) return;
    }
    throw NoConvergence("coordinate descent did not converge");
}

LassoFit to_original_scale(const Standardized& std_data, const Vector& beta, double lambda,
                           long d_original) {
    LassoFit fit;
    fit.lambda = lambda;
    fit.coefficients = Vector::Zero(d_original);
    double cross = 0.0;
    for (std::size_t k = 0; k < std_data.active.size(); ++k) {
        const int j = std_data.active[k];
        fit.coefficients[j] = beta[static_cast<long>(k)] / std_data.scale[j];
        cross += fit.coefficients[j] * std_data.mean[j];
    }
    fit.intercept = std_data.y_mean - cross;
    return fit;
}

std::vector<double> lambda_grid(double lambda_max) {
    std::vector<double> grid(kGridPoints);
    for (int t = 0; t < kGridPoints; ++t) {
        grid[t] = lambda_max * std::pow(kGridFloor, static_cast<double>(t) / (kGridPoints - 1));
    }
    return grid;
}

std::vector<int> fold_assignment(long n, int folds, std::uint64_t seed) {
    const long shift = static_cast<long>(Rng::derive(seed, 0xF01Dull) % static_cast<std::uint64_t>(n));
    std::vector<int> fold(n);
    for (long i = 0; i < n; ++i) {
        const long rotated = (i + shift) % n;
        fold[i] = static_cast<int>((rotated * folds) / n);
    }
    return fold;
}

}  // namespace

LassoFit lasso_fit(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                   double lambda) {
    if (X.cols() < 1) throw InvalidArgument("lasso needs at least one predictor column");
    if (X.rows() < 2) throw TooFewRows("lasso needs at least two rows");
    if (X.rows() != y.size()) throw SizeMismatch("response length does not match rows");
    if (!(lambda >= 0.0)) throw InvalidArgument("penalty must be nonnegative");

    const Standardized std_data = standardize(X, y);
    const long a = static_cast<long>(std_data.active.size());
    if (a == 0) return to_original_scale(std_data, Vector(), lambda, X.cols());

    const double inv_n = 1.0 / static_cast<double>(X.rows());
    const Matrix gram = (std_data.xs.transpose() * std_data.xs) * inv_n;
    const Vector corr = (std_data.xs.transpose() * std_data.yc) * inv_n;
    Vector beta = Vector::Zero(a);
    descend(gram, corr, lambda, beta);
    return to_original_scale(std_data, beta, lambda, X.cols());
}

double lasso_kkt_violation(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                           const LassoFit& fit) {
    const Standardized std_data = standardize(X, y);
    const double inv_n = 1.0 / static_cast<double>(X.rows());
    Vector resid = std_data.yc;
    for (std::size_t l = 0; l < std_data.active.size(); ++l) {
        const int jl = std_data.active[l];
        resid -= std_data.xs.col(l) * (fit.coefficients[jl] * std_data.scale[jl]);
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < std_data.active.size(); ++k) {
        const int j = std_data.active[k];
        const double b = fit.coefficients[j] * std_data.scale[j];
        const double grad = std_data.xs.col(k).dot(resid) * inv_n;
        if (b != 0.0) {
            worst = std::max(worst, std::abs(std::abs(grad) - fit.lambda));
        } else {
            worst = std::max(worst, std::max(0.0, std::abs(grad) - fit.lambda));
        }
    }
    return worst;
}

double lasso_objective(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                       const LassoFit& fit) {
    const Standardized std_data = standardize(X, y);
    Vector resid = std_data.yc;
    double l1 = 0.0;
    for (std::size_t l = 0; l < std_data.active.size(); ++l) {
        const int jl = std_data.active[l];
        const double b = fit.coefficients[jl] * std_data.scale[jl];
        resid -= std_data.xs.col(l) * b;
        l1 += std::abs(b);
    }
    return 0.5 * resid.squaredNorm() / static_cast<double>(X.rows()) + fit.lambda * l1;
}

LassoFit cv_lasso(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y, int folds,
                  std::uint64_t seed) {
    if (folds < 2) throw InvalidArgument("cross-validation needs at least two folds");
    const long n = X.rows();
    if (n < folds) throw TooFewRows("cross-validation needs at least one row per fold");
    if (X.cols() < 1) throw InvalidArgument("lasso needs at least one predictor column");
    if (n != y.size()) throw SizeMismatch("response length does not match rows");

    const Standardized full = standardize(X, y);
    const long a = static_cast<long>(full.active.size());
    const double inv_n = 1.0 / static_cast<double>(n);

    double lambda_max = 0.0;
    if (a > 0) lambda_max = ((full.xs.transpose() * full.yc) * inv_n).cwiseAbs().maxCoeff();
    if (!(lambda_max > 0.0)) {
        LassoFit fit = to_original_scale(full, Vector::Zero(a), 0.0, X.cols());
        fit.cv_error = full.yc.squaredNorm() * inv_n;
        return fit;
    }
    const std::vector<double> grid = lambda_grid(lambda_max);

    const std::vector<int> fold_of = fold_assignment(n, folds, seed);
    std::vector<std::vector<double>> fold_mse(folds, std::vector<double>(grid.size(), 0.0));

    for (int f = 0; f < folds; ++f) {
        std::vector<long> train, held;
        for (long i = 0; i < n; ++i) (fold_of[i] == f ? held : train).push_back(i);
        if (held.empty()) continue;

        Matrix x_train(train.size(), X.cols());
        Vector y_train(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            x_train.row(static_cast<long>(i)) = X.row(train[i]);
            y_train[static_cast<long>(i)] = y[train[i]];
        }
        const Standardized st = standardize(x_train, y_train);
        const long at = static_cast<long>(st.active.size());
        const double inv_nt = 1.0 / static_cast<double>(train.size());
        Matrix gram;
        Vector corr;
        if (at > 0) {
            gram = (st.xs.transpose() * st.xs) * inv_nt;
            corr = (st.xs.transpose() * st.yc) * inv_nt;
        }
        Vector beta = Vector::Zero(at);
        for (std::size_t t = 0; t < grid.size(); ++t) {
            if (at > 0) descend(gram, corr, grid[t], beta);
            const LassoFit fit = to_original_scale(st, beta, grid[t], X.cols());
            double err = 0.0;
            for (long i : held) {
                const double e = y[i] - fit.intercept - X.row(i).dot(fit.coefficients);
                err += e * e;
            }
            fold_mse[f][t] = err / static_cast<double>(held.size());
        }
    }

    // One-standard-error rule over the fold means: take the largest
    // penalty whose error sits within one standard error of the best.
    std::vector<double> mean_mse(grid.size(), 0.0), se(grid.size(), 0.0);
    for (std::size_t t = 0; t < grid.size(); ++t) {
        for (int f = 0; f < folds; ++f) mean_mse[t] += fold_mse[f][t];
        mean_mse[t] /= static_cast<double>(folds);
        double var = 0.0;
        for (int f = 0; f < folds; ++f) {
            const double d = fold_mse[f][t] - mean_mse[t];
            var += d * d;
        }
        se[t] = std::sqrt(var / static_cast<double>(folds - 1) / static_cast<double>(folds));
    }
    std::size_t best_t = 0;
    for (std::size_t t = 1; t < grid.size(); ++t) {
        if (mean_mse[t] < mean_mse[best_t]) best_t = t;
    }
    std::size_t chosen_t = best_t;
    for (std::size_t t = 0; t <= best_t; ++t) {
        if (mean_mse[t] <= mean_mse[best_t] + se[best_t]) {
            chosen_t = t;
            break;
        }
    }

    // Warm-started path on the full data down to the chosen penalty.
    const Matrix gram = (full.xs.transpose() * full.xs) * inv_n;
    const Vector corr = (full.xs.transpose() * full.yc) * inv_n;
    Vector beta = Vector::Zero(a);
    for (std::size_t t = 0; t <= chosen_t; ++t) descend(gram, corr, grid[t], beta);
    LassoFit fit = to_original_scale(full, beta, grid[chosen_t], X.cols());
    fit.cv_error = mean_mse[chosen_t];
    return fit;
}

long EstimatedGraph::edge_count() const {
    long c = 0;
    for (Eigen::Index j = 0; j < adjacency.rows(); ++j) {
        for (Eigen::Index k = 0; k < adjacency.cols(); ++k) {
            if (adjacency(j, k) != 0.0) ++c;
        }
    }
    return c;
}

EstimatedGraph select_edges(const Eigen::Ref<const Matrix>& X, const Ordering& ordering, int folds,
                            std::uint64_t seed) {
    const int p = static_cast<int>(X.cols());
    if (ordering.p() != p) throw SizeMismatch("ordering length does not match data columns");

    EstimatedGraph out;
    out.adjacency = Matrix::Zero(p, p);
    out.threshold = kEdgeThreshold;

    for (int z = 1; z < p; ++z) {
        const int target = ordering.sequence[z];
        Matrix preds(X.rows(), z);
        for (int i = 0; i < z; ++i) preds.col(i) = X.col(ordering.sequence[i]);
        const LassoFit fit = cv_lasso(preds, X.col(target), folds, Rng::derive(seed, z));
        for (int i = 0; i < z; ++i) {
            if (std::abs(fit.coefficients[i]) > kEdgeThreshold)
                out.adjacency(target, ordering.sequence[i]) = fit.coefficients[i];
        }
    }
    return out;
}

}  // namespace eqvar
