#include <doctest.h>

#include <cmath>

#include "eqvar/edge_select.hpp"
#include "eqvar/ordering.hpp"
#include "eqvar/simgen.hpp"
#include "helpers.hpp"

using namespace eqvar;

namespace {

Matrix random_design(Rng& rng, long n, int d) {
    Matrix x(n, d);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
    }
    return x;
}

}  // namespace

TEST_SUITE("edge_select") {

TEST_CASE("unpenalized fit on an orthogonal design equals least squares") {
    Matrix x(4, 2);
    x << 1, 1, 1, -1, -1, 1, -1, -1;  // orthogonal, mean-zero, unit variance
    Vector y(4);
    y << 2.0, 0.5, -0.5, -2.0;
    const LassoFit fit = lasso_fit(x, y, 0.0);
    const Vector ols = (x.transpose() * x).ldlt().solve(x.transpose() * y);
    CHECK(fit.coefficients[0] == doctest::Approx(ols[0]).epsilon(1e-6));
    CHECK(fit.coefficients[1] == doctest::Approx(ols[1]).epsilon(1e-6));
    CHECK(fit.intercept == doctest::Approx(y.mean()).epsilon(1e-9));
}

TEST_CASE("single standardized predictor soft-thresholds the least-squares coefficient") {
    Rng rng(8);
    const long n = 400;
    Matrix x = random_design(rng, n, 1);
    // standardize exactly so the closed form applies on the original scale
    x.col(0).array() -= x.col(0).mean();
    x.col(0) /= std::sqrt(x.col(0).squaredNorm() / static_cast<double>(n));
    const Vector y = x.col(0);  // least-squares coefficient 1

    for (double lambda : {0.0, 0.25, 0.6, 0.95, 1.3}) {
        const LassoFit fit = lasso_fit(x, y, lambda);
        CHECK(fit.coefficients[0] == doctest::Approx(std::max(0.0, 1.0 - lambda)).epsilon(1e-6));
    }
}

TEST_CASE("penalties at or above lambda_max zero every coefficient") {
    Rng rng(9);
    const long n = 200;
    const Matrix x = random_design(rng, n, 5);
    Vector y(n);
    for (long i = 0; i < n; ++i) y[i] = x(i, 0) - 0.5 * x(i, 3) + 0.1 * rng.normal();

    // lambda_max on the standardized scale
    double lambda_max = 0.0;
    for (int j = 0; j < 5; ++j) {
        Vector xs = x.col(j).array() - x.col(j).mean();
        xs /= std::sqrt(xs.squaredNorm() / static_cast<double>(n));
        Vector yc = y.array() - y.mean();
        lambda_max = std::max(lambda_max, std::abs(xs.dot(yc)) / static_cast<double>(n));
    }
    const LassoFit fit = lasso_fit(x, y, lambda_max * 1.0000001);
    CHECK(fit.coefficients.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("every returned fit satisfies the stationarity conditions") {
    Rng rng(10);
    for (int rep = 0; rep < 30; ++rep) {
        const long n = 60 + static_cast<long>(rng.below(200));
        const int d = 2 + static_cast<int>(rng.below(8));
        const Matrix x = random_design(rng, n, d);
        Vector y(n);
        for (long i = 0; i < n; ++i) y[i] = x(i, 0) + 0.3 * x(i, d - 1) + 0.5 * rng.normal();
        const double lambda = rng.uniform(0.0, 0.5);
        const LassoFit fit = lasso_fit(x, y, lambda);
        CHECK(lasso_kkt_violation(x, y, fit) < 1e-6);
        // the solution improves on the zero start
        LassoFit zero = fit;
        zero.coefficients.setZero();
        zero.intercept = y.mean();
        CHECK(lasso_objective(x, y, fit) <= lasso_objective(x, y, zero) + 1e-12);
    }
}

TEST_CASE("solutions move continuously along the penalty grid") {
    Rng rng(11);
    const long n = 500;
    const int d = 6;
    const Matrix x = random_design(rng, n, d);
    Vector y(n);
    for (long i = 0; i < n; ++i) y[i] = 1.5 * x(i, 1) - 0.8 * x(i, 4) + 0.5 * rng.normal();

    double lambda = 0.8;
    LassoFit prev = lasso_fit(x, y, lambda);
    for (int t = 0; t < 20; ++t) {
        const double next_lambda = lambda * std::pow(1e-3, 1.0 / 49.0);
        const LassoFit next = lasso_fit(x, y, next_lambda);
        const double step = lambda - next_lambda;
        CHECK((next.coefficients - prev.coefficients).cwiseAbs().maxCoeff() <= 10.0 * step);
        prev = next;
        lambda = next_lambda;
    }
}

TEST_CASE("cross-validation keeps pure noise empty and strong signals present") {
    int empty = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        Rng rng(1000 + t);
        const long n = 500;
        const int d = 5;
        const Matrix x = random_design(rng, n, d);
        Vector y(n);
        for (long i = 0; i < n; ++i) y[i] = rng.normal();  // independent of x
        const LassoFit fit = cv_lasso(x, y, 5, 77 + t);
        long support = 0;
        for (int j = 0; j < d; ++j) {
            if (std::abs(fit.coefficients[j]) > 1e-8) ++support;
        }
        if (support == 0) ++empty;
    }
    CHECK(empty >= 18);  // 90% of seeded trials

    int covered = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(5000 + t);
        const long n = 500;
        const int d = 5;
        const Matrix x = random_design(rng, n, d);
        Vector y(n);
        for (long i = 0; i < n; ++i)
            y[i] = 1.2 * x(i, 0) - 0.9 * x(i, 2) + 0.7 * x(i, 4) + rng.normal();
        const LassoFit fit = cv_lasso(x, y, 5, 99 + t);
        if (std::abs(fit.coefficients[0]) > 1e-8 && std::abs(fit.coefficients[2]) > 1e-8 &&
            std::abs(fit.coefficients[4]) > 1e-8)
            ++covered;
    }
    CHECK(covered >= 19);  // 95% of seeded trials

    // single strong predictor
    Rng rng(31);
    const Matrix x = random_design(rng, 200, 1);
    Vector y(200);
    for (long i = 0; i < 200; ++i) y[i] = 2.0 * x(i, 0) + 0.2 * rng.normal();
    CHECK(std::abs(cv_lasso(x, y, 5, 1).coefficients[0]) > 1e-8);
}

TEST_CASE("edge recovery on chain data") {
    Matrix b = Matrix::Zero(3, 3);
    b(1, 0) = 1.0;
    b(2, 1) = 1.0;
    const SemModel model(validate_dag(b), ErrorSpec::gaussian(1.0));
    const Matrix x = sample_data(model, 1000, 2024);

    Ordering ordering;
    ordering.sequence = {0, 1, 2};
    const EstimatedGraph graph = select_edges(x, ordering, 5, 3);
    CHECK(graph.adjacency(1, 0) != 0.0);
    CHECK(graph.adjacency(2, 1) != 0.0);

    // nothing outside predecessor -> successor positions
    for (int j = 0; j < 3; ++j) {
        for (int k = j; k < 3; ++k) CHECK(graph.adjacency(j, k) == 0.0);
    }
}

TEST_CASE("single variable yields an empty graph") {
    Matrix x(50, 1);
    Rng rng(6);
    for (long i = 0; i < 50; ++i) x(i, 0) = rng.normal();
    Ordering ordering;
    ordering.sequence = {0};
    const EstimatedGraph graph = select_edges(x, ordering, 5, 0);
    CHECK(graph.edge_count() == 0);
}

TEST_CASE("adjacency support respects an arbitrary ordering") {
    const SemModel model = test::random_model(21, 7);
    const Matrix x = sample_data(model, 300, 8);
    const Ordering ordering =
        order_topdown(sample_covariance(x), OrderingConfig::top_down_full());
    const EstimatedGraph graph = select_edges(x, ordering, 5, 4);
    std::vector<int> pos(model.p());
    for (int i = 0; i < model.p(); ++i) pos[ordering.sequence[i]] = i;
    for (int j = 0; j < model.p(); ++j) {
        for (int k = 0; k < model.p(); ++k) {
            if (graph.adjacency(j, k) != 0.0) CHECK(pos[k] < pos[j]);
        }
    }
}

}  // TEST_SUITE
