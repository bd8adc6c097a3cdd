#include "eqvar/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eqvar {

namespace {

// State of the incremental top-down pass. While the ordered prefix has
// at most q_eff members the criterion conditions on the whole prefix and
// is maintained by a growing Cholesky factor: one O(m) update per
// candidate per step instead of a fresh O(m^3) solve. Once the prefix
// outgrows q_eff (subset mode only), per-candidate bests are kept warm:
// any subset improving on a candidate's stored minimum must contain the
// newest prefix member, so each step only sweeps subsets through that
// member.
class TopDownPass {
public:
    TopDownPass(const CovarianceEstimate& cov, int q_eff, bool record_subsets)
        : s_(cov.S),
          p_(cov.p()),
          q_eff_(q_eff),
          record_subsets_(record_subsets),
          z_(Matrix::Zero(p_, p_)),
          residual_(cov.S.diagonal()),
          prefix_diag_sum_(0.0) {
        remaining_.resize(p_);
        for (int j = 0; j < p_; ++j) remaining_[j] = j;
        best_value_ = residual_;
        best_subset_.resize(p_);
    }

    Ordering run() {
        Ordering out;
        out.sequence.reserve(p_);
        out.step_criteria.reserve(p_);
        out.step_subsets.reserve(p_);

        for (int step = 1; step <= p_; ++step) {
            const int m = step - 1;
            if (m > q_eff_ && !swept_once_) {
                // Transition into subset sweeps: freeze the full-prefix
                // values as the warm per-candidate bests. The factor was
                // last extended at prefix size q_eff, so the residuals
                // condition on the first q_eff ordered variables.
                std::vector<int> prefix_sorted = ordered_;
                prefix_sorted.pop_back();
                std::sort(prefix_sorted.begin(), prefix_sorted.end());
                for (int j : remaining_) {
                    best_value_[j] = residual_[j];
                    best_subset_[j] = prefix_sorted;
                }
                swept_once_ = true;
            }
            if (m > q_eff_) sweep_new_subsets();

            const int winner = pick_winner();
            out.sequence.push_back(winner);
            if (m <= q_eff_) {
                out.step_criteria.push_back(residual_[winner]);
                if (record_subsets_) {
                    std::vector<int> prefix_sorted = ordered_;
                    std::sort(prefix_sorted.begin(), prefix_sorted.end());
                    out.step_subsets.push_back(std::move(prefix_sorted));
                } else {
                    out.step_subsets.emplace_back();
                }
            } else {
                out.step_criteria.push_back(best_value_[winner]);
                out.step_subsets.push_back(best_subset_[winner]);
            }

            remaining_.erase(std::find(remaining_.begin(), remaining_.end(), winner));
            ordered_.push_back(winner);

            // Extend the factor while the next step still conditions on
            // the whole prefix. Failure here is the p > n stopping
            // signal: the prefix covariance became singular.
            if (step < p_ && step <= q_eff_) {
                if (!extend_factor(winner)) throw Exhausted(std::move(out), step + 1);
            }
        }
        return out;
    }

private:
    using Matrix = Eigen::MatrixXd;

    int pick_winner() const {
        int best = -1;
        double best_v = std::numeric_limits<double>::infinity();
        const bool engine = static_cast<int>(ordered_.size()) <= q_eff_;
        for (int j : remaining_) {
            const double v = engine ? residual_[j] : best_value_[j];
            if (best < 0 || v < best_v || (v == best_v && j < best)) {
                best = j;
                best_v = v;
            }
        }
        return best;
    }

    bool extend_factor(int var) {
        const int m = static_cast<int>(ordered_.size()) - 1;  // rows already in the factor
        const double pivot_raw = residual_[var];
        prefix_diag_sum_ += s_(var, var);
        const double mean_diag = prefix_diag_sum_ / static_cast<double>(m + 1);
        double pivot = pivot_raw;
        if (!(pivot > chol::kRawPivotRel * mean_diag)) {
            const double jitter = chol::kJitterRel * mean_diag;
            pivot = pivot_raw + jitter;
            if (!(pivot > 4.0 * jitter)) return false;
        }
        const double d = std::sqrt(pivot);
        for (int j : remaining_) {
            const double num = s_(var, j) - z_.col(var).head(m).dot(z_.col(j).head(m));
            const double zn = num / d;
            z_(m, j) = zn;
            residual_[j] -= zn * zn;
        }
        return true;
    }

    // Evaluate every subset that contains the newest prefix member and
    // fold improvements into the per-candidate bests.
    void sweep_new_subsets() {
        const int newest = ordered_.back();
        std::vector<int> old_prefix = ordered_;
        old_prefix.pop_back();
        std::sort(old_prefix.begin(), old_prefix.end());

        const int pick = q_eff_ - 1;
        std::vector<int> idx(pick);
        for (int i = 0; i < pick; ++i) idx[i] = i;
        std::vector<int> subset(q_eff_);
        Matrix sub(q_eff_, q_eff_);
        Matrix lower, inv;
        std::vector<const double*> cols(q_eff_);

        while (true) {
            for (int i = 0; i < pick; ++i) subset[i] = old_prefix[idx[i]];
            subset[pick] = newest;
            std::sort(subset.begin(), subset.end());

            for (int a = 0; a < q_eff_; ++a) {
                for (int b = 0; b < q_eff_; ++b) sub(a, b) = s_(subset[a], subset[b]);
            }
            if (chol::factor_spd(sub, lower)) {
                Matrix linv = lower.triangularView<Eigen::Lower>().solve(
                    Matrix::Identity(q_eff_, q_eff_));
                inv = linv.transpose() * linv;
                for (int a = 0; a < q_eff_; ++a) cols[a] = s_.col(subset[a]).data();
                for (int j : remaining_) {
                    double quad = 0.0;
                    for (int a = 0; a < q_eff_; ++a) {
                        const double sa = cols[a][j];
                        quad += inv(a, a) * sa * sa;
                        for (int b = a + 1; b < q_eff_; ++b) quad += 2.0 * inv(a, b) * sa * cols[b][j];
                    }
                    const double v = s_(j, j) - quad;
                    if (v < best_value_[j]) {
                        best_value_[j] = v;
                        best_subset_[j] = subset;
                    }
                }
            }

            if (pick == 0) break;
            int i = pick - 1;
            while (i >= 0 && idx[i] == static_cast<int>(old_prefix.size()) - pick + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int k = i + 1; k < pick; ++k) idx[k] = idx[k - 1] + 1;
        }
    }

    const Matrix& s_;
    int p_;
    int q_eff_;
    bool record_subsets_;
    bool swept_once_ = false;

    std::vector<int> remaining_;
    std::vector<int> ordered_;

    Matrix z_;  // column j: L^{-1} S_{prefix, j} for the growing prefix factor
    Eigen::VectorXd residual_;
    double prefix_diag_sum_;

    Eigen::VectorXd best_value_;
    std::vector<std::vector<int>> best_subset_;
};

}  // namespace

Ordering order_topdown(const CovarianceEstimate& S, const OrderingConfig& config) {
    if (config.mode == OrderingMode::BottomUp)
        throw InvalidArgument("order_topdown does not run bottom-up configs");
    if (config.mode == OrderingMode::TopDownSubset && config.q < 1)
        throw InvalidArgument("subset mode requires q >= 1");
    const int p = S.p();
    const int q_eff = config.mode == OrderingMode::TopDownFull ? p : config.q;
    TopDownPass pass(S, q_eff, config.mode == OrderingMode::TopDownSubset);
    return pass.run();
}

Ordering order_bottomup(const CovarianceEstimate& S) {
    const int p = S.p();
    std::vector<int> remaining(p);
    for (int j = 0; j < p; ++j) remaining[j] = j;

    // Sinks are discovered first; build back-to-front so the returned
    // arrays are in causal order.
    std::vector<int> reversed;
    std::vector<double> criteria_rev;
    reversed.reserve(p);
    criteria_rev.reserve(p);

    while (!remaining.empty()) {
        const std::vector<double> prec = precision_diagonal(S, remaining);
        // On ties take the largest index: it lands at the back of the
        // causal sequence, so tied runs come out in ascending order.
        std::size_t best = 0;
        for (std::size_t i = 1; i < remaining.size(); ++i) {
            if (prec[i] <= prec[best]) best = i;
        }
        reversed.push_back(remaining[best]);
        criteria_rev.push_back(1.0 / prec[best]);
        remaining.erase(remaining.begin() + static_cast<long>(best));
    }

    Ordering out;
    out.sequence.assign(reversed.rbegin(), reversed.rend());
    out.step_criteria.assign(criteria_rev.rbegin(), criteria_rev.rend());
    out.step_subsets.assign(p, {});
    return out;
}

Ordering run_ordering(const CovarianceEstimate& S, const OrderingConfig& config) {
    if (config.mode == OrderingMode::BottomUp) return order_bottomup(S);
    return order_topdown(S, config);
}

namespace {

void check_bound_inputs(const BoundInputs& b, bool highdim) {
    if (b.p < 1) throw InvalidArgument("bound inputs: p must be at least 1");
    if (highdim && b.q < 1) throw InvalidArgument("bound inputs: q must be at least 1");
    if (!(b.epsilon > 0.0 && b.epsilon < 1.0))
        throw InvalidArgument("bound inputs: epsilon must lie in (0, 1)");
    if (!(b.gamma2_over_sigma2 >= 0.0))
        throw InvalidArgument("bound inputs: gamma2/sigma2 must be nonnegative");
    if (!(b.max_sigma_jj > 0.0)) throw InvalidArgument("bound inputs: max Sigma_jj must be positive");
    if (!(b.zeta > 0.0)) throw InvalidArgument("bound inputs: zeta must be positive");
    if (!(b.lambda_min > 0.0)) throw InvalidArgument("bound inputs: lambda_min must be positive");
    if (!(b.sigma2 > 0.0)) throw InvalidArgument("bound inputs: sigma2 must be positive");
}

long long evaluate_bound(const BoundInputs& b, double leading_factor) {
    if (std::isinf(b.zeta)) return 0;  // edgeless graph: nothing to recover
    const long double p = static_cast<long double>(b.p);
    const long double brace = std::log(p * p + p) - std::log(static_cast<long double>(b.epsilon) / 2.0L);
    const long double sub_gauss = 1.0L + 4.0L * static_cast<long double>(b.gamma2_over_sigma2);
    const long double ratio =
        (static_cast<long double>(b.zeta) * b.lambda_min + 2.0L * b.sigma2) /
        (static_cast<long double>(b.zeta) * b.lambda_min * b.lambda_min);
    const long double rhs = static_cast<long double>(leading_factor) * brace * 128.0L *
                            sub_gauss * sub_gauss *
                            static_cast<long double>(b.max_sigma_jj) * b.max_sigma_jj * ratio *
                            ratio;
    const long double limit = 9.0e18L;
    if (!(rhs < limit)) return std::numeric_limits<long long>::max();
    return static_cast<long long>(std::floor(rhs)) + 1;
}

}  // namespace

long long sample_size_bound_lowdim(const BoundInputs& b) {
    check_bound_inputs(b, false);
    return evaluate_bound(b, static_cast<double>(b.p) * b.p);
}

long long sample_size_bound_highdim(const BoundInputs& b) {
    check_bound_inputs(b, true);
    return evaluate_bound(b, static_cast<double>(b.q + 1) * (b.q + 1));
}

}  // namespace eqvar
