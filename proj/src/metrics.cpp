#include "eqvar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eqvar {

namespace {

// Inversion count by merge sort; strictly decreasing pairs only, so ties
// contribute nothing.
long long count_inversions(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                           std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    long long swaps = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
    std::size_t a = lo, b = mid, out = lo;
    while (a < mid && b < hi) {
        if (v[b] < v[a]) {
            swaps += static_cast<long long>(mid - a);
            scratch[out++] = v[b++];
        } else {
            scratch[out++] = v[a++];
        }
    }
    while (a < mid) scratch[out++] = v[a++];
    while (b < hi) scratch[out++] = v[b++];
    std::copy(scratch.begin() + static_cast<long>(lo), scratch.begin() + static_cast<long>(hi),
              v.begin() + static_cast<long>(lo));
    return swaps;
}

long long tie_pairs(const std::vector<double>& sorted) {
    long long total = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const long long c = static_cast<long long>(j - i);
        total += c * (c - 1) / 2;
        i = j;
    }
    return total;
}

}  // namespace

double kendall_tau(const Vector& true_ranks, const Vector& est_ranks) {
    const long n = true_ranks.size();
    if (n != est_ranks.size()) throw LengthMismatch("rank vectors differ in length");
    if (n < 2) throw InvalidArgument("need at least two ranks");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (true_ranks[a] != true_ranks[b]) return true_ranks[a] < true_ranks[b];
        return est_ranks[a] < est_ranks[b];
    });

    const long long n0 = static_cast<long long>(n) * (n - 1) / 2;

    // Ties in x, and joint ties, from the (x, y)-sorted sequence.
    long long t1 = 0, t3 = 0;
    {
        long i = 0;
        while (i < n) {
            long j = i;
            while (j < n && true_ranks[order[j]] == true_ranks[order[i]]) ++j;
            const long long c = j - i;
            t1 += c * (c - 1) / 2;
            long a = i;
            while (a < j) {
                long b = a;
                while (b < j && est_ranks[order[b]] == est_ranks[order[a]]) ++b;
                const long long cc = b - a;
                t3 += cc * (cc - 1) / 2;
                a = b;
            }
            i = j;
        }
    }

    std::vector<double> y_seq(n), scratch(n);
    for (long i = 0; i < n; ++i) y_seq[i] = est_ranks[order[i]];
    const long long swaps = count_inversions(y_seq, scratch, 0, static_cast<std::size_t>(n));
    const long long t2 = tie_pairs(y_seq);  // y_seq is sorted after counting

    if (n0 == t1 || n0 == t2) throw AllTied("a rank vector is constant");

    const double num = static_cast<double>(n0 - t1 - t2 + t3 - 2 * swaps);
    const double den = std::sqrt(static_cast<double>(n0 - t1)) * std::sqrt(static_cast<double>(n0 - t2));
    return num / den;
}

EdgeMetrics edge_metrics(const WeightedDag& truth, const EstimatedGraph& estimate) {
    const int p = truth.p();
    if (estimate.p() != p) throw SizeMismatch("graphs have different variable counts");

    long true_edges = 0, est_edges = 0, hit = 0, flipped = 0;
    long hamming = 0;
    const Matrix& bt = truth.coefficients();
    const Matrix& be = estimate.adjacency;
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) {
            if (j == k) continue;
            const bool in_truth = bt(j, k) != 0.0;
            const bool in_est = be(j, k) != 0.0;
            if (in_truth) ++true_edges;
            if (in_est) {
                ++est_edges;
                if (in_truth) ++hit;
                if (bt(k, j) != 0.0) ++flipped;
            }
            if (in_truth != in_est) ++hamming;
        }
    }

    EdgeMetrics out;
    out.recall = true_edges == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(true_edges);
    out.flipped = est_edges == 0 ? 0.0 : static_cast<double>(flipped) / static_cast<double>(est_edges);
    out.fdr = est_edges == 0 ? 0.0
                             : static_cast<double>(est_edges - hit) / static_cast<double>(est_edges);
    out.hamming = hamming;
    return out;
}

Vector ordering_to_ranks(const Ordering& ordering) {
    const int p = ordering.p();
    Vector ranks(p);
    for (int pos = 0; pos < p; ++pos) ranks[ordering.sequence[pos]] = pos + 1;
    return ranks;
}

}  // namespace eqvar
