#pragma once

#include "eqvar/edge_select.hpp"
#include "eqvar/sem_core.hpp"

namespace eqvar {

/// Directed-edge recovery measures against a ground-truth graph.
/// Flipped edges count as false discoveries, so fdr >= flipped. An empty
/// estimate has flipped = fdr = 0; an empty truth has recall = 1.
struct EdgeMetrics {
    double recall = 0.0;
    double flipped = 0.0;
    double fdr = 0.0;
    long hamming = 0;
};

/// Kendall's tau-b between two rank vectors:
/// (concordant - discordant) / sqrt((n0 - t1)(n0 - t2)) with tie
/// corrections on both sides. Runs in O(p log p) via merge counting;
/// throws AllTied when either vector is constant.
double kendall_tau(const Vector& true_ranks, const Vector& est_ranks);

EdgeMetrics edge_metrics(const WeightedDag& truth, const EstimatedGraph& estimate);

/// Rank of variable v is its 1-based position in the sequence.
Vector ordering_to_ranks(const Ordering& ordering);

}  // namespace eqvar
