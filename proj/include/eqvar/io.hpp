#pragma once

#include <string>

#include "eqvar/edge_select.hpp"
#include "eqvar/sem_core.hpp"

namespace eqvar {

// File formats used by the CLI. All indices in files are 1-based; all
// in-memory indices are 0-based. Doubles are written with 17 significant
// digits so rewritten files parse back exactly.

/// Data CSV: n rows by p numeric columns, '.' decimal separator, LF
/// newlines, optional "x1,...,xp" header.
void write_data_csv(const std::string& path, const Matrix& x, bool header = false);
Matrix read_data_csv(const std::string& path);

/// Edge CSV: header "src,dst,weight", one row per edge, sorted by
/// (src, dst), 1-based indices.
void write_edge_csv(const std::string& path, const Matrix& adjacency);
/// Reads an edge list back into a p x p adjacency matrix.
Matrix read_edge_csv(const std::string& path, int p);

/// Model metadata JSON: {"p": ..., "sigma2": ..., "error": {...}},
/// stored alongside the edge CSV.
void write_model_json(const std::string& path, const SemModel& model);
SemModel read_model(const std::string& json_path, const std::string& edges_path);

/// Ordering JSON: {"sequence": [...], "step_criteria": [...],
/// "step_subsets": [[...]]} with 1-based variable indices.
void write_ordering_json(const std::string& path, const Ordering& ordering);
Ordering read_ordering_json(const std::string& path);

}  // namespace eqvar
