#pragma once

#include "netdag/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace netdag {

struct DagSpec {
  Index p = 0;
  Index num_edges = 0;  // default protocol: 2p
  std::pair<double, double> weight_range{0.1, 1.0};  // magnitudes, sign-symmetric
  std::pair<double, double> omega_range{0.1, 1.0};
  std::uint64_t seed = 0;

  void validate() const;
};

enum class CovFamily { toeplitz, equicorrelation, star, ar, identity };

CovFamily cov_family_from_string(const std::string& name);
std::string to_string(CovFamily family);

struct CovSpec {
  CovFamily family = CovFamily::identity;
  Index block_size = 20;
  Index num_blocks = 1;
  double base = 0.0;            // toeplitz 0.3, equicorrelation 0.7, ar 0.7 (0 = family default)
  double star_low = 0.3;        // hub correlation range for the star family
  double star_high = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
  Index n() const { return block_size * num_blocks; }
};

struct GroundTruth {
  DagParams dag;
  RowPrecision row_precision;
  SupportMask mask;
  Matrix psi;  // (I - B)^{-T} Omega (I - B)^{-1}
  DataMatrix data;
};

// Random DAG with num_edges edges under a random node ordering; weights
// uniform on +-[weight_range], omega_j uniform on omega_range.
DagParams random_dag(const DagSpec& spec);

// Block-diagonal row covariance/precision for the named family; every Sigma
// has unit diagonal and the precision support is the family's exact pattern.
RowPrecision build_covariance(const CovSpec& spec);

// Precision with support = edges + diagonal; entries uniform on value_range,
// diagonal loaded by (|eigmin| + 0.1) when not positive definite, then
// normalized so diag(Theta^{-1}) = 1.
RowPrecision network_precision(const std::vector<std::pair<Index, Index>>& edges, Index n,
                               std::pair<double, double> value_range, std::uint64_t seed);

// Draws X row-covariance rp.sigma and column structure from the DAG:
// eps = A_Sigma Z diag(omega), X = eps (I - B)^{-1}.
GroundTruth sample_sem(const DagParams& dag, const RowPrecision& rp, Index n, std::uint64_t seed);

// Block-diagonal concatenation of the weighted adjacency with fresh omega draws.
DagParams replicate_dag(const DagParams& base, int copies,
                        std::pair<double, double> omega_range = {0.1, 1.0},
                        std::uint64_t seed = 0);

Matrix psi_from_dag(const DagParams& dag);

// Whitespace-separated undirected edge list, 1-based ids, '#' comments.
std::vector<std::pair<Index, Index>> read_edge_list(const std::string& path);

// "parent child" edge list with node names; names returned in first-appearance order.
struct NamedEdgeList {
  std::vector<std::pair<Index, Index>> edges;
  std::vector<std::string> names;
};
NamedEdgeList read_dag_edge_list(const std::string& path);

// DAG from a fixed edge set with randomized weights and omegas.
DagParams dag_from_edges(const std::vector<std::pair<Index, Index>>& edges, Index p,
                         std::pair<double, double> weight_range,
                         std::pair<double, double> omega_range, std::uint64_t seed);

// Induced subgraph on sample_n uniformly drawn nodes, relabeled 0..sample_n-1.
std::vector<std::pair<Index, Index>> induced_subgraph(
    const std::vector<std::pair<Index, Index>>& edges, Index total_nodes, Index sample_n,
    std::uint64_t seed);

}  // namespace netdag
