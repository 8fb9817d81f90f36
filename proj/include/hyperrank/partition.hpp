#pragma once

#include "hyperrank/common.hpp"
#include "hyperrank/hypergraph.hpp"
#include "hyperrank/solver.hpp"

#include <span>
#include <string>
#include <vector>

namespace hyperrank {

/// Which ranking vector seeds the latent graph in the bipartition pipeline.
enum class RankMethod { Mlppr, Mpr, Gpr };

struct PartitionOptions {
    Scalar alpha = 0.99;
    RankMethod method = RankMethod::Mlppr;
    SolveOptions solve;
    std::uint64_t seed = 0;      // eigen-iteration start
    Scalar chain_tol = 1e-12;    // stationary-distribution residual target
    Scalar eig_tol = 1e-10;      // deflated power-iteration residual target
    int power_max_iter = 100000;
};

/// Sweep over prefix sets of an ordering: h(i) = cut(S_i)(1/vol(S_i) +
/// 1/vol(S_i complement)), i = 1..n-1; i_star is the smallest minimizer.
struct SweepCut {
    std::vector<VertexId> order;
    std::vector<Scalar> h;          // h[i-1] = h(i)
    int i_star = 0;                 // 1-based prefix length
    std::vector<VertexId> s;        // {order[0..i_star)}
    std::vector<VertexId> s_bar;    // complement, in order
};

/// Latent-chain quantities of the bipartition pipeline: the contracted
/// adjacency matrix, the stationary distribution of the teleported chain,
/// and the second left eigenvector of the symmetrized operator.
struct PartitionState {
    SpMatrix a_hat;     // Pbar x_3 y*  (plus rank-one correction for Mpr)
    Vector a_hat_rank1_u, a_hat_rank1_c;  // Mpr only: A = a_hat + u c^T
    Vector pi;
    Scalar pi_residual = 0;
    Vector x_star;
    Scalar lambda2 = 0;        // eigenvalue of 2 P_sym paired with x_star
    Scalar eig_residual = 0;
    Vector ranking;            // y* (Mlppr), x* (Mpr), PageRank y (Gpr)
    SolveReport solve_report;
};

/// Runs the pipeline through the eigenvector stage (no sweep). k=3 only.
PartitionState partition_state(const UniformHypergraph& h, const PartitionOptions& opts = {});

/// Evaluates the sweep for a fixed vertex ordering, incrementally in
/// O(k nnz) across the whole sweep. Prefixes with a zero-volume side get
/// h = +inf and are never selected.
SweepCut sweep_cut(const UniformHypergraph& h, std::span<const VertexId> order);

/// Full spectral bipartition: rank, contract, symmetrize, order by the
/// second left eigenvector, sweep.
SweepCut bipartition(const UniformHypergraph& h, const PartitionOptions& opts = {});

struct PartitionResult {
    std::vector<std::vector<VertexId>> parts;
    bool reached_target = true;
    std::string diagnostic;
};

/// Recursive multiway partition: repeatedly bipartitions the current
/// largest part's induced sub-hypergraph until `parts` parts exist. Parts
/// whose induced sub-hypergraph has no edges freeze; if the target is
/// unreachable, fewer parts come back with a diagnostic.
PartitionResult recursive_partition(const UniformHypergraph& h, int parts,
                                    const PartitionOptions& opts = {});

}  // namespace hyperrank
