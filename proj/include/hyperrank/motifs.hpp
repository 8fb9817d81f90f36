#pragma once

#include "hyperrank/common.hpp"
#include "hyperrank/hypergraph.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace hyperrank {

/// Simple directed graph with dense 0-based ids. `original_ids` maps dense
/// ids back to the ids found in the source file.
struct DirectedGraph {
    VertexId n = 0;
    std::vector<std::pair<VertexId, VertexId>> arcs;  // deduplicated, no loops
    std::vector<std::int64_t> original_ids;
    std::uint64_t duplicate_arcs_dropped = 0;
    std::uint64_t self_loops_dropped = 0;
};

/// SNAP edge list: lines `from to` (tab or spaces), `#` comments. Duplicate
/// arcs and self-loops are dropped and counted.
DirectedGraph load_snap(const std::filesystem::path& path);
DirectedGraph load_snap(std::istream& in, const std::string& name = "<stream>");

using Triple = std::array<VertexId, 3>;

/// All unordered vertex triples carrying a directed 3-cycle in at least one
/// rotational orientation, as sorted triples in lexicographic order.
std::vector<Triple> enumerate_d3c(const DirectedGraph& g);

struct FilterResult {
    DirectedGraph graph;          // re-indexed, original_ids composed through
    std::vector<Triple> d3cs;     // D3Cs of the filtered graph
    bool fixpoint_differs = false;  // would a second filter pass change it?
};

/// The two-step motif filter: (i) drop vertices and arcs in no D3C,
/// (ii) keep the largest strongly connected component; then re-enumerate.
/// Runs the two steps once. Throws DataError when nothing survives.
FilterResult filter_network(const DirectedGraph& g);

/// 3-uniform hypergraph with one unit-weight edge per D3C triple; a triple
/// with both cycle orientations still yields a single edge.
UniformHypergraph d3c_hypergraph(const DirectedGraph& filtered, std::span<const Triple> d3cs);

/// Sidecar id map (`dense_id original_id` per line, 1-based dense ids).
void save_id_map(const DirectedGraph& g, const std::filesystem::path& path);
std::vector<std::int64_t> load_id_map(const std::filesystem::path& path);

}  // namespace hyperrank
