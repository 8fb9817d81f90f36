#pragma once

#include "hyperrank/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

namespace hyperrank {

struct Hyperedge {
    // Undirected: vertices sorted ascending. Directed: tails sorted ascending,
    // head stored last.
    std::vector<VertexId> vertices;
    Scalar weight = 1.0;
};

/// A weighted k-uniform hypergraph with 0-based vertices. Directed arcs carry
/// their head as the last vertex; the order among tails is irrelevant.
/// Immutable once populated (add_edge during construction only).
class UniformHypergraph {
public:
    UniformHypergraph(VertexId n, int k, bool directed = false);

    /// Adds an edge (undirected) or arc (directed, head last). Vertices must
    /// be distinct and in range, the weight positive, and the edge new;
    /// duplicates are rejected rather than merged.
    void add_edge(std::span<const VertexId> vertices, Scalar weight = 1.0);

    VertexId vertex_count() const { return n_; }
    int order() const { return k_; }
    bool directed() const { return directed_; }
    const std::vector<Hyperedge>& edges() const { return edges_; }

    /// Sub-hypergraph induced by `vertices` (edges entirely inside the set),
    /// re-indexed densely in the order given.
    UniformHypergraph induced(std::span<const VertexId> vertices) const;

    /// Hyperedge list file: a header `k=<order> directed=<0|1>` (an optional
    /// `n=<count>` token preserves isolated trailing vertices), then one edge
    /// per line `v1 v2 ... vk [weight]` with 1-based vertices; `#` comments.
    static UniformHypergraph load(const std::filesystem::path& path);
    static UniformHypergraph load(std::istream& in, const std::string& name = "<stream>");
    void save(const std::filesystem::path& path) const;
    void save(std::ostream& out) const;

private:
    bool is_duplicate(std::span<const VertexId> canonical) const;

    VertexId n_;
    int k_;
    bool directed_;
    std::vector<Hyperedge> edges_;
    // hash of canonical vertex tuple -> edge index; exact compare on collision
    std::unordered_multimap<std::uint64_t, std::uint32_t> edge_index_;
};

}  // namespace hyperrank
