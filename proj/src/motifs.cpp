#include "hyperrank/motifs.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace hyperrank {

namespace {

std::uint64_t pack_arc(VertexId u, VertexId v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
}

struct Adjacency {
    std::vector<std::vector<VertexId>> out, in;
    explicit Adjacency(const DirectedGraph& g)
        : out(static_cast<std::size_t>(g.n)), in(static_cast<std::size_t>(g.n)) {
        for (const auto& [u, v] : g.arcs) {
            out[static_cast<std::size_t>(u)].push_back(v);
            in[static_cast<std::size_t>(v)].push_back(u);
        }
        for (auto& a : out) std::sort(a.begin(), a.end());
        for (auto& a : in) std::sort(a.begin(), a.end());
    }
};

// intersect two sorted lists, keeping values strictly greater than `floor`
template <typename F>
void intersect_above(const std::vector<VertexId>& a, const std::vector<VertexId>& b,
                     VertexId floor, F&& emit) {
    auto ia = std::upper_bound(a.begin(), a.end(), floor);
    auto ib = std::upper_bound(b.begin(), b.end(), floor);
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            emit(*ia);
            ++ia;
            ++ib;
        }
    }
}

}  // namespace

DirectedGraph load_snap(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open edge list: " + path.string());
    return load_snap(in, path.string());
}

DirectedGraph load_snap(std::istream& in, const std::string& name) {
    DirectedGraph g;
    std::unordered_map<std::int64_t, VertexId> dense;
    std::unordered_set<std::uint64_t> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::int64_t a, b;
        if (!(ls >> a >> b)) {
            throw DataError(name + ":" + std::to_string(lineno) + ": expected `from to`");
        }
        const auto id_of = [&](std::int64_t raw) {
            auto [it, inserted] = dense.emplace(raw, static_cast<VertexId>(g.original_ids.size()));
            if (inserted) g.original_ids.push_back(raw);
            return it->second;
        };
        const VertexId u = id_of(a);
        const VertexId v = id_of(b);
        if (u == v) {
            ++g.self_loops_dropped;
            continue;
        }
        if (!seen.insert(pack_arc(u, v)).second) {
            ++g.duplicate_arcs_dropped;
            continue;
        }
        g.arcs.emplace_back(u, v);
    }
    g.n = static_cast<VertexId>(g.original_ids.size());
    std::sort(g.arcs.begin(), g.arcs.end());
    return g;
}

std::vector<Triple> enumerate_d3c(const DirectedGraph& g) {
    const Adjacency adj(g);
    std::vector<Triple> out;
    // for each arc (i,j): any w in out(j) and in(i) closes i -> j -> w -> i.
    // restricting to i < j and w > i visits each cyclic orientation exactly
    // once, at its minimum vertex.
    for (const auto& [i, j] : g.arcs) {
        if (i > j) continue;
        intersect_above(adj.out[static_cast<std::size_t>(j)], adj.in[static_cast<std::size_t>(i)],
                        i, [&](VertexId w) {
                            Triple t{i, j, w};
                            std::sort(t.begin(), t.end());
                            out.push_back(t);
                        });
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

// iterative Tarjan; returns component id per vertex
std::vector<VertexId> strongly_connected_components(VertexId n, const Adjacency& adj,
                                                    VertexId* component_count) {
    constexpr VertexId kUnvisited = -1;
    std::vector<VertexId> index(static_cast<std::size_t>(n), kUnvisited);
    std::vector<VertexId> lowlink(static_cast<std::size_t>(n), 0);
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    std::vector<VertexId> comp(static_cast<std::size_t>(n), kUnvisited);
    std::vector<VertexId> stack;
    VertexId next_index = 0, ncomp = 0;

    struct Frame {
        VertexId v;
        std::size_t child;
    };
    std::vector<Frame> call;

    for (VertexId root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] != kUnvisited) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& fr = call.back();
            const auto v = static_cast<std::size_t>(fr.v);
            if (fr.child == 0) {
                index[v] = lowlink[v] = next_index++;
                stack.push_back(fr.v);
                on_stack[v] = 1;
            }
            const auto& succ = adj.out[v];
            bool descended = false;
            while (fr.child < succ.size()) {
                const VertexId w = succ[fr.child++];
                if (index[static_cast<std::size_t>(w)] == kUnvisited) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[static_cast<std::size_t>(w)]) {
                    lowlink[v] = std::min(lowlink[v], index[static_cast<std::size_t>(w)]);
                }
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                VertexId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = 0;
                    comp[static_cast<std::size_t>(w)] = ncomp;
                } while (w != fr.v);
                ++ncomp;
            }
            call.pop_back();
            if (!call.empty()) {
                const auto p = static_cast<std::size_t>(call.back().v);
                lowlink[p] = std::min(lowlink[p], lowlink[v]);
            }
        }
    }
    if (component_count) *component_count = ncomp;
    return comp;
}

}  // namespace

FilterResult filter_network(const DirectedGraph& g) {
    // (i) keep exactly the vertices and arcs participating in some D3C
    const std::vector<Triple> d3cs = enumerate_d3c(g);
    if (d3cs.empty()) throw DataError("network has no directed 3-cycles");

    std::unordered_set<std::uint64_t> arc_set;
    arc_set.reserve(g.arcs.size() * 2);
    for (const auto& [u, v] : g.arcs) arc_set.insert(pack_arc(u, v));
    const auto has_arc = [&](VertexId u, VertexId v) {
        return arc_set.count(pack_arc(u, v)) != 0;
    };

    std::unordered_set<std::uint64_t> keep_arcs;
    std::vector<char> keep_vertex(static_cast<std::size_t>(g.n), 0);
    for (const auto& [a, b, c] : d3cs) {
        const auto mark = [&](VertexId x, VertexId y, VertexId z) {
            keep_arcs.insert(pack_arc(x, y));
            keep_arcs.insert(pack_arc(y, z));
            keep_arcs.insert(pack_arc(z, x));
        };
        if (has_arc(a, b) && has_arc(b, c) && has_arc(c, a)) mark(a, b, c);
        if (has_arc(a, c) && has_arc(c, b) && has_arc(b, a)) mark(a, c, b);
        keep_vertex[static_cast<std::size_t>(a)] = 1;
        keep_vertex[static_cast<std::size_t>(b)] = 1;
        keep_vertex[static_cast<std::size_t>(c)] = 1;
    }

    // intermediate graph after (i), still in the original dense ids
    DirectedGraph mid;
    mid.n = g.n;
    mid.arcs.reserve(keep_arcs.size());
    for (const auto& [u, v] : g.arcs) {
        if (keep_arcs.count(pack_arc(u, v))) mid.arcs.emplace_back(u, v);
    }

    // (ii) largest strongly connected component of the remaining network;
    // ties resolved toward the component containing the smallest vertex
    const Adjacency mid_adj(mid);
    VertexId ncomp = 0;
    const std::vector<VertexId> comp =
        strongly_connected_components(g.n, mid_adj, &ncomp);
    std::vector<std::uint64_t> comp_size(static_cast<std::size_t>(ncomp), 0);
    for (VertexId v = 0; v < g.n; ++v) {
        if (keep_vertex[static_cast<std::size_t>(v)]) {
            ++comp_size[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])];
        }
    }
    VertexId best_comp = -1;
    std::uint64_t best_size = 0;
    for (VertexId v = 0; v < g.n; ++v) {
        if (!keep_vertex[static_cast<std::size_t>(v)]) continue;
        const VertexId c = comp[static_cast<std::size_t>(v)];
        const std::uint64_t s = comp_size[static_cast<std::size_t>(c)];
        if (s > best_size) {
            best_size = s;
            best_comp = c;  // first vertex hit in the largest component is smallest
        }
    }
    if (best_comp < 0) throw DataError("filter left no vertices");

    FilterResult result;
    std::vector<VertexId> remap(static_cast<std::size_t>(g.n), -1);
    for (VertexId v = 0; v < g.n; ++v) {
        if (keep_vertex[static_cast<std::size_t>(v)] &&
            comp[static_cast<std::size_t>(v)] == best_comp) {
            remap[static_cast<std::size_t>(v)] = result.graph.n++;
            result.graph.original_ids.push_back(
                g.original_ids.empty() ? v : g.original_ids[static_cast<std::size_t>(v)]);
        }
    }
    for (const auto& [u, v] : mid.arcs) {
        const VertexId nu = remap[static_cast<std::size_t>(u)];
        const VertexId nv = remap[static_cast<std::size_t>(v)];
        if (nu != -1 && nv != -1) result.graph.arcs.emplace_back(nu, nv);
    }
    std::sort(result.graph.arcs.begin(), result.graph.arcs.end());

    result.d3cs = enumerate_d3c(result.graph);

    // a second pass changes nothing iff every arc still participates and the
    // graph is one strongly connected component
    std::unordered_set<std::uint64_t> final_arcs;
    for (const auto& [a, b, c] : result.d3cs) {
        const auto has2 = [&](VertexId x, VertexId y) {
            return std::binary_search(result.graph.arcs.begin(), result.graph.arcs.end(),
                                      std::make_pair(x, y));
        };
        if (has2(a, b) && has2(b, c) && has2(c, a)) {
            final_arcs.insert(pack_arc(a, b));
            final_arcs.insert(pack_arc(b, c));
            final_arcs.insert(pack_arc(c, a));
        }
        if (has2(a, c) && has2(c, b) && has2(b, a)) {
            final_arcs.insert(pack_arc(a, c));
            final_arcs.insert(pack_arc(c, b));
            final_arcs.insert(pack_arc(b, a));
        }
    }
    const Adjacency fin_adj(result.graph);
    VertexId fin_ncomp = 0;
    strongly_connected_components(result.graph.n, fin_adj, &fin_ncomp);
    result.fixpoint_differs =
        final_arcs.size() != result.graph.arcs.size() || fin_ncomp != 1;
    return result;
}

UniformHypergraph d3c_hypergraph(const DirectedGraph& filtered, std::span<const Triple> d3cs) {
    UniformHypergraph h(filtered.n, 3, false);
    for (const auto& t : d3cs) {
        h.add_edge(std::span<const VertexId>(t.data(), 3), 1.0);
    }
    return h;
}

void save_id_map(const DirectedGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write id map: " + path.string());
    for (VertexId v = 0; v < g.n; ++v) {
        const std::int64_t orig =
            g.original_ids.empty() ? v : g.original_ids[static_cast<std::size_t>(v)];
        out << (v + 1) << ' ' << orig << "\n";
    }
}

std::vector<std::int64_t> load_id_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open id map: " + path.string());
    std::vector<std::int64_t> ids;
    std::int64_t dense, orig;
    while (in >> dense >> orig) {
        if (dense != static_cast<std::int64_t>(ids.size()) + 1) {
            throw DataError("id map is not densely numbered");
        }
        ids.push_back(orig);
    }
    return ids;
}

}  // namespace hyperrank
