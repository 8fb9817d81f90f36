#include "hyperrank/hypergraph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hyperrank {

namespace {

std::uint64_t hash_tuple(std::span<const VertexId> v) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the words
    for (VertexId x : v) {
        h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

UniformHypergraph::UniformHypergraph(VertexId n, int k, bool directed)
    : n_(n), k_(k), directed_(directed) {
    if (n < 0) throw DataError("vertex count must be nonnegative");
    if (k < 2) throw DataError("uniformity order must be at least 2");
}

bool UniformHypergraph::is_duplicate(std::span<const VertexId> canonical) const {
    auto [lo, hi] = edge_index_.equal_range(hash_tuple(canonical));
    for (auto it = lo; it != hi; ++it) {
        const auto& other = edges_[it->second].vertices;
        if (std::equal(canonical.begin(), canonical.end(), other.begin(), other.end())) {
            return true;
        }
    }
    return false;
}

void UniformHypergraph::add_edge(std::span<const VertexId> vertices, Scalar weight) {
    if (static_cast<int>(vertices.size()) != k_) {
        throw DataError("edge has " + std::to_string(vertices.size()) + " vertices, expected " +
                        std::to_string(k_));
    }
    if (!(weight > 0.0)) throw DataError("edge weight must be strictly positive");

    std::vector<VertexId> canon(vertices.begin(), vertices.end());
    for (VertexId v : canon) {
        if (v < 0 || v >= n_) {
            throw DataError("vertex " + std::to_string(v + 1) + " out of range [1, " +
                            std::to_string(n_) + "]");
        }
    }
    // canonical form: undirected fully sorted; directed sorted tails + head
    if (directed_) {
        std::sort(canon.begin(), canon.end() - 1);
    } else {
        std::sort(canon.begin(), canon.end());
    }
    if (std::adjacent_find(canon.begin(), directed_ ? canon.end() - 1 : canon.end()) !=
        (directed_ ? canon.end() - 1 : canon.end())) {
        throw DataError("edge contains a repeated vertex");
    }
    if (directed_ &&
        std::binary_search(canon.begin(), canon.end() - 1, canon.back())) {
        throw DataError("arc head repeats a tail vertex");
    }
    if (is_duplicate(canon)) throw DataError("duplicate edge rejected");

    edge_index_.emplace(hash_tuple(canon), static_cast<std::uint32_t>(edges_.size()));
    edges_.push_back(Hyperedge{std::move(canon), weight});
}

UniformHypergraph UniformHypergraph::induced(std::span<const VertexId> vertices) const {
    std::vector<VertexId> remap(static_cast<std::size_t>(n_), -1);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const VertexId v = vertices[i];
        if (v < 0 || v >= n_) throw DataError("induced: vertex out of range");
        if (remap[static_cast<std::size_t>(v)] != -1) {
            throw DataError("induced: repeated vertex in subset");
        }
        remap[static_cast<std::size_t>(v)] = static_cast<VertexId>(i);
    }
    UniformHypergraph sub(static_cast<VertexId>(vertices.size()), k_, directed_);
    std::vector<VertexId> mapped(static_cast<std::size_t>(k_));
    for (const auto& e : edges_) {
        bool inside = true;
        for (int j = 0; j < k_; ++j) {
            const VertexId m = remap[static_cast<std::size_t>(e.vertices[static_cast<std::size_t>(j)])];
            if (m == -1) {
                inside = false;
                break;
            }
            mapped[static_cast<std::size_t>(j)] = m;
        }
        if (inside) sub.add_edge(mapped, e.weight);
    }
    return sub;
}

UniformHypergraph UniformHypergraph::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open hypergraph file: " + path.string());
    return load(in, path.string());
}

UniformHypergraph UniformHypergraph::load(std::istream& in, const std::string& name) {
    std::string line;
    int k = -1, directed = -1;
    VertexId n_header = -1;
    // header: first non-comment line, `k=<order> directed=<0|1> [n=<count>]`
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream hs(line);
        std::string tok;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) {
                throw DataError(name + ": malformed header token '" + tok + "'");
            }
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            try {
                if (key == "k") k = std::stoi(val);
                else if (key == "directed") directed = std::stoi(val);
                else if (key == "n") n_header = std::stoi(val);
                // unknown keys ignored
            } catch (const std::exception&) {
                throw DataError(name + ": bad header value '" + tok + "'");
            }
        }
        break;
    }
    if (k < 2 || directed < 0 || directed > 1) {
        throw DataError(name + ": header line `k=<order> directed=<0|1>` is required");
    }

    struct RawEdge {
        std::vector<VertexId> verts;
        Scalar weight;
    };
    std::vector<RawEdge> raw;
    VertexId max_id = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<Scalar> nums;
        Scalar x;
        while (ls >> x) nums.push_back(x);
        if (nums.empty()) continue;
        if (nums.size() != static_cast<std::size_t>(k) &&
            nums.size() != static_cast<std::size_t>(k) + 1) {
            throw DataError(name + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(k) + " vertices and an optional weight");
        }
        RawEdge e;
        e.weight = nums.size() == static_cast<std::size_t>(k) + 1 ? nums.back() : 1.0;
        for (int j = 0; j < k; ++j) {
            const Scalar vj = nums[static_cast<std::size_t>(j)];
            const auto v = static_cast<VertexId>(vj);
            if (static_cast<Scalar>(v) != vj || v < 1) {
                throw DataError(name + ":" + std::to_string(lineno) +
                                ": vertex ids must be positive integers (1-based)");
            }
            e.verts.push_back(v - 1);  // file ids are 1-based
            max_id = std::max(max_id, v);
        }
        raw.push_back(std::move(e));
    }

    const VertexId n = std::max(n_header, max_id);
    if (n <= 0) throw DataError(name + ": no vertices (empty edge list and no n= header)");
    UniformHypergraph h(n, k, directed == 1);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        try {
            h.add_edge(raw[i].verts, raw[i].weight);
        } catch (const DataError& err) {
            throw DataError(name + ": edge " + std::to_string(i + 1) + ": " + err.what());
        }
    }
    return h;
}

void UniformHypergraph::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write hypergraph file: " + path.string());
    save(out);
}

void UniformHypergraph::save(std::ostream& out) const {
    out << "k=" << k_ << " directed=" << (directed_ ? 1 : 0) << " n=" << n_ << "\n";
    out << std::setprecision(17);
    for (const auto& e : edges_) {
        for (int j = 0; j < k_; ++j) {
            if (j) out << ' ';
            out << e.vertices[static_cast<std::size_t>(j)] + 1;
        }
        if (e.weight != 1.0) out << ' ' << e.weight;
        out << "\n";
    }
}

}  // namespace hyperrank
