#include "hyperrank/tensor_ops.hpp"

#include <algorithm>
#include <map>

namespace hyperrank {

namespace {
thread_local std::uint64_t g_tensor_ops = 0;
}

std::uint64_t tensor_op_count() { return g_tensor_ops; }
void reset_tensor_op_count() { g_tensor_ops = 0; }
namespace detail {
void add_tensor_ops(std::uint64_t n) { g_tensor_ops += n; }
}

Vector apply(const SparseKTensor& p, Eigen::Ref<const Vector> x) {
    if (x.size() != p.dim()) throw DataError("apply: dimension mismatch");
    const int k = p.order();
    const std::size_t m = p.entry_count();
    const auto n = static_cast<std::size_t>(p.dim());

    // compensated scatter: one accumulator pair per output component
    std::vector<Scalar> sum(n, 0.0), comp(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto tail = p.tail(i);
        Scalar prod = p.value_at(i) * static_cast<Scalar>(p.tail_multiplicity(i));
        for (VertexId t : tail) prod *= x[t];
        const auto h = static_cast<std::size_t>(p.head(i));
        const Scalar t0 = sum[h] + prod;
        if (std::abs(sum[h]) >= std::abs(prod)) {
            comp[h] += (sum[h] - t0) + prod;
        } else {
            comp[h] += (prod - t0) + sum[h];
        }
        sum[h] = t0;
    }
    g_tensor_ops += m * static_cast<std::uint64_t>(k - 1);

    Vector y(p.dim());
    for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = sum[i] + comp[i];
    return y;
}

SpMatrix contract_to_matrix(const SparseKTensor& p, Eigen::Ref<const Vector> x) {
    if (p.order() < 3) throw DataError("contract_to_matrix: order must be at least 3");
    if (x.size() != p.dim()) throw DataError("contract_to_matrix: dimension mismatch");
    const std::size_t m = p.entry_count();

    // M[head, t] += value * (#arrangements of tail minus one copy of t) * prod(x over the rest)
    std::vector<Eigen::Triplet<Scalar>> trips;
    trips.reserve(m * static_cast<std::size_t>(p.order() - 1));
    std::vector<VertexId> rest(static_cast<std::size_t>(p.order() - 2));
    for (std::size_t i = 0; i < m; ++i) {
        const auto tail = p.tail(i);
        const Scalar v = p.value_at(i);
        for (std::size_t r = 0; r < tail.size(); ++r) {
            if (r > 0 && tail[r] == tail[r - 1]) continue;  // each distinct value once
            std::size_t w = 0;
            for (std::size_t q = 0; q < tail.size(); ++q) {
                if (q != r) rest[w++] = tail[q];
            }
            // multiplicity of the remaining multiset (rest is still sorted)
            std::uint64_t mult = 1;
            for (std::size_t j = 2; j <= rest.size(); ++j) mult *= j;
            std::uint64_t run = 1;
            for (std::size_t j = 1; j < rest.size(); ++j) {
                if (rest[j] == rest[j - 1]) {
                    mult /= ++run;
                } else {
                    run = 1;
                }
            }
            Scalar prod = v * static_cast<Scalar>(mult);
            for (VertexId t : rest) prod *= x[t];
            trips.emplace_back(p.head(i), tail[r], prod);
        }
    }
    g_tensor_ops += m * static_cast<std::uint64_t>(p.order() - 1);

    SpMatrix out(p.dim(), p.dim());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

UnfoldedMatrix unfold(const SparseKTensor& p) {
    UnfoldedMatrix out;
    out.rows = p.dim();
    out.cols = p.fiber_count();  // throws on 63-bit overflow
    const auto n = static_cast<std::uint64_t>(p.dim());

    std::vector<VertexId> perm;
    for (std::size_t i = 0; i < p.entry_count(); ++i) {
        const auto tail = p.tail(i);
        perm.assign(tail.begin(), tail.end());
        // next_permutation over the sorted tail lists each distinct order once
        do {
            std::uint64_t col = 0, stride = 1;
            for (VertexId t : perm) {
                col += static_cast<std::uint64_t>(t) * stride;
                stride *= n;
            }
            out.entries.push_back({p.head(i), col, p.value_at(i)});
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const UnfoldedMatrix::Entry& a, const UnfoldedMatrix::Entry& b) {
                  if (a.col != b.col) return a.col < b.col;
                  return a.row < b.row;
              });
    return out;
}

SparseKTensor refold(const UnfoldedMatrix& m, int k) {
    SparseKTensor p(m.rows, k);
    const auto n = static_cast<std::uint64_t>(m.rows);
    std::vector<VertexId> tail(static_cast<std::size_t>(k - 1));
    std::map<std::pair<std::uint64_t, VertexId>, bool> seen;  // canonical dedup
    for (const auto& e : m.entries) {
        std::uint64_t rest = e.col;
        for (auto& t : tail) {
            t = static_cast<VertexId>(rest % n);
            rest /= n;
        }
        std::vector<VertexId> sorted(tail);
        std::sort(sorted.begin(), sorted.end());
        std::uint64_t key = 0, stride = 1;
        for (VertexId t : sorted) {
            key += static_cast<std::uint64_t>(t) * stride;
            stride *= n;
        }
        if (!seen.emplace(std::make_pair(key, e.row), true).second) continue;
        p.add(e.row, sorted, e.value);
    }
    p.finalize();
    return p;
}

}  // namespace hyperrank
