#pragma once

#include "hyperrank/common.hpp"
#include "hyperrank/sparse_tensor.hpp"

#include <cstdint>
#include <vector>

namespace hyperrank {

/// P x^(k-1): contracts modes 2..k with x. Iterates canonical entries and
/// weights each by its tail-permutation multiplicity instead of expanding
/// the (k-1)! copies. Compensated accumulation throughout.
Vector apply(const SparseKTensor& p, Eigen::Ref<const Vector> x);

/// P x^(k-2): contracts modes 3..k with x, leaving an n-by-n sparse matrix.
/// For k=3 this is exactly the mode-3 product P x_3 x. Throws DataError for
/// k=2 (no modes left to expose).
SpMatrix contract_to_matrix(const SparseKTensor& p, Eigen::Ref<const Vector> x);

/// Coordinate-form 1-mode unfolding, n rows by n^(k-1) columns. Every
/// permutation of each canonical tail becomes its own column entry. Columns
/// use FiberIndex linearization (0-based here).
struct UnfoldedMatrix {
    VertexId rows = 0;
    std::uint64_t cols = 0;
    struct Entry {
        VertexId row;
        std::uint64_t col;
        Scalar value;
    };
    std::vector<Entry> entries;  // sorted by (col, row)
};
UnfoldedMatrix unfold(const SparseKTensor& p);

/// Rebuilds the tensor from an unfolding (inverse of unfold on tensors that
/// are semi-symmetric, which all tensors here are).
SparseKTensor refold(const UnfoldedMatrix& m, int k);

// Work accounting: every contraction-style kernel adds one unit per
// (canonical entry, contracted mode) visited, and the explicit dangling
// correction adds (k-1) per dangling fiber walked. Thread-local.
std::uint64_t tensor_op_count();
void reset_tensor_op_count();
namespace detail {
void add_tensor_ops(std::uint64_t n);
}

}  // namespace hyperrank
