#pragma once

#include "hyperrank/common.hpp"
#include "hyperrank/hypergraph.hpp"

#include <span>
#include <unordered_map>
#include <vector>

namespace hyperrank {

/// A mode-1 fiber index: the ordered tail tuple (i2,...,ik) identifying one
/// column of the unfolding. The 1-based linearization follows
/// l = i2 + (i3-1)n + ... + (ik-1)n^(k-2); linear0() is its 0-based twin.
class FiberIndex {
public:
    FiberIndex(std::vector<VertexId> tail, VertexId n);
    static FiberIndex from_linear0(std::uint64_t linear0, VertexId n, int k);

    const std::vector<VertexId>& tail() const { return tail_; }
    std::uint64_t linear0() const { return linear0_; }
    std::uint64_t linear1() const { return linear0_ + 1; }
    VertexId dim() const { return n_; }

    friend bool operator==(const FiberIndex& a, const FiberIndex& b) {
        return a.n_ == b.n_ && a.linear0_ == b.linear0_;
    }

private:
    std::vector<VertexId> tail_;
    VertexId n_;
    std::uint64_t linear0_;
};

/// Order-k coordinate tensor storing one canonical entry per (head, sorted
/// tail multiset). Semi-symmetry is structural: value lookups sort the tail,
/// so every permutation of a stored tail reads the same value. Entries are
/// kept sorted by (canonical tail linearization, head) so that canonical
/// fibers are contiguous.
class SparseKTensor {
public:
    SparseKTensor(VertexId n, int k);

    VertexId dim() const { return n_; }
    int order() const { return k_; }
    std::size_t entry_count() const { return values_.size(); }
    std::uint64_t fiber_count() const;  // n^(k-1), overflow-checked

    /// Accumulates into the canonical entry for (head, tail); tail order is
    /// irrelevant. Entries that cancel to zero are dropped on finalize().
    void add(VertexId head, std::span<const VertexId> tail, Scalar value);
    /// Sorts, merges duplicate coordinates, drops exact zeros. Must be called
    /// after the last add() and before any read access.
    void finalize();

    Scalar value(VertexId head, std::span<const VertexId> tail) const;

    // Read access to canonical entries (valid after finalize()).
    VertexId head(std::size_t i) const { return heads_[i]; }
    std::span<const VertexId> tail(std::size_t i) const {
        return {tails_.data() + i * static_cast<std::size_t>(k_ - 1),
                static_cast<std::size_t>(k_ - 1)};
    }
    Scalar value_at(std::size_t i) const { return values_[i]; }
    void set_value_at(std::size_t i, Scalar v) { values_[i] = v; }

    /// Number of distinct permutations of the tail of entry i (the
    /// multinomial (k-1)!/prod(c_j!) over repeated tail values).
    std::uint64_t tail_multiplicity(std::size_t i) const;

    /// Half-open entry ranges grouped by canonical (sorted) tail.
    struct FiberRange {
        std::uint64_t canonical_linear0;  // linearization of the sorted tail
        std::size_t begin, end;
    };
    const std::vector<FiberRange>& canonical_fibers() const;

    bool finalized() const { return finalized_; }

private:
    VertexId n_;
    int k_;
    bool finalized_ = false;
    std::vector<VertexId> heads_;
    std::vector<VertexId> tails_;  // flattened, k-1 per entry, sorted ascending
    std::vector<Scalar> values_;
    std::vector<FiberRange> fibers_;
};

/// Adjacency tensor of a k-uniform hypergraph: each edge contributes
/// w/(k-1)! at (head, every permutation of the remaining vertices); an
/// undirected edge plays the head role with each of its k vertices.
SparseKTensor adjacency_tensor(const UniformHypergraph& h);

/// Dangling-fiber report from fiber normalization. Dangling columns are
/// never enumerated eagerly (there are n^(k-1) - |nonzero| of them); the
/// set is held as the canonical non-dangling complement.
class DanglingInfo {
public:
    DanglingInfo(VertexId n, int k, std::vector<std::uint64_t> non_dangling_canonical);

    std::uint64_t total_fibers() const { return total_; }
    std::uint64_t dangling_count() const { return total_ - non_dangling_count_; }
    std::uint64_t non_dangling_count() const { return non_dangling_count_; }

    /// Membership test for an arbitrary (ordered) tail tuple.
    bool is_dangling(std::span<const VertexId> tail) const;

    /// All dangling fibers as ordered tail tuples. Guarded: throws DataError
    /// when total_fibers() exceeds `limit` instead of allocating the world.
    std::vector<FiberIndex> enumerate_dangling(std::uint64_t limit = 1u << 24) const;

    /// Canonical (sorted-tail) non-dangling linearizations, ascending.
    const std::vector<std::uint64_t>& non_dangling_canonical() const { return keys_; }

    VertexId dim() const { return n_; }
    int order() const { return k_; }

private:
    VertexId n_;
    int k_;
    std::uint64_t total_;
    std::uint64_t non_dangling_count_;
    std::vector<std::uint64_t> keys_;  // sorted canonical linearizations
};

/// Normalizes every nonzero fiber of a nonnegative tensor to sum 1 (the
/// Moore-Penrose action of D^+ on the unfolding); zero fibers stay zero and
/// are reported. Throws DataError on negative entries.
std::pair<SparseKTensor, DanglingInfo> normalize_substochastic(const SparseKTensor& a);

enum class CorrectionMode { Explicit, Implicit };

/// The dangling-corrected columnwise-stochastic operator
///   P x^(k-1) = Pbar x^(k-1) + v ((e^T x)^(k-1) - e^T Pbar x^(k-1)).
/// Explicit mode walks the dangling fiber set itself each apply (the MPR-1
/// route); implicit mode uses the complement identity above (MPR-2).
class CorrectedOperator {
public:
    CorrectedOperator(const SparseKTensor& pbar, Vector v, CorrectionMode mode,
                      DanglingInfo dangling);

    /// P x^(k-1) for the corrected columnwise-stochastic tensor.
    Vector apply(Eigen::Ref<const Vector> x) const;

    const SparseKTensor& pbar() const { return *pbar_; }
    const Vector& v() const { return v_; }
    CorrectionMode mode() const { return mode_; }
    const DanglingInfo& dangling() const { return dangling_; }

private:
    const SparseKTensor* pbar_;
    Vector v_;
    CorrectionMode mode_;
    DanglingInfo dangling_;
};

/// Builds the corrected operator for a columnwise-substochastic tensor and a
/// stochastic v. Throws DataError if v is not a distribution.
CorrectedOperator dangling_correction(const SparseKTensor& pbar, const Vector& v,
                                      CorrectionMode mode);

}  // namespace hyperrank
