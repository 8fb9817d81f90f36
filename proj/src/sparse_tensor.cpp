#include "hyperrank/sparse_tensor.hpp"

#include "hyperrank/tensor_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hyperrank {

namespace {

std::uint64_t linearize(std::span<const VertexId> tail, VertexId n) {
    // 0-based twin of l = i2 + (i3-1) n + ... + (ik-1) n^(k-2)
    std::uint64_t l = 0;
    std::uint64_t stride = 1;
    for (VertexId t : tail) {
        l += static_cast<std::uint64_t>(t) * stride;
        stride *= static_cast<std::uint64_t>(n);
    }
    return l;
}

}  // namespace

FiberIndex::FiberIndex(std::vector<VertexId> tail, VertexId n) : tail_(std::move(tail)), n_(n) {
    if (tail_.empty()) throw DataError("fiber tail must not be empty");
    for (VertexId t : tail_) {
        if (t < 0 || t >= n) throw DataError("fiber tail index out of range");
    }
    checked_fiber_count(n, static_cast<int>(tail_.size()) + 1);
    linear0_ = linearize(tail_, n);
}

FiberIndex FiberIndex::from_linear0(std::uint64_t linear0, VertexId n, int k) {
    if (linear0 >= checked_fiber_count(n, k)) throw DataError("fiber linear index out of range");
    std::vector<VertexId> tail(static_cast<std::size_t>(k - 1));
    std::uint64_t rest = linear0;
    for (auto& t : tail) {
        t = static_cast<VertexId>(rest % static_cast<std::uint64_t>(n));
        rest /= static_cast<std::uint64_t>(n);
    }
    return FiberIndex(std::move(tail), n);
}

SparseKTensor::SparseKTensor(VertexId n, int k) : n_(n), k_(k) {
    checked_fiber_count(n, k);
}

std::uint64_t SparseKTensor::fiber_count() const { return checked_fiber_count(n_, k_); }

void SparseKTensor::add(VertexId head, std::span<const VertexId> tail, Scalar value) {
    if (static_cast<int>(tail.size()) != k_ - 1) throw DataError("tail arity mismatch");
    if (head < 0 || head >= n_) throw DataError("head index out of range");
    for (VertexId t : tail) {
        if (t < 0 || t >= n_) throw DataError("tail index out of range");
    }
    finalized_ = false;
    heads_.push_back(head);
    const std::size_t base = tails_.size();
    tails_.insert(tails_.end(), tail.begin(), tail.end());
    std::sort(tails_.begin() + static_cast<std::ptrdiff_t>(base), tails_.end());
    values_.push_back(value);
}

void SparseKTensor::finalize() {
    const std::size_t m = values_.size();
    const auto arity = static_cast<std::size_t>(k_ - 1);
    std::vector<std::uint64_t> key(m);
    for (std::size_t i = 0; i < m; ++i) {
        key[i] = linearize({tails_.data() + i * arity, arity}, n_);
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return key[a] < key[b];
        return heads_[a] < heads_[b];
    });

    std::vector<VertexId> heads;
    std::vector<VertexId> tails;
    std::vector<Scalar> values;
    heads.reserve(m);
    tails.reserve(m * arity);
    values.reserve(m);
    std::vector<std::uint64_t> keys_out;
    keys_out.reserve(m);

    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        KahanSum acc;
        while (j < m && key[order[j]] == key[order[i]] && heads_[order[j]] == heads_[order[i]]) {
            acc.add(values_[order[j]]);
            ++j;
        }
        const Scalar v = acc.value();
        if (v != 0.0) {
            const std::size_t src = order[i];
            heads.push_back(heads_[src]);
            tails.insert(tails.end(), tails_.begin() + static_cast<std::ptrdiff_t>(src * arity),
                         tails_.begin() + static_cast<std::ptrdiff_t>((src + 1) * arity));
            values.push_back(v);
            keys_out.push_back(key[src]);
        }
        i = j;
    }
    heads_ = std::move(heads);
    tails_ = std::move(tails);
    values_ = std::move(values);

    fibers_.clear();
    std::size_t b = 0;
    while (b < values_.size()) {
        std::size_t e = b;
        while (e < values_.size() && keys_out[e] == keys_out[b]) ++e;
        fibers_.push_back(FiberRange{keys_out[b], b, e});
        b = e;
    }
    finalized_ = true;
}

Scalar SparseKTensor::value(VertexId head, std::span<const VertexId> tail) const {
    if (!finalized_) throw Error("tensor not finalized");
    if (static_cast<int>(tail.size()) != k_ - 1) throw DataError("tail arity mismatch");
    std::vector<VertexId> sorted(tail.begin(), tail.end());
    std::sort(sorted.begin(), sorted.end());
    const std::uint64_t key = linearize(sorted, n_);
    auto it = std::lower_bound(fibers_.begin(), fibers_.end(), key,
                               [](const FiberRange& f, std::uint64_t k) {
                                   return f.canonical_linear0 < k;
                               });
    if (it == fibers_.end() || it->canonical_linear0 != key) return 0.0;
    for (std::size_t i = it->begin; i < it->end; ++i) {
        if (heads_[i] == head) return values_[i];
    }
    return 0.0;
}

std::uint64_t SparseKTensor::tail_multiplicity(std::size_t i) const {
    const auto t = tail(i);
    // (k-1)! / prod(run!) over runs of equal tail values
    std::uint64_t num = 1;
    for (std::size_t j = 2; j <= t.size(); ++j) num *= j;
    std::uint64_t run = 1;
    for (std::size_t j = 1; j < t.size(); ++j) {
        if (t[j] == t[j - 1]) {
            num /= ++run;  // incremental division builds the run factorial
        } else {
            run = 1;
        }
    }
    return num;
}

const std::vector<SparseKTensor::FiberRange>& SparseKTensor::canonical_fibers() const {
    if (!finalized_) throw Error("tensor not finalized");
    return fibers_;
}

SparseKTensor adjacency_tensor(const UniformHypergraph& h) {
    SparseKTensor a(h.vertex_count(), h.order());
    const int k = h.order();
    Scalar fact = 1.0;  // (k-1)!
    for (int j = 2; j <= k - 1; ++j) fact *= j;
    std::vector<VertexId> tail(static_cast<std::size_t>(k - 1));
    for (const auto& e : h.edges()) {
        const Scalar value = e.weight / fact;
        if (h.directed()) {
            // arc (tails..., head): head is first tensor index
            std::copy(e.vertices.begin(), e.vertices.end() - 1, tail.begin());
            a.add(e.vertices.back(), tail, value);
        } else {
            // every vertex plays the head once; tail = the k-1 others
            for (int r = 0; r < k; ++r) {
                std::size_t w = 0;
                for (int q = 0; q < k; ++q) {
                    if (q != r) tail[w++] = e.vertices[static_cast<std::size_t>(q)];
                }
                a.add(e.vertices[static_cast<std::size_t>(r)], tail, value);
            }
        }
    }
    a.finalize();
    return a;
}

DanglingInfo::DanglingInfo(VertexId n, int k, std::vector<std::uint64_t> non_dangling_canonical)
    : n_(n), k_(k), total_(checked_fiber_count(n, k)), keys_(std::move(non_dangling_canonical)) {
    std::sort(keys_.begin(), keys_.end());
    // ordered count = sum of permutation multiplicities of each canonical tail
    std::uint64_t count = 0;
    std::vector<VertexId> tail(static_cast<std::size_t>(k - 1));
    for (std::uint64_t key : keys_) {
        std::uint64_t rest = key;
        for (auto& t : tail) {
            t = static_cast<VertexId>(rest % static_cast<std::uint64_t>(n_));
            rest /= static_cast<std::uint64_t>(n_);
        }
        std::uint64_t mult = 1;
        for (std::size_t j = 2; j <= tail.size(); ++j) mult *= j;
        std::size_t run = 1;
        for (std::size_t j = 1; j < tail.size(); ++j) {
            if (tail[j] == tail[j - 1]) {
                ++run;
                mult /= run;
            } else {
                run = 1;
            }
        }
        count += mult;
    }
    non_dangling_count_ = count;
}

bool DanglingInfo::is_dangling(std::span<const VertexId> tail) const {
    if (static_cast<int>(tail.size()) != k_ - 1) throw DataError("tail arity mismatch");
    std::vector<VertexId> sorted(tail.begin(), tail.end());
    std::sort(sorted.begin(), sorted.end());
    const std::uint64_t key = linearize(sorted, n_);
    return !std::binary_search(keys_.begin(), keys_.end(), key);
}

std::vector<FiberIndex> DanglingInfo::enumerate_dangling(std::uint64_t limit) const {
    if (total_ > limit) {
        throw DataError("refusing to enumerate " + std::to_string(dangling_count()) +
                        " dangling fibers (raise the limit to force it)");
    }
    std::vector<FiberIndex> out;
    out.reserve(static_cast<std::size_t>(dangling_count()));
    std::vector<VertexId> tail(static_cast<std::size_t>(k_ - 1), 0);
    std::vector<VertexId> sorted(tail.size());
    for (std::uint64_t l = 0; l < total_; ++l) {
        sorted.assign(tail.begin(), tail.end());
        std::sort(sorted.begin(), sorted.end());
        if (!std::binary_search(keys_.begin(), keys_.end(), linearize(sorted, n_))) {
            out.emplace_back(std::vector<VertexId>(tail), n_);
        }
        // odometer increment
        for (std::size_t d = 0; d < tail.size(); ++d) {
            if (++tail[d] < n_) break;
            tail[d] = 0;
        }
    }
    return out;
}

std::pair<SparseKTensor, DanglingInfo> normalize_substochastic(const SparseKTensor& a) {
    if (!a.finalized()) throw Error("tensor not finalized");
    SparseKTensor p(a.dim(), a.order());
    std::vector<std::uint64_t> non_dangling;
    non_dangling.reserve(a.canonical_fibers().size());
    for (const auto& f : a.canonical_fibers()) {
        KahanSum sum;
        for (std::size_t i = f.begin; i < f.end; ++i) {
            const Scalar v = a.value_at(i);
            if (v < 0.0) throw DataError("normalize: tensor has a negative entry");
            sum.add(v);
        }
        const Scalar s = sum.value();
        if (s > 0.0) {
            non_dangling.push_back(f.canonical_linear0);
            for (std::size_t i = f.begin; i < f.end; ++i) {
                p.add(a.head(i), a.tail(i), a.value_at(i) / s);
            }
        }
        // zero fibers (if a stored entry summed to exactly zero) stay zero
    }
    p.finalize();
    return {std::move(p), DanglingInfo(a.dim(), a.order(), std::move(non_dangling))};
}

CorrectedOperator::CorrectedOperator(const SparseKTensor& pbar, Vector v, CorrectionMode mode,
                                     DanglingInfo dangling)
    : pbar_(&pbar), v_(std::move(v)), mode_(mode), dangling_(std::move(dangling)) {}

Vector CorrectedOperator::apply(Eigen::Ref<const Vector> x) const {
    Vector y = hyperrank::apply(*pbar_, x);
    Scalar mass;  // e^T (C x^(k-1)) over the dangling indicator C
    if (mode_ == CorrectionMode::Implicit) {
        KahanSum ex;
        for (Eigen::Index i = 0; i < x.size(); ++i) ex.add(x[i]);
        KahanSum ey;
        for (Eigen::Index i = 0; i < y.size(); ++i) ey.add(y[i]);
        mass = std::pow(ex.value(), pbar_->order() - 1) - ey.value();
        detail::add_tensor_ops(static_cast<std::uint64_t>(x.size()));
    } else {
        // walk the dangling fibers themselves (the materialized route)
        const VertexId n = pbar_->dim();
        const int k = pbar_->order();
        const std::uint64_t total = dangling_.total_fibers();
        if (total > (std::uint64_t{1} << 31)) {
            throw DataError("explicit dangling correction is infeasible at this size; use implicit");
        }
        const auto& keys = dangling_.non_dangling_canonical();
        std::vector<VertexId> tail(static_cast<std::size_t>(k - 1), 0);
        std::vector<VertexId> sorted(tail.size());
        KahanSum acc;
        std::uint64_t visited = 0;
        for (std::uint64_t l = 0; l < total; ++l) {
            sorted.assign(tail.begin(), tail.end());
            std::sort(sorted.begin(), sorted.end());
            std::uint64_t key = 0, stride = 1;
            for (VertexId t : sorted) {
                key += static_cast<std::uint64_t>(t) * stride;
                stride *= static_cast<std::uint64_t>(n);
            }
            if (!std::binary_search(keys.begin(), keys.end(), key)) {
                Scalar prod = 1.0;
                for (VertexId t : tail) prod *= x[t];
                acc.add(prod);
                ++visited;
            }
            for (std::size_t d = 0; d < tail.size(); ++d) {
                if (++tail[d] < n) break;
                tail[d] = 0;
            }
        }
        mass = acc.value();
        detail::add_tensor_ops(visited * static_cast<std::uint64_t>(k - 1));
    }
    y += v_ * mass;
    return y;
}

CorrectedOperator dangling_correction(const SparseKTensor& pbar, const Vector& v,
                                      CorrectionMode mode) {
    if (v.size() != pbar.dim()) throw DataError("v has wrong dimension");
    if (v.minCoeff() < 0.0 || std::abs(v.sum() - 1.0) > 1e-12) {
        throw DataError("v is not a stochastic vector");
    }
    // recover the dangling set from the fiber sums of pbar itself
    std::vector<std::uint64_t> non_dangling;
    for (const auto& f : pbar.canonical_fibers()) {
        KahanSum sum;
        for (std::size_t i = f.begin; i < f.end; ++i) {
            const Scalar val = pbar.value_at(i);
            if (val < 0.0) throw DataError("corrected operator requires a nonnegative tensor");
            sum.add(val);
        }
        const Scalar s = sum.value();
        if (s > 1.0 + 1e-9) throw DataError("tensor is not columnwise-substochastic");
        if (s > 0.0) non_dangling.push_back(f.canonical_linear0);
    }
    return CorrectedOperator(pbar, v, mode, DanglingInfo(pbar.dim(), pbar.order(), std::move(non_dangling)));
}

}  // namespace hyperrank
