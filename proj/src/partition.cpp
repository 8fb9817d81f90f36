#include "hyperrank/partition.hpp"

#include "hyperrank/rng.hpp"
#include "hyperrank/tensor_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hyperrank {

namespace {

// The teleported, damped latent chain M = damp*T + (1-damp) v e^T where T is
// (A + u c^T) with columns normalized and zero columns replaced by v. Kept in
// operator form; the rank-one part carries the dangling correction when the
// ranking method is Mpr.
struct LatentChain {
    SpMatrix a;          // column-major
    Vector rank1_u, rank1_c;  // empty => no rank-one term
    Vector v;
    Scalar damp = 0.99;
    Vector colsum;       // e^T A + (e^T u) c
    std::vector<char> teleported;

    void init() {
        const Eigen::Index n = a.cols();
        colsum = Vector::Zero(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (SpMatrix::InnerIterator it(a, j); it; ++it) colsum[j] += it.value();
        }
        if (rank1_u.size() > 0) colsum += rank1_u.sum() * rank1_c;
        teleported.assign(static_cast<std::size_t>(n), 0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(colsum[j] > 0.0)) teleported[static_cast<std::size_t>(j)] = 1;
        }
    }

    // T x
    Vector t_apply(Eigen::Ref<const Vector> x) const {
        const Eigen::Index n = a.cols();
        Vector xs = Vector::Zero(n);
        Scalar teleport_mass = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (teleported[static_cast<std::size_t>(j)]) {
                teleport_mass += x[j];
            } else {
                xs[j] = x[j] / colsum[j];
            }
        }
        Vector y = a * xs;
        if (rank1_u.size() > 0) y += rank1_u * rank1_c.dot(xs);
        y += teleport_mass * v;
        return y;
    }

    // T^T x
    Vector t_apply_transposed(Eigen::Ref<const Vector> x) const {
        const Eigen::Index n = a.cols();
        Vector y = a.transpose() * x;
        if (rank1_u.size() > 0) y += rank1_c * rank1_u.dot(x);
        const Scalar vx = v.dot(x);
        for (Eigen::Index j = 0; j < n; ++j) {
            y[j] = teleported[static_cast<std::size_t>(j)] ? vx : y[j] / colsum[j];
        }
        return y;
    }

    Vector apply(Eigen::Ref<const Vector> x) const {
        return damp * t_apply(x) + (1.0 - damp) * x.sum() * v;
    }
    Vector apply_transposed(Eigen::Ref<const Vector> x) const {
        Vector y = damp * t_apply_transposed(x);
        y.array() += (1.0 - damp) * v.dot(x);
        return y;
    }
};

Vector stationary_distribution(const LatentChain& chain, Scalar tol, int max_iter,
                               Scalar* residual_out) {
    // ||M pi - pi||_1 is nonincreasing along the iteration (M is columnwise
    // stochastic), so the step difference bounds the returned residual.
    Vector pi = chain.v;
    Scalar res = std::numeric_limits<Scalar>::infinity();
    for (int c = 0; c < max_iter; ++c) {
        Vector next = chain.apply(pi);
        res = (next - pi).cwiseAbs().sum();
        next /= next.sum();
        pi = std::move(next);
        if (res <= tol) break;
    }
    if (residual_out) *residual_out = res;
    return pi;
}

// Second eigenpair of S = Pi^(1/2) M^T Pi^(-1/2) (symmetric part), by power
// iteration on S + I with the known dominant pair (sqrt(pi), 1) deflated.
struct SecondEigen {
    Vector z;
    Scalar lambda = 0;
    Scalar residual = 0;
};

SecondEigen second_eigenvector(const LatentChain& chain, Eigen::Ref<const Vector> pi,
                               Scalar tol, int max_iter, std::uint64_t seed) {
    const Eigen::Index n = pi.size();
    const Vector sqrt_pi = pi.cwiseSqrt();
    const Vector inv_sqrt_pi = sqrt_pi.cwiseInverse();
    Vector z1 = sqrt_pi;
    z1 /= z1.norm();

    const auto s_apply = [&](Eigen::Ref<const Vector> x) {
        // S x = (Pi^(1/2) M^T Pi^(-1/2) x + Pi^(-1/2) M Pi^(1/2) x) / 2
        const Vector left = sqrt_pi.cwiseProduct(
            chain.apply_transposed(inv_sqrt_pi.cwiseProduct(x)));
        const Vector right = inv_sqrt_pi.cwiseProduct(
            chain.apply(sqrt_pi.cwiseProduct(x)));
        return Vector(0.5 * (left + right));
    };

    Rng rng(mix_seed(seed, 0x5eed));
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
    z -= z1.dot(z) * z1;
    const Scalar nz = z.norm();
    if (nz < 1e-300) {
        z = Vector::Zero(n);
        z[0] = 1.0;
        z -= z1.dot(z) * z1;
    }
    z /= z.norm();

    SecondEigen out;
    for (int c = 0; c < max_iter; ++c) {
        Vector w = s_apply(z);
        out.lambda = z.dot(w);
        out.residual = (w - out.lambda * z).norm();
        if (out.residual <= tol) break;
        w += z;                    // shift keeps the target at the top
        w -= z1.dot(w) * z1;       // deflate the known dominant pair
        const Scalar nw = w.norm();
        if (nw < 1e-300) break;    // fully deflated (n extremely small)
        z = w / nw;
    }
    out.z = std::move(z);
    return out;
}

SpMatrix clique_expansion(const UniformHypergraph& h) {
    std::vector<Eigen::Triplet<Scalar>> trips;
    const int k = h.order();
    for (const auto& e : h.edges()) {
        for (int i = 0; i < k; ++i) {
            for (int j = i + 1; j < k; ++j) {
                const VertexId a = e.vertices[static_cast<std::size_t>(i)];
                const VertexId b = e.vertices[static_cast<std::size_t>(j)];
                trips.emplace_back(a, b, e.weight);
                trips.emplace_back(b, a, e.weight);
            }
        }
    }
    SpMatrix m(h.vertex_count(), h.vertex_count());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

}  // namespace

PartitionState partition_state(const UniformHypergraph& h, const PartitionOptions& opts) {
    if (h.order() != 3) throw DataError("partition pipeline is defined for 3-uniform hypergraphs");
    const VertexId n = h.vertex_count();
    if (n < 2) throw DataError("partition requires at least two vertices");
    const Vector v = Vector::Constant(n, 1.0 / static_cast<Scalar>(n));

    PartitionState state;
    LatentChain chain;
    chain.v = v;
    chain.damp = opts.alpha;

    if (opts.method == RankMethod::Gpr) {
        // graph approximation: clique-expand, then classical pseudo-PageRank
        const SpMatrix a2 = clique_expansion(h);
        SparseKTensor t2(n, 2);
        for (Eigen::Index jo = 0; jo < a2.outerSize(); ++jo) {
            for (SpMatrix::InnerIterator it(a2, jo); it; ++it) {
                const VertexId tail = static_cast<VertexId>(it.col());
                t2.add(static_cast<VertexId>(it.row()), std::span<const VertexId>(&tail, 1),
                       it.value());
            }
        }
        t2.finalize();
        auto [p2, dang2] = normalize_substochastic(t2);
        PageRankProblem prob{std::move(p2), opts.alpha, v, Model::Mlppr, CorrectionMode::Implicit};
        state.solve_report = solve_mlppr(prob, std::nullopt, opts.solve);
        state.ranking = state.solve_report.y;
        state.a_hat = a2;
    } else {
        const SparseKTensor a = adjacency_tensor(h);
        auto [pbar, dangling] = normalize_substochastic(a);
        PageRankProblem prob{std::move(pbar), opts.alpha, v,
                             opts.method == RankMethod::Mpr ? Model::Mpr : Model::Mlppr,
                             CorrectionMode::Implicit};
        if (opts.method == RankMethod::Mpr) {
            state.solve_report = solve_mpr(prob, opts.solve);
            const Vector& x = state.solve_report.y;
            state.ranking = x;
            state.a_hat = contract_to_matrix(prob.tensor, x);
            // rank-one correction (v o C) x_3 x = v (C x)^T
            Vector nondangling_mass = Vector::Zero(n);
            std::vector<VertexId> tail(2);
            for (std::uint64_t key : dangling.non_dangling_canonical()) {
                const auto a0 = static_cast<VertexId>(key % static_cast<std::uint64_t>(n));
                const auto b0 = static_cast<VertexId>(key / static_cast<std::uint64_t>(n));
                if (a0 == b0) {
                    nondangling_mass[a0] += x[a0];
                } else {
                    nondangling_mass[a0] += x[b0];
                    nondangling_mass[b0] += x[a0];
                }
            }
            state.a_hat_rank1_u = v;
            state.a_hat_rank1_c = Vector::Constant(n, x.sum()) - nondangling_mass;
        } else {
            state.solve_report = solve_mlppr(prob, std::nullopt, opts.solve);
            state.ranking = state.solve_report.y;
            state.a_hat = contract_to_matrix(prob.tensor, state.ranking);
        }
    }

    chain.a = state.a_hat;
    chain.rank1_u = state.a_hat_rank1_u;
    chain.rank1_c = state.a_hat_rank1_c;
    chain.init();

    state.pi = stationary_distribution(chain, opts.chain_tol, opts.power_max_iter,
                                       &state.pi_residual);
    if (state.pi.minCoeff() <= 0.0) {
        throw DataError("degenerate stationary distribution despite teleportation");
    }

    const SecondEigen se = second_eigenvector(chain, state.pi, opts.eig_tol,
                                              opts.power_max_iter, opts.seed);
    state.x_star = se.z.cwiseQuotient(state.pi.cwiseSqrt());
    state.lambda2 = 2.0 * se.lambda;  // eigenvalue of 2 P_sym
    state.eig_residual = se.residual;
    return state;
}

SweepCut sweep_cut(const UniformHypergraph& h, std::span<const VertexId> order) {
    const VertexId n = h.vertex_count();
    if (static_cast<VertexId>(order.size()) != n) throw DataError("order must permute all vertices");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (VertexId u : order) {
        if (u < 0 || u >= n || seen[static_cast<std::size_t>(u)]) {
            throw DataError("order is not a permutation");
        }
        seen[static_cast<std::size_t>(u)] = 1;
    }
    const int k = h.order();
    const auto& edges = h.edges();

    // incidence lists; directed arcs contribute volume through their head only
    std::vector<std::vector<std::uint32_t>> incident(static_cast<std::size_t>(n));
    std::vector<std::vector<std::uint32_t>> head_of(static_cast<std::size_t>(n));
    Scalar vol_all = 0.0;
    for (std::uint32_t ei = 0; ei < edges.size(); ++ei) {
        const auto& e = edges[ei];
        for (VertexId u : e.vertices) incident[static_cast<std::size_t>(u)].push_back(ei);
        if (h.directed()) {
            head_of[static_cast<std::size_t>(e.vertices.back())].push_back(ei);
            vol_all += e.weight;
        } else {
            vol_all += static_cast<Scalar>(k) * e.weight;
        }
    }

    SweepCut sc;
    sc.order.assign(order.begin(), order.end());
    sc.h.resize(static_cast<std::size_t>(n > 0 ? n - 1 : 0));

    std::vector<std::uint8_t> in_count(edges.size(), 0);
    Scalar vol_s = 0.0;
    Scalar cut_w = 0.0;  // straddling edge weight; cut(S) = k * cut_w (undirected), 1 * (directed)
    const Scalar cut_factor = h.directed() ? 1.0 : static_cast<Scalar>(k);

    Scalar best = std::numeric_limits<Scalar>::infinity();
    int best_i = 1;
    for (VertexId i = 1; i <= n - 1; ++i) {
        const VertexId u = order[static_cast<std::size_t>(i - 1)];
        for (std::uint32_t ei : incident[static_cast<std::size_t>(u)]) {
            const auto c = in_count[ei];
            if (c == 0) cut_w += edges[ei].weight;           // becomes straddling
            if (c + 1 == k) cut_w -= edges[ei].weight;       // fully absorbed
            in_count[ei] = static_cast<std::uint8_t>(c + 1);
        }
        if (h.directed()) {
            for (std::uint32_t ei : head_of[static_cast<std::size_t>(u)]) {
                vol_s += edges[ei].weight;
            }
        } else {
            for (std::uint32_t ei : incident[static_cast<std::size_t>(u)]) {
                vol_s += edges[ei].weight;
            }
        }
        const Scalar vol_sbar = vol_all - vol_s;
        Scalar hi;
        if (vol_s > 0.0 && vol_sbar > 0.0) {
            hi = cut_factor * cut_w * (1.0 / vol_s + 1.0 / vol_sbar);
        } else {
            hi = std::numeric_limits<Scalar>::infinity();
        }
        sc.h[static_cast<std::size_t>(i - 1)] = hi;
        if (hi < best) {
            best = hi;
            best_i = static_cast<int>(i);
        }
    }
    sc.i_star = best_i;
    sc.s.assign(order.begin(), order.begin() + best_i);
    sc.s_bar.assign(order.begin() + best_i, order.end());
    return sc;
}

SweepCut bipartition(const UniformHypergraph& h, const PartitionOptions& opts) {
    const PartitionState state = partition_state(h, opts);
    std::vector<VertexId> order(static_cast<std::size_t>(h.vertex_count()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
        const Scalar xa = state.x_star[a], xb = state.x_star[b];
        if (xa != xb) return xa < xb;
        return a < b;
    });
    return sweep_cut(h, order);
}

PartitionResult recursive_partition(const UniformHypergraph& h, int parts,
                                    const PartitionOptions& opts) {
    if (parts < 2) throw DataError("parts must be at least 2");
    PartitionResult result;
    result.parts.push_back(std::vector<VertexId>(static_cast<std::size_t>(h.vertex_count())));
    std::iota(result.parts[0].begin(), result.parts[0].end(), 0);
    std::vector<char> frozen{0};

    std::uint64_t split_counter = 0;
    while (static_cast<int>(result.parts.size()) < parts) {
        // largest splittable part; ties toward the lowest index
        int target = -1;
        for (int i = 0; i < static_cast<int>(result.parts.size()); ++i) {
            if (frozen[static_cast<std::size_t>(i)]) continue;
            if (result.parts[static_cast<std::size_t>(i)].size() < 2) continue;
            if (target < 0 || result.parts[static_cast<std::size_t>(i)].size() >
                                  result.parts[static_cast<std::size_t>(target)].size()) {
                target = i;
            }
        }
        if (target < 0) {
            result.reached_target = false;
            result.diagnostic = "target part count unreachable: no splittable part remains";
            break;
        }
        auto& verts = result.parts[static_cast<std::size_t>(target)];
        const UniformHypergraph sub = h.induced(verts);
        if (sub.edges().empty()) {
            frozen[static_cast<std::size_t>(target)] = 1;
            continue;
        }
        PartitionOptions sub_opts = opts;
        sub_opts.seed = mix_seed(opts.seed, ++split_counter);
        const SweepCut cut = bipartition(sub, sub_opts);
        std::vector<VertexId> side_a, side_b;
        side_a.reserve(cut.s.size());
        side_b.reserve(cut.s_bar.size());
        for (VertexId u : cut.s) side_a.push_back(verts[static_cast<std::size_t>(u)]);
        for (VertexId u : cut.s_bar) side_b.push_back(verts[static_cast<std::size_t>(u)]);
        std::sort(side_a.begin(), side_a.end());
        std::sort(side_b.begin(), side_b.end());
        verts = std::move(side_a);
        result.parts.push_back(std::move(side_b));
        frozen.push_back(0);
    }
    for (auto& p : result.parts) std::sort(p.begin(), p.end());
    return result;
}

}  // namespace hyperrank
