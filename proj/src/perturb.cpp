#include "hyperrank/perturb.hpp"

#include "hyperrank/rng.hpp"
#include "hyperrank/threading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyperrank {

std::string to_string(PerturbTarget t) {
    switch (t) {
        case PerturbTarget::VOnly: return "v";
        case PerturbTarget::TensorOnly: return "tensor";
        case PerturbTarget::Both: return "both";
    }
    return "?";
}

namespace {

// Exact projection onto the coordinate cell
// {(p,q) : p >= 0, q >= 0, p - q >= -u} with u >= 0. The cell's boundary is
// three edges; the nearest of the clamped edge projections wins.
void project_cell(Scalar u, Scalar& p, Scalar& q) {
    if (p >= 0.0 && q >= 0.0 && p - q >= -u) return;
    const Scalar p0 = p, q0 = q;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    const auto consider = [&](Scalar cp, Scalar cq) {
        const Scalar d = (cp - p0) * (cp - p0) + (cq - q0) * (cq - q0);
        if (d < best) {
            best = d;
            p = cp;
            q = cq;
        }
    };
    consider(0.0, std::clamp(q0, 0.0, u));       // edge p = 0
    consider(std::max(p0, 0.0), 0.0);            // edge q = 0
    const Scalar t = std::max(0.0, (p0 + q0 - u) / 2.0);
    consider(t, t + u);                          // edge p - q = -u
}

struct SplitState {
    Vector sp, sm;
};

// Dykstra's alternating projection between the two-hyperplane affine set
// {e^T sp + e^T sm = sigma, e^T sp - e^T sm = 0} and the product of
// coordinate cells above.
void project_feasible(const Vector& u, Scalar sigma, SplitState& s, int sweeps = 256) {
    const Eigen::Index n = u.size();
    Vector inc_ap = Vector::Zero(n), inc_am = Vector::Zero(n);
    Vector inc_cp = Vector::Zero(n), inc_cm = Vector::Zero(n);
    for (int it = 0; it < sweeps; ++it) {
        // affine half-step (the two constraint normals are orthogonal)
        Vector ap = s.sp + inc_ap, am = s.sm + inc_am;
        const Scalar r1 = (ap.sum() + am.sum() - sigma) / static_cast<Scalar>(2 * n);
        const Scalar r2 = (ap.sum() - am.sum()) / static_cast<Scalar>(2 * n);
        Vector yp = ap.array() - (r1 + r2);
        Vector ym = am.array() - (r1 - r2);
        inc_ap = ap - yp;
        inc_am = am - ym;

        // cell half-step
        Scalar delta = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar p0 = yp[i] + inc_cp[i];
            const Scalar q0 = ym[i] + inc_cm[i];
            Scalar p = p0, q = q0;
            project_cell(u[i], p, q);
            inc_cp[i] = p0 - p;
            inc_cm[i] = q0 - q;
            delta = std::max({delta, std::abs(p - yp[i]), std::abs(q - ym[i])});
            s.sp[i] = p;
            s.sm[i] = q;
        }
        if (delta < 1e-15) break;
    }
}

Scalar feasibility_residual(const Vector& u, Scalar sigma, const SplitState& s) {
    Scalar r = std::abs(s.sp.sum() + s.sm.sum() - sigma);
    r = std::max(r, std::abs(s.sp.sum() - s.sm.sum()));
    r = std::max(r, std::max(0.0, -s.sp.minCoeff()));
    r = std::max(r, std::max(0.0, -s.sm.minCoeff()));
    r = std::max(r, std::max(0.0, (-(u + s.sp - s.sm)).maxCoeff()));
    return r;
}

}  // namespace

StochasticPerturbation perturb_stochastic(Eigen::Ref<const Vector> u, Scalar sigma,
                                          std::uint64_t seed) {
    const Eigen::Index n = u.size();
    if (n == 0) throw DataError("empty vector");
    if (u.minCoeff() < -1e-12) throw DataError("u must be nonnegative");
    if (sigma < 0.0) throw DataError("sigma must be nonnegative");
    StochasticPerturbation out;
    if (sigma == 0.0) {
        out.delta = Vector::Zero(n);
        return out;
    }
    // the negative part of delta is capped by e^T u, so ||delta||_1 = sigma
    // needs sigma/2 <= e^T u
    if (sigma >= 2.0 * u.sum()) {
        throw DataError("infeasible perturbation: sigma must be below 2 e^T u");
    }

    Rng rng(mix_seed(seed, 0xb0b));
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = rng.normal();

    // projected gradient on f(sp, sm) = ||(sp - sm) - b||^2; the gradient map
    // has Lipschitz constant 4, so a fixed step of 1/4 is safe
    constexpr Scalar step = 0.25;
    constexpr int max_iter = 10000;
    SplitState s{Vector::Zero(n), Vector::Zero(n)};
    // feasible start: spread sigma/2 over both sides
    s.sp.setConstant(sigma / (2.0 * static_cast<Scalar>(n)));
    s.sm.setConstant(sigma / (2.0 * static_cast<Scalar>(n)));
    project_feasible(u, sigma, s);

    Scalar stationarity = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const Vector diff = s.sp - s.sm - b;
        SplitState next{s.sp - step * 2.0 * diff, s.sm + step * 2.0 * diff};
        project_feasible(u, sigma, next);
        stationarity =
            std::max((next.sp - s.sp).cwiseAbs().maxCoeff(), (next.sm - s.sm).cwiseAbs().maxCoeff()) /
            step;
        s = std::move(next);
        if (stationarity <= 1e-9) break;
    }

    out.delta = s.sp - s.sm;
    out.feasibility_residual = feasibility_residual(u, sigma, s);
    out.stationarity_residual = stationarity;
    return out;
}

SparseKTensor perturb_tensor(const SparseKTensor& pbar, Scalar sigma_total, std::uint64_t seed) {
    const VertexId n = pbar.dim();
    const int k = pbar.order();
    if (sigma_total < 0.0) throw DataError("sigma_total must be nonnegative");
    const auto& fibers = pbar.canonical_fibers();
    if (fibers.empty()) throw DataError("no non-dangling fibers to perturb");

    // equal split of the budget across all ordered non-dangling fibers; a
    // canonical fiber with multiplicity c covers c ordered columns at once
    std::uint64_t ordered_fibers = 0;
    std::vector<std::uint64_t> mult(fibers.size());
    std::vector<VertexId> tail(static_cast<std::size_t>(k - 1));
    for (std::size_t f = 0; f < fibers.size(); ++f) {
        std::uint64_t rest = fibers[f].canonical_linear0;
        for (auto& t : tail) {
            t = static_cast<VertexId>(rest % static_cast<std::uint64_t>(n));
            rest /= static_cast<std::uint64_t>(n);
        }
        std::uint64_t m = 1;
        for (std::size_t j = 2; j <= tail.size(); ++j) m *= j;
        std::uint64_t run = 1;
        for (std::size_t j = 1; j < tail.size(); ++j) {
            if (tail[j] == tail[j - 1]) {
                m /= ++run;
            } else {
                run = 1;
            }
        }
        mult[f] = m;
        ordered_fibers += m;
    }
    const Scalar per_fiber = sigma_total / static_cast<Scalar>(ordered_fibers);

    SparseKTensor out(n, k);
    if (sigma_total == 0.0) {
        for (std::size_t i = 0; i < pbar.entry_count(); ++i) {
            out.add(pbar.head(i), pbar.tail(i), pbar.value_at(i));
        }
        out.finalize();
        return out;
    }

    for (std::size_t f = 0; f < fibers.size(); ++f) {
        const auto& fr = fibers[f];
        Vector column = Vector::Zero(n);
        for (std::size_t i = fr.begin; i < fr.end; ++i) column[pbar.head(i)] = pbar.value_at(i);
        const StochasticPerturbation p =
            perturb_stochastic(column, per_fiber, mix_seed(seed, fr.canonical_linear0));
        column += p.delta;
        const auto t = pbar.tail(fr.begin);
        for (VertexId head = 0; head < n; ++head) {
            if (column[head] != 0.0) out.add(head, t, column[head]);
        }
    }
    out.finalize();
    return out;
}

Scalar perturbation_bound(int k, Scalar alpha, Scalar dpbar_norm, Scalar dv_norm) {
    const Scalar vs = contraction_constant(k, alpha);
    if (vs >= 1.0) throw DataError("perturbation bound requires varsigma < 1");
    return static_cast<Scalar>(2 * k - 3) / (static_cast<Scalar>(k - 1) * (1.0 - vs)) *
           (alpha / (1.0 - alpha) * dpbar_norm + dv_norm);
}

std::vector<Scalar> sigma_grid(Scalar lo, Scalar hi, int points) {
    if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw DataError("bad sigma grid");
    std::vector<Scalar> grid(static_cast<std::size_t>(points));
    const Scalar llo = std::log10(lo), lhi = std::log10(hi);
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            std::pow(10.0, llo + (lhi - llo) * static_cast<Scalar>(i) / static_cast<Scalar>(points - 1));
    }
    return grid;
}

std::vector<PerturbationRow> perturbation_experiment(
    const PageRankProblem& problem, const std::vector<Scalar>& sigmas,
    std::vector<PerturbTarget> targets, int trials, std::uint64_t seed, int threads,
    const SolveOptions& solve) {
    problem.validate();
    if (trials < 1) throw DataError("trials must be at least 1");
    const int k = problem.order();
    const Scalar vs = contraction_constant(k, problem.alpha);
    if (vs >= 1.0) {
        throw DataError("perturbation experiment requires varsigma < 1 (got " +
                        std::to_string(vs) + ")");
    }

    const SolveReport base = solve_mlppr(problem, std::nullopt, solve);
    if (!base.converged) throw Error("baseline solve did not converge");

    std::vector<PerturbationRow> rows;
    for (const Scalar sigma : sigmas) {
        for (const PerturbTarget target : targets) {
            const Scalar dv_norm = target == PerturbTarget::TensorOnly ? 0.0 : sigma;
            const Scalar dp_norm = target == PerturbTarget::VOnly ? 0.0 : 4.0 * sigma;

            std::vector<Scalar> dy(static_cast<std::size_t>(trials));
            parallel_for(trials, threads, [&](std::int64_t t) {
                const std::uint64_t trial_seed =
                    mix_seed(seed, (static_cast<std::uint64_t>(target) << 40) +
                                       static_cast<std::uint64_t>(t) * 1048583 +
                                       static_cast<std::uint64_t>(rows.size()));
                PageRankProblem pert{problem.tensor, problem.alpha, problem.v, problem.model,
                                     problem.correction};
                if (target != PerturbTarget::TensorOnly) {
                    pert.v += perturb_stochastic(problem.v, sigma, mix_seed(trial_seed, 1)).delta;
                }
                if (target != PerturbTarget::VOnly) {
                    pert.tensor = perturb_tensor(problem.tensor, dp_norm, mix_seed(trial_seed, 2));
                }
                const SolveReport rep = solve_mlppr(pert, std::nullopt, solve);
                dy[static_cast<std::size_t>(t)] = (rep.y - base.y).cwiseAbs().sum();
            });

            PerturbationRow row;
            row.sigma = sigma;
            row.mode = target;
            row.trials = trials;
            row.bound = perturbation_bound(k, problem.alpha, dp_norm, dv_norm);
            KahanSum mean;
            for (const Scalar d : dy) {
                mean.add(d);
                row.max_dy = std::max(row.max_dy, d);
            }
            row.mean_dy = mean.value() / static_cast<Scalar>(trials);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace hyperrank
