#include "hyperrank/solver.hpp"

#include "hyperrank/tensor_ops.hpp"

#include <cmath>

namespace hyperrank {

namespace {

Scalar kahan_total(Eigen::Ref<const Vector> x) {
    KahanSum s;
    for (Eigen::Index i = 0; i < x.size(); ++i) s.add(x[i]);
    return s.value();
}

}  // namespace

void PageRankProblem::validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DataError("alpha must lie in [0, 1)");
    if (v.size() != tensor.dim()) throw DataError("v has wrong dimension");
    if (v.minCoeff() < 0.0) throw DataError("v must be nonnegative");
    if (std::abs(kahan_total(v) - 1.0) > 1e-12) throw DataError("v must sum to 1");
    for (const auto& f : tensor.canonical_fibers()) {
        KahanSum s;
        for (std::size_t i = f.begin; i < f.end; ++i) {
            if (tensor.value_at(i) < 0.0) throw DataError("tensor has a negative entry");
            s.add(tensor.value_at(i));
        }
        if (s.value() > 1.0 + 1e-9) throw DataError("tensor is not columnwise-substochastic");
    }
}

Scalar contraction_constant(int k, Scalar alpha) {
    if (k < 2) throw DataError("order must be at least 2");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DataError("alpha must lie in [0, 1)");
    const Scalar expo = static_cast<Scalar>(k - 2) / static_cast<Scalar>(k - 1);
    return static_cast<Scalar>(2 * k - 3) * alpha * std::pow(1.0 - alpha, -expo);
}

Scalar feasible_radius(int k, Scalar alpha) {
    return std::pow(1.0 - alpha, -1.0 / static_cast<Scalar>(k - 1));
}

Vector phi_step(const PageRankProblem& problem, Eigen::Ref<const Vector> y) {
    const int k = problem.order();
    Vector z = problem.alpha * apply(problem.tensor, y) + problem.v;
    const Scalar total = kahan_total(z);  // >= e^T v = 1
    const Scalar expo = static_cast<Scalar>(k - 2) / static_cast<Scalar>(k - 1);
    return std::pow(total, -expo) * z;
}

Scalar mlppr_residual(const PageRankProblem& problem, Eigen::Ref<const Vector> y) {
    const int k = problem.order();
    const Scalar ety = kahan_total(y);
    const Vector r = std::pow(ety, k - 2) * y - problem.alpha * apply(problem.tensor, y) - problem.v;
    const Scalar scale = std::pow(y.cwiseAbs().sum(), k - 1);
    return r.cwiseAbs().maxCoeff() / scale;
}

Scalar mpr_residual(const PageRankProblem& problem, Eigen::Ref<const Vector> x) {
    const CorrectedOperator op = dangling_correction(problem.tensor, problem.v, problem.correction);
    const Vector r = x - problem.alpha * op.apply(x) - (1.0 - problem.alpha) * problem.v;
    return r.cwiseAbs().maxCoeff();
}

SolveReport solve_mlppr(const PageRankProblem& problem, std::optional<Vector> y0,
                        const SolveOptions& opts) {
    problem.validate();
    const int k = problem.order();
    const Scalar alpha = problem.alpha;
    const Scalar expo = static_cast<Scalar>(k - 2) / static_cast<Scalar>(k - 1);

    SolveReport rep;
    rep.varsigma = contraction_constant(k, alpha);
    rep.unique_by_contraction = rep.varsigma < 1.0;
    rep.unique_by_corollary = alpha < 1.0 / static_cast<Scalar>(k - 1);

    Vector y = y0.value_or(problem.v);
    if (y.size() != problem.dim()) throw DataError("y0 has wrong dimension");
    if (y.minCoeff() < 0.0 || kahan_total(y) > feasible_radius(k, alpha) + 1e-9) {
        throw DataError("y0 lies outside the feasible set");
    }

    Vector py = apply(problem.tensor, y);
    for (int c = 1; c <= opts.max_iter; ++c) {
        Vector z = alpha * py + problem.v;
        const Scalar total = kahan_total(z);
        const Vector ynew = std::pow(total, -expo) * z;

        const Scalar ynew_l1 = ynew.cwiseAbs().sum();
        const Scalar step = (ynew - y).cwiseAbs().maxCoeff() / ynew_l1;

        // the apply below powers both the residual and the next iteration
        Vector py_new = apply(problem.tensor, ynew);
        const Scalar ety = kahan_total(ynew);
        const Vector r = std::pow(ety, k - 2) * ynew - alpha * py_new - problem.v;
        const Scalar eq = r.cwiseAbs().maxCoeff() / std::pow(ynew_l1, k - 1);

        rep.iterations = c;
        rep.residual_step = step;
        rep.residual_eq = eq;
        y = ynew;
        py = std::move(py_new);
        if (step <= opts.tol_step || eq <= opts.tol_eq) {
            rep.converged = true;
            break;
        }
    }
    rep.y = std::move(y);
    return rep;
}

SolveReport solve_mpr(const PageRankProblem& problem, const SolveOptions& opts) {
    problem.validate();
    if (opts.shift < 0.0) throw DataError("shift must be nonnegative");
    const Scalar alpha = problem.alpha;
    const CorrectedOperator op = dangling_correction(problem.tensor, problem.v, problem.correction);

    SolveReport rep;
    rep.varsigma = contraction_constant(problem.order(), alpha);
    rep.unique_by_contraction = rep.varsigma < 1.0;
    rep.unique_by_corollary = alpha < 1.0 / static_cast<Scalar>(problem.order() - 1);

    Vector x = problem.v;
    Vector px = op.apply(x);
    for (int c = 1; c <= opts.max_iter; ++c) {
        Vector xnew = (alpha * px + (1.0 - alpha) * problem.v + opts.shift * x) / (1.0 + opts.shift);
        xnew /= kahan_total(xnew);  // guards simplex drift

        const Scalar step = (xnew - x).cwiseAbs().maxCoeff() / xnew.cwiseAbs().sum();
        // this apply powers both the residual and the next iteration
        Vector px_new = op.apply(xnew);
        const Vector r = xnew - alpha * px_new - (1.0 - alpha) * problem.v;
        const Scalar eq = r.cwiseAbs().maxCoeff();

        rep.iterations = c;
        rep.residual_step = step;
        rep.residual_eq = eq;
        x = std::move(xnew);
        px = std::move(px_new);
        if (step <= opts.tol_step || eq <= opts.tol_eq) {
            rep.converged = true;
            break;
        }
    }
    rep.y = std::move(x);
    return rep;
}

Vector mpr_to_mlppr(const PageRankProblem& problem, Eigen::Ref<const Vector> x,
                    Scalar input_tol) {
    const Scalar res = mpr_residual(problem, x);
    if (res > input_tol) {
        throw DataError("mpr_to_mlppr: input residual " + std::to_string(res) +
                        " exceeds tolerance");
    }
    const int k = problem.order();
    const Scalar mass = kahan_total(apply(problem.tensor, x));
    const Scalar factor = std::pow(1.0 - problem.alpha * mass, -1.0 / static_cast<Scalar>(k - 1));
    return factor * x;
}

Vector mlppr_to_mpr(const PageRankProblem& problem, Eigen::Ref<const Vector> y,
                    Scalar input_tol) {
    const Scalar res = mlppr_residual(problem, y);
    if (res > input_tol) {
        throw DataError("mlppr_to_mpr: input residual " + std::to_string(res) +
                        " exceeds tolerance");
    }
    return y / kahan_total(y);
}

}  // namespace hyperrank
