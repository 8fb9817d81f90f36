#pragma once

#include "hyperrank/common.hpp"
#include "hyperrank/sparse_tensor.hpp"

#include <optional>

namespace hyperrank {

enum class Model { Mlppr, Mpr };

/// One multi-linear (pseudo-)PageRank instance: a columnwise-substochastic
/// tensor, a probability alpha in [0,1), and a stochastic vector v.
struct PageRankProblem {
    SparseKTensor tensor;
    Scalar alpha = 0.0;
    Vector v;
    Model model = Model::Mlppr;
    CorrectionMode correction = CorrectionMode::Implicit;  // MPR only

    /// Throws DataError unless alpha in [0,1), v is stochastic to 1e-12 and
    /// the tensor is columnwise-substochastic.
    void validate() const;

    int order() const { return tensor.order(); }
    VertexId dim() const { return tensor.dim(); }
};

struct SolveOptions {
    Scalar tol_step = 1e-8;   // ||y_c - y_{c-1}||_inf / ||y_c||_1
    Scalar tol_eq = 1e-10;    // equation residual, see SolveReport
    int max_iter = 100000;
    Scalar shift = 0.0;       // MPR shifted fixed point; 0 = plain
};

struct SolveReport {
    Vector y;                  // nonnegative solution (stochastic for MPR)
    int iterations = 0;
    Scalar residual_step = 0;  // ||y_c-y_{c-1}||_inf / ||y_c||_1
    Scalar residual_eq = 0;    // ||(e^T y)^(k-2) y - a Pbar y^(k-1) - v||_inf / ||y||_1^(k-1)
    Scalar varsigma = 0;       // (2k-3) a (1-a)^(-(k-2)/(k-1))
    bool unique_by_contraction = false;  // varsigma < 1
    bool unique_by_corollary = false;    // alpha < 1/(k-1)
    bool converged = false;
};

/// Contraction constant of the splitting map. k=2 reduces this to alpha.
Scalar contraction_constant(int k, Scalar alpha);

/// Feasible-set radius rho = (1-alpha)^(-1/(k-1)); solutions satisfy
/// e^T y <= rho.
Scalar feasible_radius(int k, Scalar alpha);

/// One splitting step: Phi(y) = (1 + a e^T(Pbar y^(k-1)))^(-(k-2)/(k-1))
/// (v + a Pbar y^(k-1)). Maps the feasible set into itself.
Vector phi_step(const PageRankProblem& problem, Eigen::Ref<const Vector> y);

/// Fixed-point iteration y <- Phi(y) from y0 (default v), stopping when
/// either residual criterion holds. Non-convergence is reported, not thrown.
SolveReport solve_mlppr(const PageRankProblem& problem,
                        std::optional<Vector> y0 = std::nullopt,
                        const SolveOptions& opts = {});

/// Shifted fixed point for the dangling-corrected model
/// x = a P x^(k-1) + (1-a) v, renormalized to the simplex each step.
SolveReport solve_mpr(const PageRankProblem& problem, const SolveOptions& opts = {});

/// Maps an MPR solution x to the pseudo form,
/// y = (1 - a e^T(Pbar x^(k-1)))^(-1/(k-1)) x. Refuses (DataError) if x
/// fails the MPR equation at `input_tol`.
Vector mpr_to_mlppr(const PageRankProblem& problem, Eigen::Ref<const Vector> x,
                    Scalar input_tol = 1e-8);

/// Maps a pseudo solution y to the stochastic MPR form y / (e^T y).
/// Refuses (DataError) if y fails the pseudo equation at `input_tol`.
Vector mlppr_to_mpr(const PageRankProblem& problem, Eigen::Ref<const Vector> y,
                    Scalar input_tol = 1e-8);

/// Equation residual ||(e^T y)^(k-2) y - a Pbar y^(k-1) - v||_inf / ||y||_1^(k-1).
Scalar mlppr_residual(const PageRankProblem& problem, Eigen::Ref<const Vector> y);

/// Equation residual ||x - a P x^(k-1) - (1-a) v||_inf for the corrected model.
Scalar mpr_residual(const PageRankProblem& problem, Eigen::Ref<const Vector> x);

}  // namespace hyperrank
