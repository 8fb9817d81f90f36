#pragma once

#include "hyperrank/common.hpp"
#include "hyperrank/solver.hpp"

#include <string>
#include <vector>

namespace hyperrank {

enum class PerturbTarget { VOnly, TensorOnly, Both };

std::string to_string(PerturbTarget t);

struct PerturbationSpec {
    Scalar sigma = 0.01;          // ||dv||_1 = sigma, ||R(dPbar)||_1 = 4 sigma
    PerturbTarget target = PerturbTarget::Both;
    int trials = 100;
    std::uint64_t seed = 0;
};

/// Result of projecting a Gaussian draw onto the simplex-perturbation set
/// { ||d||_1 = sigma, e^T d = 0, u + d >= 0 } via the split-variable QP.
struct StochasticPerturbation {
    Vector delta;
    Scalar feasibility_residual = 0;  // max violation over the constraints
    Scalar stationarity_residual = 0; // projected-gradient fixed-point residual
};

/// Random simplex-preserving perturbation of a stochastic vector. The QP
/// min ||(s+ - s-) - b||^2 over e^T s+ + e^T s- = sigma, e^T s+ = e^T s-,
/// s+ - s- >= -u, s+, s- >= 0 is solved by projected gradient with Dykstra
/// alternation for the projection. Throws DataError when sigma >= 2 (the
/// set is empty) or sigma < 0.
StochasticPerturbation perturb_stochastic(Eigen::Ref<const Vector> u, Scalar sigma,
                                          std::uint64_t seed);

/// Perturbs every non-dangling fiber inside its own simplex, splitting
/// `sigma_total` equally across the ordered non-dangling fibers, so the
/// entrywise column-sum budget ||R(dPbar)||_1 equals sigma_total. The result
/// stays columnwise-substochastic.
SparseKTensor perturb_tensor(const SparseKTensor& pbar, Scalar sigma_total,
                             std::uint64_t seed);

/// The proven sensitivity bound
/// (2k-3)/((k-1)(1-varsigma)) (alpha/(1-alpha) ||R(dPbar)||_1 + ||dv||_1).
Scalar perturbation_bound(int k, Scalar alpha, Scalar dpbar_norm, Scalar dv_norm);

struct PerturbationRow {
    Scalar sigma = 0;
    PerturbTarget mode = PerturbTarget::Both;
    Scalar mean_dy = 0;      // mean ||dy||_1 over trials
    Scalar max_dy = 0;
    Scalar bound = 0;
    int trials = 0;
};

/// Log-spaced sigma grid (inclusive endpoints).
std::vector<Scalar> sigma_grid(Scalar lo = 1e-4, Scalar hi = 1e-1, int points = 13);

/// For each sigma and each requested target mode, re-solves `trials`
/// perturbed copies of the problem and tabulates mean ||dy||_1 against the
/// theoretical bound. Requires varsigma < 1 (throws DataError otherwise).
std::vector<PerturbationRow> perturbation_experiment(
    const PageRankProblem& problem, const std::vector<Scalar>& sigmas,
    std::vector<PerturbTarget> targets, int trials, std::uint64_t seed,
    int threads = 1, const SolveOptions& solve = {});

}  // namespace hyperrank
