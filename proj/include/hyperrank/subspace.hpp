#pragma once

#include "hyperrank/common.hpp"
#include "hyperrank/hypergraph.hpp"
#include "hyperrank/partition.hpp"

#include <filesystem>
#include <vector>

namespace hyperrank {

/// Planar point set with ground-truth cluster labels; -1 marks outliers.
struct PointSet {
    static constexpr int kOutlier = -1;
    Eigen::Matrix2Xd points;
    std::vector<int> labels;

    int size() const { return static_cast<int>(points.cols()); }
    int labeled_count() const;
};

struct LineFit {
    Scalar cost = 0;              // trace(U^T U) - vhat^T U U^T vhat >= 0
    Eigen::VectorXd center;       // uhat0, the mean
    Eigen::VectorXd direction;    // top eigenvector of U U^T, unit norm
};

/// Least-squares line fit through >= 2 points (columns of `pts`, any
/// dimension >= 2). Identical points give cost 0 and an arbitrary unit
/// direction.
LineFit line_fit_cost(Eigen::Ref<const Eigen::MatrixXd> pts);

/// Four nearly-collinear clusters of floor(n/5) points each on lines with
/// inclination angles pi/9, 0, -7pi/18, -pi/2, plus uniform outliers over
/// the segments' bounding box. `noise_variance` is the per-coordinate
/// Gaussian variance (the experiments use 1/2; 0 gives exact collinearity).
PointSet generate_instance(int n, std::uint64_t seed, Scalar noise_variance = 0.5);

/// The two-step random hypergraph: every vertex pair plus one random
/// distinct third vertex forms a candidate; the floor(n(n-1)/40)
/// smallest-cost candidates become unit-weight 3-edges (deduplicated after
/// selection).
UniformHypergraph build_random_hypergraph(const PointSet& ps, std::uint64_t seed,
                                          int threads = 1);

struct SubspaceScore {
    Scalar success_ratio = 0;
    int parts_found = 0;
    std::string diagnostic;
};

/// Runs build_random_hypergraph + recursive_partition and scores the best
/// part-to-cluster matching over non-outlier points.
SubspaceScore cluster_and_score(const PointSet& ps, int parts, std::uint64_t seed,
                                RankMethod method = RankMethod::Mlppr, int threads = 1);

/// Instance dump/load: CSV `x,y,label`.
void save_points_csv(const PointSet& ps, const std::filesystem::path& path);
PointSet load_points_csv(const std::filesystem::path& path);

}  // namespace hyperrank
