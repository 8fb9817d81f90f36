#include "hyperrank/subspace.hpp"

#include "hyperrank/rng.hpp"
#include "hyperrank/threading.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hyperrank {

namespace {

// line inclination angles from the experiment setup
constexpr std::array<Scalar, 4> kAngles = {std::numbers::pi / 9.0, 0.0,
                                           -7.0 * std::numbers::pi / 18.0,
                                           -std::numbers::pi / 2.0};
// segment centers chosen so every cluster stays well away from the other
// clusters' infinite lines
constexpr std::array<std::array<Scalar, 2>, 4> kCenters = {
    {{-11.0, 11.5}, {-10.0, -8.5}, {11.5, 8.5}, {0.5, 3.0}}};
constexpr Scalar kHalfLength = 5.0;

}  // namespace

int PointSet::labeled_count() const {
    return static_cast<int>(std::count_if(labels.begin(), labels.end(),
                                          [](int l) { return l != kOutlier; }));
}

LineFit line_fit_cost(Eigen::Ref<const Eigen::MatrixXd> pts) {
    const Eigen::Index d = pts.rows();
    const Eigen::Index m = pts.cols();
    if (d < 2) throw DataError("line fit needs dimension >= 2");
    if (m < 2) throw DataError("line fit needs at least 2 points");

    LineFit fit;
    fit.center = pts.rowwise().mean();
    const Eigen::MatrixXd u = pts.colwise() - fit.center.col(0);
    const Eigen::MatrixXd scatter = u * u.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter);
    const Eigen::Index top = d - 1;  // eigenvalues ascending
    fit.direction = eig.eigenvectors().col(top);
    fit.cost = std::max(0.0, scatter.trace() - eig.eigenvalues()[top]);
    if (eig.eigenvalues()[top] <= 0.0) {
        // all points identical: cost 0, direction arbitrary unit vector
        fit.direction = Eigen::VectorXd::Unit(d, 0);
        fit.cost = 0.0;
    }
    return fit;
}

PointSet generate_instance(int n, std::uint64_t seed, Scalar noise_variance) {
    if (n < 20) throw DataError("instance needs at least 20 points");
    if (noise_variance < 0.0) throw DataError("noise variance must be nonnegative");
    Rng rng(mix_seed(seed, 0x9071));
    const int per_cluster = n / 5;
    const int outliers = n - 4 * per_cluster;
    const Scalar noise_sd = std::sqrt(noise_variance);

    PointSet ps;
    ps.points.resize(2, n);
    ps.labels.resize(static_cast<std::size_t>(n));

    int col = 0;
    for (int c = 0; c < 4; ++c) {
        const Scalar dx = std::cos(kAngles[static_cast<std::size_t>(c)]);
        const Scalar dy = std::sin(kAngles[static_cast<std::size_t>(c)]);
        for (int i = 0; i < per_cluster; ++i) {
            // evenly spread along the segment; noise supplies the scatter
            const Scalar t = per_cluster == 1
                                 ? 0.0
                                 : -kHalfLength + 2.0 * kHalfLength * static_cast<Scalar>(i) /
                                                      static_cast<Scalar>(per_cluster - 1);
            Scalar x = kCenters[static_cast<std::size_t>(c)][0] + t * dx;
            Scalar y = kCenters[static_cast<std::size_t>(c)][1] + t * dy;
            if (noise_sd > 0.0) {
                x += noise_sd * rng.normal();
                y += noise_sd * rng.normal();
            }
            ps.points.col(col) << x, y;
            ps.labels[static_cast<std::size_t>(col)] = c;
            ++col;
        }
    }

    // outliers: uniform over the bounding box of the noise-free segments
    Scalar lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (int c = 0; c < 4; ++c) {
        const Scalar dx = std::cos(kAngles[static_cast<std::size_t>(c)]) * kHalfLength;
        const Scalar dy = std::sin(kAngles[static_cast<std::size_t>(c)]) * kHalfLength;
        for (const Scalar s : {-1.0, 1.0}) {
            lo_x = std::min(lo_x, kCenters[static_cast<std::size_t>(c)][0] + s * dx);
            hi_x = std::max(hi_x, kCenters[static_cast<std::size_t>(c)][0] + s * dx);
            lo_y = std::min(lo_y, kCenters[static_cast<std::size_t>(c)][1] + s * dy);
            hi_y = std::max(hi_y, kCenters[static_cast<std::size_t>(c)][1] + s * dy);
        }
    }
    for (int i = 0; i < outliers; ++i) {
        ps.points.col(col) << rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y);
        ps.labels[static_cast<std::size_t>(col)] = PointSet::kOutlier;
        ++col;
    }
    return ps;
}

UniformHypergraph build_random_hypergraph(const PointSet& ps, std::uint64_t seed, int threads) {
    const int n = ps.size();
    if (n < 3) throw DataError("random hypergraph needs at least 3 points");
    Rng rng(mix_seed(seed, 0x28d3));

    // one candidate per pair of the complete graph: the pair plus a random
    // distinct third vertex
    struct Candidate {
        VertexId a, b, c;
    };
    std::vector<Candidate> cands;
    cands.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (VertexId i = 0; i < n; ++i) {
        for (VertexId j = i + 1; j < n; ++j) {
            auto t = static_cast<VertexId>(rng.below(static_cast<std::uint64_t>(n - 2)));
            if (t >= i) ++t;
            if (t >= j) ++t;
            if (t == i || t == j) throw Error("third-vertex draw failed");  // unreachable
            cands.push_back({i, j, t});
        }
    }

    std::vector<Scalar> cost(cands.size());
    parallel_for(static_cast<std::int64_t>(cands.size()), threads, [&](std::int64_t i) {
        const auto& c = cands[static_cast<std::size_t>(i)];
        Eigen::Matrix<Scalar, 2, 3> tri;
        tri.col(0) = ps.points.col(c.a);
        tri.col(1) = ps.points.col(c.b);
        tri.col(2) = ps.points.col(c.c);
        cost[static_cast<std::size_t>(i)] = line_fit_cost(tri).cost;
    });

    const auto m = static_cast<std::size_t>(
        static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 40);
    std::vector<std::uint32_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t x, std::uint32_t y) { return cost[x] < cost[y]; });

    // lowest-cost m candidates, deduplicated after selection
    UniformHypergraph h(n, 3, false);
    std::vector<VertexId> tri(3);
    for (std::size_t i = 0; i < std::min(m, order.size()); ++i) {
        const auto& c = cands[order[i]];
        tri = {c.a, c.b, c.c};
        std::sort(tri.begin(), tri.end());
        try {
            h.add_edge(tri, 1.0);
        } catch (const DataError&) {
            // duplicate triple selected twice; a single edge remains
        }
    }
    return h;
}

SubspaceScore cluster_and_score(const PointSet& ps, int parts, std::uint64_t seed,
                                RankMethod method, int threads) {
    const UniformHypergraph h = build_random_hypergraph(ps, seed, threads);
    PartitionOptions opts;
    opts.method = method;
    opts.seed = mix_seed(seed, 0x9a27);
    const PartitionResult pr = recursive_partition(h, parts, opts);

    SubspaceScore score;
    score.parts_found = static_cast<int>(pr.parts.size());
    if (!pr.reached_target) score.diagnostic = pr.diagnostic;

    // best assignment of clusters to parts over all permutations (parts that
    // fall off the end of a permutation count nothing)
    std::vector<int> part_of(static_cast<std::size_t>(ps.size()), -1);
    for (std::size_t p = 0; p < pr.parts.size(); ++p) {
        for (VertexId v : pr.parts[p]) part_of[static_cast<std::size_t>(v)] = static_cast<int>(p);
    }
    const int nclusters = 4;
    if (pr.parts.size() > 8) throw Error("scoring supports at most 8 parts");
    std::vector<std::array<int, 4>> hits(pr.parts.size(), {0, 0, 0, 0});
    for (int i = 0; i < ps.size(); ++i) {
        const int lab = ps.labels[static_cast<std::size_t>(i)];
        if (lab == PointSet::kOutlier) continue;
        const int p = part_of[static_cast<std::size_t>(i)];
        if (p >= 0) ++hits[static_cast<std::size_t>(p)][static_cast<std::size_t>(lab)];
    }
    std::vector<int> perm(pr.parts.size());
    std::iota(perm.begin(), perm.end(), 0);
    int best = 0;
    do {
        int total = 0;
        for (int c = 0; c < std::min<int>(nclusters, static_cast<int>(perm.size())); ++c) {
            total += hits[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])]
                         [static_cast<std::size_t>(c)];
        }
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));

    score.success_ratio = ps.labeled_count() > 0
                              ? static_cast<Scalar>(best) / static_cast<Scalar>(ps.labeled_count())
                              : 0.0;
    return score;
}

void save_points_csv(const PointSet& ps, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write points file: " + path.string());
    out << "x,y,label\n" << std::setprecision(17);
    for (int i = 0; i < ps.size(); ++i) {
        out << ps.points(0, i) << ',' << ps.points(1, i) << ','
            << ps.labels[static_cast<std::size_t>(i)] << "\n";
    }
}

PointSet load_points_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open points file: " + path.string());
    std::string line;
    std::vector<std::array<Scalar, 2>> pts;
    std::vector<int> labels;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("x,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream ls(line);
        std::string fx, fy, fl;
        if (!std::getline(ls, fx, ',') || !std::getline(ls, fy, ',') || !std::getline(ls, fl)) {
            throw DataError(path.string() + ": malformed point line: " + line);
        }
        pts.push_back({std::stod(fx), std::stod(fy)});
        labels.push_back(std::stoi(fl));
    }
    PointSet ps;
    ps.points.resize(2, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ps.points.col(static_cast<Eigen::Index>(i)) << pts[i][0], pts[i][1];
    }
    ps.labels = std::move(labels);
    return ps;
}

}  // namespace hyperrank
