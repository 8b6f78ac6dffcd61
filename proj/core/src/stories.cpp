#include "savo/stories.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace savo::stories {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double distance(std::span<const double> a, std::span<const double> b) noexcept {
    return std::sqrt(squared_distance(a, b));
}

void check_uniform_dims(std::span<const Vector> points) {
    if (points.empty()) throw Error(ErrorCode::EmptyInput, "no points");
    const std::size_t dim = points.front().size();
    if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "zero-dimensional points");
    for (const auto& p : points) {
        if (p.size() != dim) throw Error(ErrorCode::DimensionMismatch, "points differ in dimension");
    }
}

std::vector<Vector> cluster_means(std::span<const Vector> points, std::span<const int> assignment, int k,
                                  std::vector<int>& counts) {
    const std::size_t dim = points.front().size();
    std::vector<Vector> means(static_cast<std::size_t>(k), Vector(dim, 0.0));
    counts.assign(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto c = static_cast<std::size_t>(assignment[i]);
        ++counts[c];
        for (std::size_t d = 0; d < dim; ++d) means[c][d] += points[i][d];
    }
    for (std::size_t c = 0; c < means.size(); ++c) {
        if (counts[c] == 0) continue;
        for (auto& v : means[c]) v /= counts[c];
    }
    return means;
}

double within_cluster_ss(std::span<const Vector> points, const Clustering& cl) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        s += squared_distance(points[i], cl.centroids[static_cast<std::size_t>(cl.assignment[i])]);
    }
    return s;
}

}  // namespace

SomGrid::SomGrid(int rows, int cols, int dim, std::vector<Vector> weights)
    : rows_(rows), cols_(cols), dim_(dim), weights_(std::move(weights)) {
    if (rows < 1 || cols < 1 || rows * cols < 2) {
        throw Error(ErrorCode::BadArgument, "SOM grid needs at least two nodes");
    }
    if (weights_.size() != static_cast<std::size_t>(rows * cols)) {
        throw Error(ErrorCode::DimensionMismatch, "SOM weight count does not match grid");
    }
    for (const auto& w : weights_) {
        if (static_cast<int>(w.size()) != dim) {
            throw Error(ErrorCode::DimensionMismatch, "SOM weight length does not match dim");
        }
    }
}

int SomGrid::best_matching_unit(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "input length does not match SOM dim");
    }
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int n = 0; n < node_count(); ++n) {
        const double d = squared_distance(x, weights_[static_cast<std::size_t>(n)]);
        if (d < best_d) {
            best_d = d;
            best = n;
        }
    }
    return best;
}

int som_update(SomGrid& grid, std::span<const double> x, double lr, double sigma, double radius) {
    const int bmu = grid.best_matching_unit(x);
    const int br = bmu / grid.cols();
    const int bc = bmu % grid.cols();
    const double two_sigma2 = 2.0 * std::max(sigma, 1e-12) * std::max(sigma, 1e-12);
    for (int n = 0; n < grid.node_count(); ++n) {
        const int dr = n / grid.cols() - br;
        const int dc = n % grid.cols() - bc;
        const double grid_d2 = static_cast<double>(dr * dr + dc * dc);
        if (std::sqrt(grid_d2) > radius && n != bmu) continue;
        const double coef = lr * std::exp(-grid_d2 / two_sigma2);
        auto& w = grid.weights()[static_cast<std::size_t>(n)];
        for (std::size_t d = 0; d < w.size(); ++d) w[d] = (1.0 - coef) * w[d] + coef * x[d];
    }
    return bmu;
}

SomGrid train_som(std::span<const ShotVector> shots, const SomConfig& config) {
    if (shots.empty()) throw Error(ErrorCode::EmptyInput, "no shot vectors");
    if (config.epochs < 1) throw Error(ErrorCode::BadArgument, "epochs must be >= 1");
    if (!(config.lr0 > 0.0 && config.lr0 <= 1.0)) {
        throw Error(ErrorCode::BadArgument, "lr0 must lie in (0, 1]");
    }
    const std::size_t dim = shots.front().features.size();
    if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "empty shot vector");
    for (const auto& s : shots) {
        if (s.features.size() != dim) throw Error(ErrorCode::DimensionMismatch, "shot vectors differ in length");
    }

    std::mt19937_64 rng(config.seed);
    Vector lo(dim, std::numeric_limits<double>::infinity());
    Vector hi(dim, -std::numeric_limits<double>::infinity());
    for (const auto& s : shots) {
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], s.features[d]);
            hi[d] = std::max(hi[d], s.features[d]);
        }
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vector> weights(static_cast<std::size_t>(config.rows) * config.cols, Vector(dim));
    for (auto& w : weights) {
        for (std::size_t d = 0; d < dim; ++d) w[d] = lo[d] + unit(rng) * (hi[d] - lo[d]);
    }
    SomGrid grid(config.rows, config.cols, static_cast<int>(dim), std::move(weights));

    std::vector<std::size_t> order(shots.size());
    std::iota(order.begin(), order.end(), 0);
    const double total = static_cast<double>(config.epochs) * static_cast<double>(shots.size());
    double step = 0.0;
    for (int e = 0; e < config.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (auto i : order) {
            const double remaining = 1.0 - step / total;
            const double radius = config.radius0 * remaining;
            som_update(grid, shots[i].features, config.lr0 * remaining, radius, radius);
            step += 1.0;
        }
    }
    return grid;
}

Clustering cmeans(std::span<const Vector> points, int k, const CMeansConfig& config) {
    if (k < 1) throw Error(ErrorCode::BadK, "k must be >= 1");
    if (points.size() < static_cast<std::size_t>(k)) {
        throw Error(ErrorCode::TooFewPoints, "k exceeds the number of points");
    }
    check_uniform_dims(points);
    const std::size_t n = points.size();

    // k-means++ seeding
    std::mt19937_64 rng(config.seed);
    Clustering cl;
    cl.k = k;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    cl.centroids.push_back(points[pick(rng)]);
    std::vector<double> d2(n);
    while (cl.centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : cl.centroids) best = std::min(best, squared_distance(points[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t chosen = 0;
        if (total <= 0.0) {
            chosen = pick(rng);
        } else {
            double target = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (chosen = 0; chosen + 1 < n; ++chosen) {
                target -= d2[chosen];
                if (target <= 0.0 && d2[chosen] > 0.0) break;
            }
        }
        cl.centroids.push_back(points[chosen]);
    }

    cl.assignment.assign(n, 0);
    std::vector<int> counts;
    for (int it = 0; it < config.max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = squared_distance(points[i], cl.centroids[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            cl.assignment[i] = best;
        }
        cluster_means(points, cl.assignment, k, counts);
        // Re-seed empty clusters from the point farthest from its own centroid.
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[static_cast<std::size_t>(cl.assignment[i])] < 2) continue;
                const double d = squared_distance(points[i], cl.centroids[static_cast<std::size_t>(cl.assignment[i])]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --counts[static_cast<std::size_t>(cl.assignment[far])];
            cl.assignment[far] = c;
            counts[static_cast<std::size_t>(c)] = 1;
        }
        auto means = cluster_means(points, cl.assignment, k, counts);
        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            shift = std::max(shift, distance(means[static_cast<std::size_t>(c)], cl.centroids[static_cast<std::size_t>(c)]));
        }
        cl.centroids = std::move(means);
        cl.objective_history.push_back(within_cluster_ss(points, cl));
        if (shift < config.tol) break;
    }
    return cl;
}

double davies_bouldin(const Clustering& clustering, std::span<const Vector> points) {
    const int k = clustering.k;
    if (k < 2) throw Error(ErrorCode::BadK, "Davies-Bouldin needs k >= 2");
    check_uniform_dims(points);
    if (clustering.assignment.size() != points.size()) {
        throw Error(ErrorCode::DimensionMismatch, "assignment length does not match points");
    }
    for (int label : clustering.assignment) {
        if (label < 0 || label >= k) throw Error(ErrorCode::BadArgument, "cluster label out of range");
    }
    std::vector<int> counts;
    auto centroids = cluster_means(points, clustering.assignment, k, counts);
    for (int c : counts) {
        if (c == 0) throw Error(ErrorCode::DegenerateClusters, "empty cluster");
    }
    Vector scatter(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto c = static_cast<std::size_t>(clustering.assignment[i]);
        scatter[c] += distance(points[i], centroids[c]);
    }
    for (int c = 0; c < k; ++c) scatter[static_cast<std::size_t>(c)] /= counts[static_cast<std::size_t>(c)];

    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        double worst = 0.0;
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            const double m = distance(centroids[static_cast<std::size_t>(i)], centroids[static_cast<std::size_t>(j)]);
            if (m <= 0.0) throw Error(ErrorCode::DegenerateClusters, "coincident centroids");
            worst = std::max(worst, (scatter[static_cast<std::size_t>(i)] + scatter[static_cast<std::size_t>(j)]) / m);
        }
        sum += worst;
    }
    return sum / k;
}

Selection select_clustering(std::span<const Vector> points, int k_max, const CMeansConfig& config) {
    if (k_max < 2) throw Error(ErrorCode::BadK, "k_max must be >= 2");
    if (points.size() < static_cast<std::size_t>(k_max)) {
        throw Error(ErrorCode::TooFewPoints, "k_max exceeds the number of points");
    }
    Selection best;
    best.db_index = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int k = 2; k <= k_max; ++k) {
        Clustering cl = cmeans(points, k, config);
        double db = std::numeric_limits<double>::infinity();
        try {
            db = davies_bouldin(cl, points);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateClusters) throw;
        }
        best.db_by_k.push_back(db);
        if (!found || db < best.db_index) {
            best.clustering = std::move(cl);
            best.db_index = db;
            found = true;
        }
    }
    return best;
}

double mean_pairwise_distance(std::span<const Vector> members) {
    const std::size_t n = members.size();
    if (n < 2) throw Error(ErrorCode::TooFewMembers, "need at least two members");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) sum += distance(members[i], members[j]);
    }
    return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

int select_anchor_cluster(std::span<const int> labels, int k, std::span<const Vector> shot_vectors,
                          int min_members) {
    if (labels.size() != shot_vectors.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one label per shot vector required");
    }
    std::vector<std::vector<Vector>> members(static_cast<std::size_t>(std::max(k, 0)));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= k) throw Error(ErrorCode::BadArgument, "label out of range");
        members[static_cast<std::size_t>(labels[i])].push_back(shot_vectors[i]);
    }
    int best = -1;
    double best_density = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
        const auto& m = members[static_cast<std::size_t>(c)];
        if (static_cast<int>(m.size()) < min_members || m.size() < 2) continue;
        const double density = mean_pairwise_distance(m);
        if (density < best_density) {
            best_density = density;
            best = c;
        }
    }
    if (best < 0) throw Error(ErrorCode::NoEligibleCluster, "no cluster has enough shots");
    return best;
}

std::vector<int> segment_stories(std::span<const int> shot_order, const std::vector<bool>& anchor) {
    if (anchor.size() != shot_order.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one anchor flag per shot required");
    }
    std::vector<int> boundaries;
    if (shot_order.empty()) return boundaries;
    if (!anchor.front()) boundaries.push_back(shot_order.front());
    for (std::size_t i = 0; i < shot_order.size(); ++i) {
        if (anchor[i] && (i == 0 || !anchor[i - 1])) boundaries.push_back(shot_order[i]);
    }
    return boundaries;
}

Vector rgb_histogram(const ColorImage& frame) {
    Vector hist(24, 0.0);
    if (frame.empty()) return hist;
    for (const auto& px : frame.pixels()) {
        hist[px.r / 32] += 1.0;
        hist[8 + px.g / 32] += 1.0;
        hist[16 + px.b / 32] += 1.0;
    }
    const double n = static_cast<double>(frame.size());
    for (auto& v : hist) v /= n;
    return hist;
}

StoryResult segment_program(std::span<const ShotVector> shots, const StoryConfig& config, const SomGrid* trained) {
    SomGrid grid = trained ? *trained : train_som(shots, config.som);
    const int k_max = std::min(config.k_max, grid.node_count());
    Selection sel = select_clustering(grid.weights(), k_max, config.cmeans);

    StoryResult result;
    result.k = sel.clustering.k;
    result.db_index = sel.db_index;
    std::vector<Vector> vectors;
    std::vector<int> order;
    for (const auto& s : shots) {
        const int node = grid.best_matching_unit(s.features);
        result.shot_labels.push_back(sel.clustering.assignment[static_cast<std::size_t>(node)]);
        vectors.push_back(s.features);
        order.push_back(s.id);
    }
    result.anchor_cluster =
        select_anchor_cluster(result.shot_labels, result.k, vectors, config.min_anchor_members);
    std::vector<bool> anchor;
    for (int label : result.shot_labels) anchor.push_back(label == result.anchor_cluster);
    result.boundaries = segment_stories(order, anchor);
    return result;
}

std::string som_to_json(const SomGrid& grid) {
    nlohmann::json j;
    j["version"] = "1";
    j["rows"] = grid.rows();
    j["cols"] = grid.cols();
    j["dim"] = grid.dim();
    j["weights"] = grid.weights();
    return j.dump(1);
}

SomGrid som_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        if (j.at("version").get<std::string>() != "1") {
            throw Error(ErrorCode::MalformedInput, "unsupported SOM model version");
        }
        return SomGrid(j.at("rows").get<int>(), j.at("cols").get<int>(), j.at("dim").get<int>(),
                       j.at("weights").get<std::vector<Vector>>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("bad SOM JSON: ") + e.what());
    }
}

std::string story_result_to_json(const StoryResult& result) {
    nlohmann::json j;
    j["version"] = "1";
    j["boundaries"] = result.boundaries;
    j["k"] = result.k;
    j["db_index"] = result.db_index;
    j["anchor_cluster"] = result.anchor_cluster;
    j["shot_labels"] = result.shot_labels;
    return j.dump(2);
}

std::vector<ShotVector> read_shot_csv(const std::string& text) {
    std::vector<ShotVector> shots;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        ShotVector shot;
        try {
            std::size_t used = 0;
            shot.id = std::stoi(cells.at(0), &used);
            for (std::size_t i = 1; i < cells.size(); ++i) shot.features.push_back(std::stod(cells[i]));
        } catch (const std::exception&) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw Error(ErrorCode::MalformedInput, "bad CSV row: " + line);
        }
        first = false;
        shots.push_back(std::move(shot));
    }
    return shots;
}

}  // namespace savo::stories
