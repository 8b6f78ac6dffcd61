#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "savo/image.hpp"

/// News-story segmentation: Kohonen map over shot vectors, C-means over the map
/// nodes chosen by Davies-Bouldin, and an anchor cluster picked by density.
namespace savo::stories {

using Vector = std::vector<double>;

struct ShotVector {
    int id = 0;
    Vector features;
};

struct SomConfig {
    int rows = 10;
    int cols = 10;
    int epochs = 50;
    double lr0 = 0.5;
    double radius0 = 5.0;
    std::uint64_t seed = 1;
};

class SomGrid {
public:
    SomGrid() = default;
    SomGrid(int rows, int cols, int dim, std::vector<Vector> weights);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int dim() const noexcept { return dim_; }
    int node_count() const noexcept { return rows_ * cols_; }
    const std::vector<Vector>& weights() const noexcept { return weights_; }
    std::vector<Vector>& weights() noexcept { return weights_; }

    /// Best-matching unit; ties go to the lower node index.
    int best_matching_unit(std::span<const double> x) const;

    friend bool operator==(const SomGrid&, const SomGrid&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    int dim_ = 0;
    std::vector<Vector> weights_;  // node index = r * cols + c
};

/// Online SOM with a Gaussian neighbourhood; learning rate and radius decay linearly to zero.
SomGrid train_som(std::span<const ShotVector> shots, const SomConfig& config);

/// Applies one update step of the SOM rule for input `x` at learning rate `lr`
/// and neighbourhood width `sigma`; returns the BMU.
int som_update(SomGrid& grid, std::span<const double> x, double lr, double sigma, double radius);

struct Clustering {
    int k = 0;
    std::vector<int> assignment;
    std::vector<Vector> centroids;
    /// Within-cluster sum of squares after each Lloyd iteration.
    std::vector<double> objective_history;
};

struct CMeansConfig {
    int max_iter = 100;
    double tol = 1e-6;
    std::uint64_t seed = 1;
};

/// Hard C-means (Lloyd) with seeded k-means++ initialisation.
Clustering cmeans(std::span<const Vector> points, int k, const CMeansConfig& config = {});

double davies_bouldin(const Clustering& clustering, std::span<const Vector> points);

struct Selection {
    Clustering clustering;
    double db_index = 0.0;
    std::vector<double> db_by_k;  // index 0 <-> k = 2
};

/// Runs cmeans for k = 2..k_max and keeps the lowest Davies-Bouldin index (ties -> smaller k).
Selection select_clustering(std::span<const Vector> points, int k_max, const CMeansConfig& config = {});

/// Mean Euclidean distance over all unordered pairs.
double mean_pairwise_distance(std::span<const Vector> members);

/// Among clusters with at least `min_members` shots, the one with the smallest mean
/// pairwise distance; ties go to the smaller label.
int select_anchor_cluster(std::span<const int> labels, int k, std::span<const Vector> shot_vectors,
                          int min_members = 4);

/// Story start shot ids: one per maximal run of anchor shots, plus a prologue at the first shot.
std::vector<int> segment_stories(std::span<const int> shot_order, const std::vector<bool>& anchor);

/// 3 x 8-bin normalised RGB histogram (24 values).
Vector rgb_histogram(const ColorImage& frame);

struct StoryConfig {
    SomConfig som;
    int k_max = 8;
    CMeansConfig cmeans;
    int min_anchor_members = 4;
};

struct StoryResult {
    std::vector<int> boundaries;
    int k = 0;
    double db_index = 0.0;
    int anchor_cluster = -1;
    std::vector<int> shot_labels;
};

/// Full chain; when `trained` is non-null it is used instead of training a new map.
StoryResult segment_program(std::span<const ShotVector> shots, const StoryConfig& config,
                            const SomGrid* trained = nullptr);

std::string som_to_json(const SomGrid& grid);
SomGrid som_from_json(const std::string& text);
std::string story_result_to_json(const StoryResult& result);

/// CSV rows `shot_id,f1,...,fn`; a non-numeric first line is treated as a header.
std::vector<ShotVector> read_shot_csv(const std::string& text);

}  // namespace savo::stories
