#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "savo/image.hpp"

/// Text/background separation with fuzzy C-means over per-pixel neighbourhood statistics.
namespace savo::binarization {

/// Standard deviation and base-2 entropy (8 equal bins over [0, 255]) of a pixel's
/// eight neighbours.
struct PixelFeature {
    double stddev = 0.0;
    double entropy = 0.0;
};

/// One feature per region pixel, row-major. Neighbours outside the region are
/// replicated from the region edge so the result depends only on region contents.
std::vector<PixelFeature> pixel_features(const GrayImage& gray, const Box& region);

using Point = std::vector<double>;

struct FcmConfig {
    int c = 2;
    double m = 2.0;
    double tol = 1e-4;
    int max_iter = 100;
    std::uint64_t seed = 1;
};

struct FcmResult {
    std::vector<Point> centers;
    /// memberships[i][k]: point i, cluster k.
    std::vector<std::vector<double>> memberships;
    std::vector<double> objective_history;
    int iterations = 0;
};

/// Membership row of one point given the centres: u_k = 1 / sum_j (d_k / d_j)^(2/(m-1)).
/// A point sitting on centres gets full membership, shared equally among coincident ones.
std::vector<double> fcm_memberships(std::span<const double> point, std::span<const Point> centers, double m);

FcmResult fuzzy_cmeans(std::span<const Point> points, const FcmConfig& config);

struct BinarizeConfig {
    double m = 2.0;
    double tol = 1e-4;
    int max_iter = 100;
    std::uint64_t seed = 1;
};

/// Region-sized mask, 1 = ink. FCM splits pixels into a high-variation (stroke
/// boundary) cluster and a flat cluster; the gray levels on either side of the
/// boundary cluster fix text polarity and the ink threshold. Flat regions are all
/// background.
BinaryImage binarize_region(const GrayImage& gray, const Box& region, const BinarizeConfig& config = {});

}  // namespace savo::binarization
