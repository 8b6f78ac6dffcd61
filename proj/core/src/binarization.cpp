#include "savo/binarization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "savo/imaging.hpp"

namespace savo::binarization {

namespace {

constexpr double kZeroDistance = 1e-12;

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<PixelFeature> pixel_features(const GrayImage& gray, const Box& region) {
    if (region.width() < 3 || region.height() < 3) {
        throw Error(ErrorCode::RegionTooSmall, "region must be at least 3x3");
    }
    if (region.x0 < 0 || region.y0 < 0 || region.x1 >= gray.width() || region.y1 >= gray.height()) {
        throw Error(ErrorCode::OutOfBounds, "region outside image");
    }
    std::vector<PixelFeature> out;
    out.reserve(static_cast<std::size_t>(region.area()));
    std::array<double, 8> nb{};
    for (int y = region.y0; y <= region.y1; ++y) {
        for (int x = region.x0; x <= region.x1; ++x) {
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = std::clamp(x + dx, region.x0, region.x1);
                    const int ny = std::clamp(y + dy, region.y0, region.y1);
                    nb[static_cast<std::size_t>(n++)] = gray.at(nx, ny);
                }
            }
            double mean = 0.0;
            for (double v : nb) mean += v;
            mean /= 8.0;
            double var = 0.0;
            std::array<int, 8> bins{};
            for (double v : nb) {
                var += (v - mean) * (v - mean);
                const int b = std::clamp(static_cast<int>(std::floor(v / 32.0)), 0, 7);
                ++bins[static_cast<std::size_t>(b)];
            }
            double entropy = 0.0;
            for (int c : bins) {
                if (c == 0) continue;
                const double p = c / 8.0;
                entropy -= p * std::log2(p);
            }
            out.push_back(PixelFeature{std::sqrt(var / 8.0), entropy});
        }
    }
    return out;
}

std::vector<double> fcm_memberships(std::span<const double> point, std::span<const Point> centers, double m) {
    if (!(m > 1.0)) throw Error(ErrorCode::BadFuzzifier, "fuzzifier must be > 1");
    const std::size_t c = centers.size();
    std::vector<double> d(c);
    std::vector<std::size_t> hits;
    for (std::size_t k = 0; k < c; ++k) {
        d[k] = std::sqrt(squared_distance(point, centers[k]));
        if (d[k] < kZeroDistance) hits.push_back(k);
    }
    std::vector<double> u(c, 0.0);
    if (!hits.empty()) {
        for (auto k : hits) u[k] = 1.0 / static_cast<double>(hits.size());
        return u;
    }
    const double exponent = 2.0 / (m - 1.0);
    for (std::size_t k = 0; k < c; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < c; ++j) s += std::pow(d[k] / d[j], exponent);
        u[k] = 1.0 / s;
    }
    return u;
}

FcmResult fuzzy_cmeans(std::span<const Point> points, const FcmConfig& config) {
    if (!(config.m > 1.0)) throw Error(ErrorCode::BadFuzzifier, "fuzzifier must be > 1");
    if (config.c < 2) throw Error(ErrorCode::BadArgument, "need at least two clusters");
    if (points.size() < static_cast<std::size_t>(config.c)) {
        throw Error(ErrorCode::TooFewPoints, "fewer points than clusters");
    }
    const std::size_t dim = points.front().size();
    for (const auto& p : points) {
        if (p.size() != dim) throw Error(ErrorCode::DimensionMismatch, "points differ in dimension");
    }
    const std::size_t n = points.size();
    const auto c = static_cast<std::size_t>(config.c);

    FcmResult r;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    r.memberships.assign(n, std::vector<double>(c));
    for (auto& row : r.memberships) {
        double s = 0.0;
        for (auto& v : row) s += (v = unit(rng));
        for (auto& v : row) v /= s;
    }

    r.centers.assign(c, Point(dim, 0.0));
    for (int it = 0; it < config.max_iter; ++it) {
        for (std::size_t k = 0; k < c; ++k) {
            Point num(dim, 0.0);
            double den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double w = std::pow(r.memberships[i][k], config.m);
                den += w;
                for (std::size_t d = 0; d < dim; ++d) num[d] += w * points[i][d];
            }
            if (den > 0.0) {
                for (auto& v : num) v /= den;
                r.centers[k] = std::move(num);
            }
        }
        double change = 0.0;
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto u = fcm_memberships(points[i], r.centers, config.m);
            for (std::size_t k = 0; k < c; ++k) {
                change = std::max(change, std::abs(u[k] - r.memberships[i][k]));
                objective += std::pow(u[k], config.m) * squared_distance(points[i], r.centers[k]);
            }
            r.memberships[i] = std::move(u);
        }
        r.objective_history.push_back(objective);
        r.iterations = it + 1;
        if (change < config.tol) break;
    }
    return r;
}

BinaryImage binarize_region(const GrayImage& gray, const Box& region, const BinarizeConfig& config) {
    const auto features = pixel_features(gray, region);
    BinaryImage out(region.width(), region.height());

    const bool flat = std::all_of(features.begin(), features.end(), [&](const PixelFeature& f) {
        return f.stddev == features.front().stddev && f.entropy == features.front().entropy;
    });
    if (flat) return out;

    std::vector<Point> points;
    points.reserve(features.size());
    for (const auto& f : features) points.push_back({f.stddev, f.entropy});
    const FcmResult fcm = fuzzy_cmeans(points, FcmConfig{2, config.m, config.tol, config.max_iter, config.seed});
    const std::size_t text = fcm.centers[1][0] > fcm.centers[0][0] ? 1 : 0;

    std::vector<double> zone;
    std::vector<double> rest;
    std::vector<double> intensity;
    intensity.reserve(features.size());
    for (int y = region.y0; y <= region.y1; ++y) {
        for (int x = region.x0; x <= region.x1; ++x) intensity.push_back(gray.at(x, y));
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& u = fcm.memberships[i];
        (u[text] >= u[1 - text] ? zone : rest).push_back(intensity[i]);
    }
    if (zone.empty() || rest.empty()) return out;

    const double background = median(rest);
    double signed_sum = 0.0;
    for (double v : zone) signed_sum += v - background;
    const double polarity = signed_sum >= 0.0 ? 1.0 : -1.0;

    std::vector<double> contrast;
    for (double v : zone) {
        const double c = (v - background) * polarity;
        if (c > 0.0) contrast.push_back(c);
    }
    if (contrast.empty()) return out;
    std::sort(contrast.begin(), contrast.end());
    const double text_contrast = contrast[static_cast<std::size_t>(0.9 * static_cast<double>(contrast.size() - 1))];
    const double cut = 0.5 * text_contrast;
    if (cut <= 0.0) return out;

    auto dst = out.pixels();
    for (std::size_t i = 0; i < intensity.size(); ++i) {
        dst[i] = (intensity[i] - background) * polarity >= cut ? 1 : 0;
    }
    return out;
}

}  // namespace savo::binarization
