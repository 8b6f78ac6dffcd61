#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "savo/image.hpp"

/// Caption detection: multi-frame integration, band statistics on the HSV value and
/// Sobel edge images, a 10-3-1 back-propagation network, and row/column mask merging.
namespace savo::localization {

enum class MfiStatistic { Median, Mean };

GrayImage integrate_frames(std::span<const GrayImage> frames, MfiStatistic stat = MfiStatistic::Median);
ColorImage integrate_frames(std::span<const ColorImage> frames, MfiStatistic stat = MfiStatistic::Median);

enum class Axis { Rows, Cols };

/// A run of rows (Axis::Rows) or columns (Axis::Cols). `span_begin`/`span_end` restrict
/// the orthogonal extent, e.g. the rows of a window when scanning columns; -1 means full.
struct Band {
    Axis axis = Axis::Rows;
    int start = 0;
    int length = 0;
    int span_begin = -1;
    int span_end = -1;
};

inline constexpr std::size_t kBandFeatureCount = 10;

/// For the value image then the edge image: mean, 2nd and 3rd central moments,
/// and the 95% interval mean -/+ 1.96 sigma.
struct BandFeatures {
    std::array<double, kBandFeatureCount> values{};
};

BandFeatures band_features(const GrayImage& value, const GrayImage& edges, const Band& band);

/// Topology is fixed at 10 -> 3 -> 1 with logistic units. Inputs are standardised with
/// `input_mean` / `input_scale` before the first layer.
struct MlpModel {
    static constexpr int kInputs = 10;
    static constexpr int kHidden = 3;

    std::array<std::array<double, kInputs>, kHidden> w1{};
    std::array<double, kHidden> b1{};
    std::array<double, kHidden> w2{};
    double b2 = 0.0;
    std::array<double, kInputs> input_mean{};
    std::array<double, kInputs> input_scale{1, 1, 1, 1, 1, 1, 1, 1, 1, 1};

    friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

double mlp_forward(const MlpModel& model, std::span<const double> x);

/// d(0.5 * (y - target)^2) / d(parameter), same layout as MlpModel's weights.
struct MlpGradient {
    std::array<std::array<double, MlpModel::kInputs>, MlpModel::kHidden> w1{};
    std::array<double, MlpModel::kHidden> b1{};
    std::array<double, MlpModel::kHidden> w2{};
    double b2 = 0.0;
};

double mlp_loss(const MlpModel& model, std::span<const double> x, double target);
MlpGradient mlp_gradient(const MlpModel& model, std::span<const double> x, double target);

struct TrainingSample {
    BandFeatures features;
    int label = 0;
};

struct MlpTrainConfig {
    int epochs = 200;
    double lr = 0.1;
    std::uint64_t seed = 1;
};

struct MlpTrainResult {
    MlpModel model;
    std::vector<double> loss_history;  // mean squared-error loss per epoch
};

/// Stochastic back-propagation on squared error; sample order shuffled per epoch.
MlpTrainResult mlp_train(std::span<const TrainingSample> data, const MlpTrainConfig& config);

std::string mlp_to_json(const MlpModel& model);
MlpModel mlp_from_json(const std::string& text);

/// Consecutive bands of `band_height` along the axis; the final band may be shorter.
std::vector<Band> make_bands(Axis axis, int extent, int band_height, int span_begin = -1, int span_end = -1);

struct BandDecision {
    Band band;
    double score = 0.0;
    bool text = false;
};

std::vector<BandDecision> score_bands(const GrayImage& value, const GrayImage& edges, const MlpModel& model,
                                      std::span<const Band> bands, double threshold);

/// Text flag per band along `axis` of the full frame.
std::vector<bool> classify_bands(const ColorImage& frame, const MlpModel& model, Axis axis, int band_height,
                                 double threshold = 0.5);

struct TextRegion {
    Box box;
    int frame_first = 0;
    int frame_last = 0;
    double score = 0.0;
};

/// Pixel (x, y) is text iff rows[y] && cols[x]; 8-connected groups of at least
/// `min_area` pixels become regions.
std::vector<TextRegion> merge_masks(const std::vector<bool>& rows, const std::vector<bool>& cols, int width,
                                    int height, int min_area = 64);

/// Expands per-band flags into per-pixel flags.
std::vector<bool> expand_band_mask(std::span<const Band> bands, const std::vector<bool>& flags, int extent);

/// Sets runs of at most `max_gap` false bands lying between true bands.
void fill_gaps(std::vector<bool>& flags, int max_gap);

struct LocalizeConfig {
    int band_height = 4;
    double threshold = 0.5;
    int min_area = 64;
    int row_gap_fill = 1;
    int col_gap_fill = 2;
};

/// Rows are classified over the full frame; each run of text rows forms a window whose
/// columns are classified next, and the two masks are merged per window.
std::vector<TextRegion> localize_text(const ColorImage& frame, const MlpModel& model, const LocalizeConfig& config);

/// Value-channel and Sobel images used by the band classifier.
struct BandImages {
    GrayImage value;
    GrayImage edges;
};
BandImages band_images(const ColorImage& frame);

}  // namespace savo::localization
