#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "savo/binarization.hpp"
#include "savo/features.hpp"
#include "savo/localization.hpp"
#include "savo/postprocess.hpp"
#include "savo/recognition.hpp"
#include "savo/script.hpp"

/// End-to-end orchestration: frames in, recognized caption words out.
namespace savo::pipeline {

struct PipelineConfig {
    localization::LocalizeConfig localize;
    /// Consecutive frames integrated into one image before localization.
    int mfi_window = 1;
    localization::MfiStatistic mfi_statistic = localization::MfiStatistic::Median;
    binarization::BinarizeConfig binarize;
    script::SegmentationConfig segmentation;
    recognition::KnnParams knn;
    int beam = 5;
    int max_distance = 1;
    /// Ranked classes kept per segment for word reconstruction.
    int max_hypotheses = 5;
    /// Lines are brought to this height before segmentation: enlarged by interpolation,
    /// reduced by nearest-neighbour sampling.
    int line_height = 26;
    /// Context added around each localized region before binarization.
    int region_padding = 3;
    std::optional<std::uint64_t> seed;
    /// Worker threads; 0 picks the hardware concurrency.
    int workers = 0;
    std::string lexicon;
    std::string models;
};

/// Flat `key = value` text; `#` starts a comment. Unknown keys and out-of-range
/// values raise BadArgument; a missing `seed` raises BadArgument as well.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);
/// Every key with its current value, in the format parse_config reads.
std::string config_to_text(const PipelineConfig& config);

struct Models {
    localization::MlpModel mlp;
    recognition::PrototypeStore store;
};

inline constexpr std::string_view kMlpFile = "mlp.json";
inline constexpr std::string_view kStoreFile = "knn.json";

/// Reads mlp.json and knn.json; MissingModel names the absent path.
Models load_models(const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Binarized, enlarged text line cut from a region of a grayscale frame.
struct PreparedLine {
    BinaryImage line;
    /// Ink bounding box in frame coordinates.
    Box ink_box;
};

/// Binarizes the padded region, crops to ink and normalizes the line height.
/// Returns nothing when the region holds no ink.
std::optional<PreparedLine> prepare_line(const GrayImage& gray, const Box& region, const PipelineConfig& config,
                                         std::uint64_t seed);

/// Top-ranked classes with positive membership, at most config.max_hypotheses.
std::vector<post::Candidate> segment_hypotheses(std::span<const double> features, const recognition::PrototypeStore& store,
                                                const PipelineConfig& config);

enum class Stage { Localize, Binarize, Segment, Features, Classify };
std::string_view to_string(Stage stage) noexcept;
std::optional<Stage> stage_from_string(std::string_view text) noexcept;

struct Detection {
    int region_id = 0;
    int frame_first = 0;
    int frame_last = 0;
    Box box;
    double score = 0.0;
    post::WordHypothesis word;
    std::vector<std::vector<post::Candidate>> segments;
};

struct RecognitionResult {
    std::vector<Detection> detections;
};

std::string result_to_json(const RecognitionResult& result);
RecognitionResult result_from_json(const std::string& text);

struct RunOptions {
    std::optional<std::filesystem::path> overlay_dir;
    std::vector<std::pair<Stage, std::filesystem::path>> dumps;
    /// Continue from a stage dump instead of recomputing everything up to that stage.
    std::optional<std::pair<Stage, std::filesystem::path>> resume;
};

using FrameLoader = std::function<ColorImage(std::size_t index)>;

/// Frames are grouped into integration windows and processed by a worker pool;
/// detections come out in window order whatever the completion order.
RecognitionResult run_pipeline(std::size_t frame_count, const FrameLoader& load, const PipelineConfig& config,
                               const Models& models, const post::Lexicon& lexicon, const RunOptions& options = {});

RecognitionResult run_pipeline(std::span<const ColorImage> frames, const PipelineConfig& config, const Models& models,
                               const post::Lexicon& lexicon, const RunOptions& options = {});

}  // namespace savo::pipeline
