#pragma once

#include <span>
#include <string>
#include <vector>

#include "savo/image.hpp"
#include "savo/pipeline.hpp"
#include "savo/synth.hpp"

/// Localization and recognition scoring against ground truth.
namespace savo::eval {

double iou(const Box& a, const Box& b) noexcept;

struct Match {
    std::size_t pred = 0;
    std::size_t truth = 0;
    double iou = 0.0;
};

/// Greedy one-to-one matching by descending IoU (ties by pred, then truth index);
/// pairs below `threshold` never match.
std::vector<Match> match_boxes(std::span<const Box> pred, std::span<const Box> truth, double threshold = 0.5);

struct DetectionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    /// 1 when nothing was predicted.
    double precision() const noexcept { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
    /// 1 when there was nothing to find.
    double recall() const noexcept { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
    DetectionCounts& operator+=(const DetectionCounts& o) noexcept {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

DetectionCounts eval_detection(std::span<const Box> pred, std::span<const Box> truth, double threshold = 0.5);

struct IdWord {
    std::string id;
    std::u32string word;
};

struct RecognitionCounts {
    std::size_t words = 0;
    std::size_t exact = 0;
    std::size_t edits = 0;
    std::size_t chars = 0;

    double word_rate() const noexcept { return words == 0 ? 1.0 : static_cast<double>(exact) / static_cast<double>(words); }
    double char_rate() const noexcept {
        if (chars == 0) return edits == 0 ? 1.0 : 0.0;
        return std::max(0.0, 1.0 - static_cast<double>(edits) / static_cast<double>(chars));
    }
};

/// Predictions and truth paired by id; a truth id without prediction counts as an
/// empty prediction. A prediction id absent from truth raises UnalignedIds.
RecognitionCounts eval_recognition(std::span<const IdWord> pred, std::span<const IdWord> truth);

struct EvalReport {
    DetectionCounts detection;
    RecognitionCounts recognition;
    double iou_threshold = 0.5;
};

/// Matches detections to truth frame by frame (a detection covers every frame of its
/// span), then scores the words of matched pairs; unmatched truth words count as missed.
EvalReport evaluate(const pipeline::RecognitionResult& result, const synth::Truth& truth, double iou_threshold = 0.5);

std::string report_to_json(const EvalReport& report);

}  // namespace savo::eval
