#pragma once

#include <cstdint>
#include <vector>

#include "savo/atlas.hpp"
#include "savo/localization.hpp"
#include "savo/pipeline.hpp"
#include "savo/recognition.hpp"
#include "savo/synth.hpp"

/// Builds training sets for the band classifier and the prototype store from
/// synthetic material.
namespace savo::training {

/// Row bands over the full frame, and column bands inside each caption's row
/// window, labelled text when at least half of the band lies inside a caption.
std::vector<localization::TrainingSample> band_samples(const ColorImage& frame, std::span<const synth::TruthBox> boxes,
                                                       const localization::LocalizeConfig& config);

/// Repeats minority-class samples until both classes have the same count.
std::vector<localization::TrainingSample> balance(std::vector<localization::TrainingSample> samples);

struct LocalizerTraining {
    int frames = 60;
    std::uint64_t seed = 1;
    localization::MlpTrainConfig mlp;
    synth::SynthConfig synth;
};

localization::MlpTrainResult train_localizer(const synth::GlyphAtlas& atlas, const std::vector<std::u32string>& words,
                                             const std::vector<ColorImage>& backgrounds,
                                             const localization::LocalizeConfig& localize,
                                             const LocalizerTraining& config);

struct GlyphTraining {
    /// Target sample count per (letter, form) class.
    int per_class = 16;
    int max_letters = 5;
    /// Upper bound on rendered pseudo-words.
    int max_words = 20000;
    std::uint64_t seed = 1;
    synth::SynthConfig synth;
};

/// Renders random letter strings with jitter onto noisy grey patches and runs them
/// through the same line path as the pipeline. Lines whose segment count differs
/// from their letter count are discarded.
std::vector<recognition::LabeledSample> glyph_samples(const synth::GlyphAtlas& atlas,
                                                      const pipeline::PipelineConfig& config,
                                                      const GlyphTraining& training);

}  // namespace savo::training
