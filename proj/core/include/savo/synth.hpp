#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "savo/atlas.hpp"
#include "savo/image.hpp"

/// Synthetic caption frames with ground truth.
namespace savo::synth {

struct TruthBox {
    Box box;
    std::string word;  // UTF-8, logical order
};

struct TruthFrame {
    int index = 0;
    std::string file;
    std::vector<TruthBox> boxes;
};

struct Truth {
    std::vector<TruthFrame> frames;
};

std::string truth_to_json(const Truth& truth);
Truth truth_from_json(const std::string& text);

/// Smooth procedural backgrounds: two-colour gradients with soft blobs.
ColorImage make_background(int width, int height, Rng& rng);
void write_backgrounds(const std::filesystem::path& dir, int count, int width, int height, std::uint64_t seed);

struct SynthConfig {
    int width = 320;
    int height = 240;
    int min_words = 1;
    int max_words = 3;
    double scale_min = 1.0;
    double scale_max = 1.5;
    double stretch_min = 0.9;
    double stretch_max = 1.15;
    int ligature_extra_max = 2;
    int gap_min = 3;
    int gap_max = 5;
    /// Uniform per-pixel noise amplitude added to every channel.
    int noise = 2;
    /// Minimum luma difference between text and the local background.
    double min_contrast = 80.0;
    /// Minimum blank rows between stacked captions.
    int line_gap = 16;
    int margin = 8;
};

struct SynthFrame {
    ColorImage image;
    std::vector<TruthBox> boxes;
};

/// One frame: 1..3 words on non-overlapping rows at random positions and scales.
SynthFrame synth_frame(const GlyphAtlas& atlas, const std::vector<std::u32string>& words,
                       const ColorImage& background, const SynthConfig& config, Rng& rng);

/// Writes frame_NNNN.png files plus truth.json into `out`. Deterministic per seed.
/// Throws MissingGlyph before writing anything if a word needs a glyph the atlas lacks.
Truth synth_generate(const GlyphAtlas& atlas, const std::vector<std::u32string>& words,
                     const std::vector<ColorImage>& backgrounds, int n, std::uint64_t seed,
                     const std::filesystem::path& out, const SynthConfig& config = {});

/// UTF-8 word list, one per line.
std::vector<std::u32string> read_word_list(const std::filesystem::path& path);
std::vector<ColorImage> read_backgrounds(const std::filesystem::path& dir);

}  // namespace savo::synth
