#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string_view>

#include "savo/image.hpp"
#include "savo/shaping.hpp"

/// Bitmap glyph atlas and word rendering for synthetic captions.
namespace savo::synth {

using shaping::Form;
using shaping::GlyphClass;

/// One bitmap per (letter, form); every bitmap shares the cell height and baseline row.
/// Joining forms carry short baseline stubs on their connecting sides so that
/// neighbouring glyphs placed edge to edge form a ligature.
class GlyphAtlas {
public:
    GlyphAtlas(int cell_height, int baseline) : cell_height_(cell_height), baseline_(baseline) {}

    int cell_height() const noexcept { return cell_height_; }
    int baseline() const noexcept { return baseline_; }
    const std::map<GlyphClass, BinaryImage>& glyphs() const noexcept { return glyphs_; }

    void add(const GlyphClass& glyph, BinaryImage bitmap);
    bool contains(const GlyphClass& glyph) const { return glyphs_.contains(glyph); }
    /// Throws MissingGlyph naming the letter and form.
    const BinaryImage& at(const GlyphClass& glyph) const;

    /// Writes atlas.png (one glyph per sheet row) and atlas.json.
    void save(const std::filesystem::path& dir) const;
    static GlyphAtlas load(const std::filesystem::path& dir);

private:
    int cell_height_;
    int baseline_;
    std::map<GlyphClass, BinaryImage> glyphs_;
};

/// Procedurally drawn atlas covering every letter/form of the shaping table.
GlyphAtlas build_default_atlas();

struct RenderJitter {
    double scale = 1.0;
    /// Extra ligature length added between joined glyphs, in atlas pixels.
    int ligature_extra = 0;
    /// Blank columns between sub-words, in atlas pixels.
    int subword_gap = 3;
    /// Per-glyph horizontal stretch range; [1, 1] disables it.
    double stretch_min = 1.0;
    double stretch_max = 1.0;
};

/// Deterministic, platform-independent sampling helpers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    /// Uniform integer in [lo, hi].
    int range(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::mt19937_64 engine_;
};

/// Renders a word (logical order) right to left as an ink mask of height
/// round(cell_height * scale). `rng` drives the per-glyph stretch only.
BinaryImage render_word(const GlyphAtlas& atlas, std::u32string_view word, const RenderJitter& jitter, Rng& rng);

}  // namespace savo::synth
