#pragma once

// Random binary text lines for segmentation property tests.

#include <random>
#include <string>

#include "savo/atlas.hpp"
#include "savo/script.hpp"
#include "savo/shaping.hpp"

namespace lines {

inline std::u32string random_word(std::mt19937& rng, int max_letters = 6) {
    const auto letters = savo::shaping::ShapingTable::arabic().letters();
    std::uniform_int_distribution<int> len(1, max_letters);
    std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
    std::u32string w;
    for (int i = len(rng); i > 0; --i) w.push_back(letters[pick(rng)].letter);
    return w;
}

// Rendered word with jitter, padded by a random blank margin.
inline savo::BinaryImage atlas_line(const savo::synth::GlyphAtlas& atlas, std::mt19937& rng) {
    savo::synth::RenderJitter j;
    j.scale = std::uniform_real_distribution<double>(1.0, 1.5)(rng);
    j.ligature_extra = std::uniform_int_distribution<int>(0, 2)(rng);
    j.stretch_min = 0.9;
    j.stretch_max = 1.15;
    savo::synth::Rng r(rng());
    const savo::BinaryImage word = savo::synth::render_word(atlas, random_word(rng), j, r);
    const int pad = std::uniform_int_distribution<int>(0, 3)(rng);
    savo::BinaryImage out(word.width() + 2 * pad, word.height());
    for (int y = 0; y < word.height(); ++y) {
        for (int x = 0; x < word.width(); ++x) out.at(x + pad, y) = word.at(x, y);
    }
    return out;
}

// Free-form scribble: a baseline stroke with random risers, gaps and dots.
inline savo::BinaryImage scribble_line(std::mt19937& rng) {
    const int h = std::uniform_int_distribution<int>(16, 40)(rng);
    const int w = std::uniform_int_distribution<int>(20, 120)(rng);
    savo::BinaryImage img(w, h);
    const int base = h * 2 / 3;
    std::bernoulli_distribution gap(0.08), riser(0.15), dot(0.05);
    std::uniform_int_distribution<int> top(0, base);
    for (int x = 0; x < w; ++x) {
        if (gap(rng)) continue;
        img.at(x, base) = 1;
        if (x % 3 == 0) img.at(x, std::min(h - 1, base + 1)) = 1;
        if (riser(rng)) {
            for (int y = top(rng); y < base; ++y) img.at(x, y) = 1;
        }
        if (dot(rng)) {
            const int y = std::uniform_int_distribution<int>(0, h - 1)(rng);
            img.at(x, y) = 1;
        }
    }
    img.at(w / 2, base) = 1;
    return img;
}

inline savo::BinaryImage random_line(const savo::synth::GlyphAtlas& atlas, std::mt19937& rng) {
    return std::bernoulli_distribution(0.7)(rng) ? atlas_line(atlas, rng) : scribble_line(rng);
}

// Re-assembles segments and diacritics into one line image, counting overlaps.
inline savo::BinaryImage reassemble(const savo::script::LineAnalysis& a, int width, int* overlaps) {
    savo::BinaryImage out(width, a.height);
    *overlaps = 0;
    auto put = [&](int x, int y) {
        if (out.at(x, y)) ++*overlaps;
        out.at(x, y) = 1;
    };
    for (const auto& s : a.segments) {
        for (int y = 0; y < s.crop.height(); ++y) {
            for (int x = 0; x < s.crop.width(); ++x) {
                if (s.crop.at(x, y)) put(s.x0 + x, y);
            }
        }
    }
    for (const auto& d : a.diacritics) {
        for (const auto& p : d.component.pixels) put(p.x, p.y);
    }
    return out;
}

inline bool same_segments(const std::vector<savo::script::GlyphSegment>& a,
                          const std::vector<savo::script::GlyphSegment>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].x0 != b[i].x0 || a[i].x1 != b[i].x1 || a[i].crop != b[i].crop ||
            a[i].merge_count != b[i].merge_count || a[i].joined_left != b[i].joined_left ||
            a[i].joined_right != b[i].joined_right || a[i].diacritics.size() != b[i].diacritics.size()) {
            return false;
        }
        for (std::size_t k = 0; k < a[i].diacritics.size(); ++k) {
            if (a[i].diacritics[k].component.pixels != b[i].diacritics[k].component.pixels) return false;
        }
    }
    return true;
}

}  // namespace lines
