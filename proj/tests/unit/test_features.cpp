#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "savo/atlas.hpp"
#include "savo/features.hpp"
#include "savo/imaging.hpp"
#include "test_util.hpp"

using namespace savo;
using namespace savo::features;

namespace {

BinaryImage glyph(bool value = false) { return BinaryImage(kGlyphSize, kGlyphSize, value ? 1 : 0); }

BinaryImage ring() {
    BinaryImage g = glyph();
    for (int y = 10; y < 30; ++y) {
        for (int x = 10; x < 30; ++x) g.at(x, y) = (x < 14 || x >= 26 || y < 14 || y >= 26) ? 1 : 0;
    }
    return g;
}

script::GlyphSegment segment_of(const BinaryImage& img) {
    script::GlyphSegment s;
    s.x0 = 0;
    s.x1 = img.width() - 1;
    s.crop = img;
    return s;
}

script::DiacriticMark mark(int x, int y, script::MarkPosition pos) {
    script::DiacriticMark d;
    d.component.bbox = Box{x, y, x, y};
    d.component.pixels = {{x, y}};
    d.position = pos;
    return d;
}

double family_sum(const std::array<double, kFamilyLength>& v, int family) {
    double s = 0.0;
    for (int i = 0; i < kGlyphSize; ++i) s += v[static_cast<std::size_t>(family * kGlyphSize + i)];
    return s;
}

}  // namespace

TEST_CASE("glyph normalization") {
    BinaryImage full = glyph(true);
    CHECK(normalize_glyph(full) == full);

    BinaryImage big(80, 80, 1);
    CHECK(normalize_glyph(big) == full);

    BinaryImage bar(60, 60);
    for (int y = 0; y < 60; ++y) {
        for (int x = 20; x < 40; ++x) bar.at(x, y) = 1;
    }
    CHECK(imaging::ink_count(normalize_glyph(bar)) == 1600);

    BinaryImage half(20, 60);
    for (int y = 0; y < 60; ++y) {
        for (int x = 0; x < 20; ++x) half.at(x, y) = y < 30;
    }
    half.at(19, 59) = 1;
    const double want = 0.5 * 1600;
    CHECK(std::abs(imaging::ink_count(normalize_glyph(half)) - want) <= 0.1 * want);

    CHECK_CODE(normalize_glyph(BinaryImage(5, 5)), ErrorCode::NoInk);

    // Diacritics are drawn into the normalized glyph.
    BinaryImage body(10, 26);
    for (int x = 0; x < 10; ++x) body.at(x, 20) = 1;
    auto seg = segment_of(body);
    seg.diacritics.push_back(mark(4, 2, script::MarkPosition::Above));
    const BinaryImage n = normalize_glyph(seg);
    CHECK(n.at(kGlyphSize * 4 / 10, 0) == 1);
    CHECK(n.at(0, kGlyphSize - 1) == 1);
}

TEST_CASE("projection features") {
    for (double v : projection_features(glyph())) CHECK(v == 0.0);

    const auto full = projection_features(glyph(true));
    for (int i = 0; i < 80; ++i) CHECK(full[static_cast<std::size_t>(i)] == 40.0);
    double total = 0.0;
    for (double v : full) total += v;
    CHECK(total == 4 * 1600.0);

    BinaryImage dot = glyph();
    dot.at(0, 0) = 1;
    const auto d = projection_features(dot);
    for (int f = 0; f < 4; ++f) {
        int nonzero = 0;
        for (int i = 0; i < kGlyphSize; ++i) {
            const double v = d[static_cast<std::size_t>(f * kGlyphSize + i)];
            if (v != 0.0) {
                ++nonzero;
                CHECK(v == 1.0);
            }
        }
        CHECK(nonzero == 1);
    }
    CHECK(d[0] == 1.0);
    CHECK(d[40] == 1.0);
    CHECK(d[80 + diagonal_bin(39)] == 1.0);
    CHECK(d[120] == 1.0);
    CHECK_CODE(projection_features(BinaryImage(3, 3)), ErrorCode::BadDims);
}

TEST_CASE("transition features") {
    const auto full = transition_features(glyph(true));
    for (int i = 0; i < 80; ++i) CHECK(full[static_cast<std::size_t>(i)] == 1.0);

    BinaryImage stripes = glyph();
    for (int y = 0; y < kGlyphSize; ++y) {
        for (int x = 0; x < kGlyphSize; x += 2) stripes.at(x, y) = 1;
    }
    const auto s = transition_features(stripes);
    for (int i = 0; i < 40; ++i) CHECK(s[static_cast<std::size_t>(i)] == 20.0);
    for (int i = 40; i < 80; ++i) CHECK(s[static_cast<std::size_t>(i)] == ((i - 40) % 2 == 0 ? 1.0 : 0.0));

    for (double v : transition_features(glyph())) CHECK(v == 0.0);
}

TEST_CASE("occlusions") {
    CHECK(occlusion_count(glyph(true)) == 0);
    CHECK(occlusion_count(ring()) == 1);

    BinaryImage eight = glyph();
    for (int y = 4; y < 36; ++y) {
        for (int x = 10; x < 30; ++x) {
            const bool hole = x >= 14 && x < 26 && ((y >= 8 && y < 17) || (y >= 23 && y < 32));
            eight.at(x, y) = hole ? 0 : 1;
        }
    }
    CHECK(occlusion_count(eight) == oracle::holes(eight));
    CHECK(occlusion_count(eight) == 2);

    // Diagonal gaps do not leak: 4-connected background.
    BinaryImage diamond = glyph();
    for (int i = 0; i < 5; ++i) {
        diamond.at(20 + i, 10 + i) = 1;
        diamond.at(20 - i, 10 + i) = 1;
        diamond.at(20 + i, 18 - i) = 1;
        diamond.at(20 - i, 18 - i) = 1;
    }
    CHECK(occlusion_count(diamond) == 1);

    std::mt19937 rng(8);
    std::uniform_int_distribution<int> shift(-8, 8);
    for (int t = 0; t < 20; ++t) {
        const int dx = shift(rng), dy = shift(rng);
        BinaryImage moved = glyph();
        const BinaryImage r = ring();
        for (int y = 0; y < kGlyphSize; ++y) {
            for (int x = 0; x < kGlyphSize; ++x) {
                if (r.at(x, y)) moved.at(x + dx, y + dy) = 1;
            }
        }
        CHECK(occlusion_count(moved) == 1);
    }
}

TEST_CASE("diacritic descriptor") {
    auto seg = segment_of(glyph(true));
    CHECK(diacritic_descriptor(seg) == std::array<double, 2>{0, 0});
    for (int i = 0; i < 3; ++i) seg.diacritics.push_back(mark(i * 2, 0, script::MarkPosition::Above));
    CHECK(diacritic_descriptor(seg) == std::array<double, 2>{3, 0});
    auto below = segment_of(glyph(true));
    below.diacritics.push_back(mark(3, 39, script::MarkPosition::Below));
    CHECK(diacritic_descriptor(below) == std::array<double, 2>{0, 1});
}

TEST_CASE("extract_features") {
    const auto solid = extract_features(segment_of(glyph(true)));
    for (int i = 0; i < 80; ++i) CHECK(solid[static_cast<std::size_t>(i)] == 40.0);
    for (int i = 160; i < 240; ++i) CHECK(solid[static_cast<std::size_t>(i)] == 1.0);
    CHECK(solid[320] == 0.0);
    CHECK(solid[321] == 0.0);
    CHECK(solid[322] == 0.0);

    CHECK(extract_features(segment_of(ring()))[320] == 1.0);

    const auto atlas = synth::build_default_atlas();
    for (const auto& [cls, bmp] : atlas.glyphs()) {
        const auto seg = segment_of(bmp);
        const auto got = extract_features(seg);
        const BinaryImage g = normalize_glyph(seg);
        const auto want = oracle::glyph_vector(g, oracle::holes(g), 0, 0);
        REQUIRE(want.size() == got.size());
        bool same = true;
        for (std::size_t i = 0; i < got.size(); ++i) same = same && got[i] == want[i];
        CHECK(same);
        CHECK(extract_features(seg) == got);
    }
}

TEST_CASE("feature invariants on random glyphs") {
    std::mt19937 rng(55);
    std::bernoulli_distribution ink(0.3);
    for (int t = 0; t < 200; ++t) {
        BinaryImage g = glyph();
        for (auto& p : g.pixels()) p = ink(rng);
        const double n = imaging::ink_count(g);
        const auto p = projection_features(g);
        for (int f = 0; f < 4; ++f) CHECK(family_sum(p, f) == n);
        const auto tr = transition_features(g);
        for (int i = 0; i < 80; ++i) CHECK(tr[static_cast<std::size_t>(i)] <= 20.0);
    }
}
