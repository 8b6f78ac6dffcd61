#include <random>

#include "doctest.h"
#include "lines.hpp"
#include "oracles.hpp"
#include "savo/atlas.hpp"
#include "savo/imaging.hpp"
#include "savo/script.hpp"
#include "test_util.hpp"

using namespace savo;
using namespace savo::script;

namespace {

constexpr int kH = 26;

void fill(BinaryImage& img, int x0, int y0, int x1, int y1) {
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) img.at(x, y) = 1;
    }
}

GlyphSegment piece(int x0, int x1, bool joined_left, bool joined_right) {
    GlyphSegment s;
    s.x0 = x0;
    s.x1 = x1;
    s.crop = BinaryImage(x1 - x0 + 1, kH);
    for (int x = 0; x < s.crop.width(); ++x) s.crop.at(x, 20) = 1;
    s.joined_left = joined_left;
    s.joined_right = joined_right;
    return s;
}

DiacriticMark dot_at(int x, int y) {
    DiacriticMark d;
    d.component.bbox = Box{x, y, x + 1, y + 1};
    d.component.pixels = {{x, y}, {x + 1, y}, {x, y + 1}, {x + 1, y + 1}};
    d.position = MarkPosition::Above;
    return d;
}

}  // namespace

TEST_CASE("baseline detection") {
    BinaryImage row(12, kH);
    fill(row, 0, 7, 11, 7);
    CHECK(detect_baseline(row) == 7);

    BinaryImage tie(12, kH);
    fill(tie, 0, 10, 5, 10);
    fill(tie, 3, 14, 8, 14);
    CHECK(detect_baseline(tie) == 14);

    const auto atlas = synth::build_default_atlas();
    synth::Rng rng(2);
    const BinaryImage word = synth::render_word(atlas, U"بيت", {}, rng);
    const auto proj = imaging::horizontal_projection(word);
    int want = 0;
    for (int y = 0; y < word.height(); ++y) {
        if (proj[y] >= proj[want]) want = y;
    }
    CHECK(detect_baseline(word) == want);
    for (int v : proj) CHECK(proj[detect_baseline(word)] >= v);

    CHECK_CODE(detect_baseline(BinaryImage(4, 4)), ErrorCode::NoInk);
}

TEST_CASE("baseline band") {
    const BaselineBand b = baseline_band(20, 26, 0.15);
    CHECK(b.top == 17);
    CHECK(b.bottom == 23);
    const BaselineBand thin = baseline_band(0, 4, 0.15);
    CHECK(thin.top == 0);
    CHECK(thin.bottom == 1);
}

TEST_CASE("diacritic split") {
    BinaryImage line(20, kH);
    fill(line, 2, 8, 15, 20);
    fill(line, 8, 2, 9, 3);
    const auto split = split_diacritics(line, 20);
    CHECK(split.body_components.size() == 1);
    REQUIRE(split.diacritics.size() == 1);
    CHECK(split.diacritics[0].position == MarkPosition::Above);
    CHECK(split.body.at(8, 2) == 0);

    BinaryImage straddle(20, kH);
    fill(straddle, 2, 18, 15, 24);
    fill(straddle, 8, 19, 9, 20);
    fill(straddle, 17, 18, 18, 19);
    const auto s2 = split_diacritics(straddle, 20);
    CHECK(s2.diacritics.empty());

    BinaryImage three(24, kH);
    fill(three, 2, 12, 21, 20);
    fill(three, 6, 2, 7, 3);
    fill(three, 10, 2, 11, 3);
    fill(three, 8, 5, 9, 6);
    BinaryImage dots_only(24, kH);
    fill(dots_only, 6, 2, 7, 3);
    fill(dots_only, 10, 2, 11, 3);
    fill(dots_only, 8, 5, 9, 6);
    const auto s3 = split_diacritics(three, 20);
    CHECK(s3.body_components.size() == 1);
    CHECK(s3.diacritics.size() == oracle::components(dots_only).size());
}

TEST_CASE("line segmentation") {
    BinaryImage two(30, kH);
    fill(two, 2, 10, 10, 20);
    fill(two, 15, 10, 25, 20);
    const auto s = segment_line(two, 20);
    REQUIRE(s.size() == 2);
    CHECK(s[0].x0 == 15);
    CHECK(s[1].x1 == 10);
    CHECK_FALSE(s[0].joined_left);

    BinaryImage one(30, kH);
    fill(one, 2, 10, 25, 20);
    CHECK(segment_line(one, 20).size() == 1);

    BinaryImage cursive(22, kH);
    fill(cursive, 2, 8, 7, 20);
    fill(cursive, 14, 8, 19, 20);
    fill(cursive, 8, 20, 13, 20);
    REQUIRE(detect_baseline(cursive) == 20);
    const auto c = segment_line(cursive, 20);
    REQUIRE(c.size() == 2);
    CHECK(c[0].x0 == 11);
    CHECK(c[0].x1 == 19);
    CHECK(c[1].x0 == 2);
    CHECK(c[1].x1 == 10);
    CHECK(c[0].joined_left);
    CHECK(c[1].joined_right);

    // A riser inside the connector fails the band-only test and prevents the cut there.
    fill(cursive, 10, 12, 11, 20);
    const auto blocked = segment_line(cursive, 20);
    for (const auto& g : blocked) CHECK((g.x0 > 11 || g.x1 < 10 || (g.x0 <= 10 && g.x1 >= 11)));
}

TEST_CASE("segment correction rules") {
    std::vector<GlyphSegment> three{piece(30, 45, true, false), piece(25, 29, true, true), piece(10, 24, false, true)};
    const auto merged = correct_segments(three, {});
    REQUIRE(merged.size() == 2);
    CHECK(merged[1].x0 == 10);
    CHECK(merged[1].x1 == 29);
    CHECK(merged[1].merge_count == 1);

    const std::vector<DiacriticMark> mark{dot_at(26, 3)};
    const auto kept = correct_segments(three, mark);
    REQUIRE(kept.size() == 3);
    CHECK(kept[1].diacritics.size() == 1);

    std::vector<GlyphSegment> chain{piece(40, 44, true, false), piece(35, 39, true, true), piece(30, 34, true, true),
                                    piece(25, 29, true, true), piece(10, 24, false, true)};
    const auto capped = correct_segments(chain, {});
    for (const auto& g : capped) CHECK(g.merge_count <= 2);
    CHECK(capped.size() < chain.size());
    CHECK(lines::same_segments(correct_segments(capped, {}), capped));

    // A narrow sub-word ending joins the preceding segment.
    std::vector<GlyphSegment> tail{piece(20, 40, true, false), piece(15, 19, false, true)};
    const auto t = correct_segments(tail, {});
    REQUIRE(t.size() == 1);
    CHECK(t[0].x0 == 15);
    CHECK(t[0].x1 == 40);
}

TEST_CASE("segmentation invariants on random lines") {
    const auto atlas = synth::build_default_atlas();
    std::mt19937 rng(77);
    for (int t = 0; t < 100; ++t) {
        const BinaryImage line = lines::random_line(atlas, rng);
        if (imaging::ink_count(line) == 0) continue;
        const LineAnalysis a = analyze_line(line);
        int overlaps = 0;
        CHECK(lines::reassemble(a, line.width(), &overlaps) == line);
        CHECK(overlaps == 0);
        for (std::size_t i = 0; i < a.segments.size(); ++i) {
            CHECK(a.segments[i].merge_count <= 2);
            if (i > 0) CHECK(a.segments[i].x1 < a.segments[i - 1].x0);
        }
        CHECK(lines::same_segments(correct_segments(a.segments, a.diacritics), a.segments));
    }
}
