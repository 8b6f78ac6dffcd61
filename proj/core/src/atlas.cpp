#include "savo/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "savo/error.hpp"
#include "savo/imaging.hpp"
#include "savo/png_io.hpp"
#include "savo/utf8.hpp"

namespace savo::synth {

namespace {

std::string describe(const GlyphClass& g) {
    return utf8::encode(g.letter) + " (" + std::string(shaping::to_string(g.form)) + ")";
}

// Geometry of the default atlas, in cell pixels.
constexpr int kCellHeight = 26;
constexpr int kBaseline = 17;
constexpr int kSlabTop = 11;
constexpr int kStub = 2;
constexpr int kDotAboveTop = 3;
constexpr int kDotBelowTop = 22;

struct Canvas {
    BinaryImage img;
    int offset;  // body column 0 within img

    void fill(int x0, int x1, int y0, int y1, std::uint8_t v = 1) {
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) img.at(offset + x, y) = v;
        }
    }
};

enum class Dots { None, OneAbove, TwoAbove, ThreeAbove, OneBelow, TwoBelow };

struct Design {
    int width;
    void (*draw)(Canvas&, int width);
    Dots dots;
    int dot_center = -1;  // body column; -1 = centred
};

void slab(Canvas& c, int w) { c.fill(0, w - 1, kSlabTop, kBaseline); }

void alef(Canvas& c, int w) { slab(c, w); c.fill(0, 1, 1, kSlabTop - 1); }
void beh(Canvas& c, int w) { slab(c, w); c.fill(w - 2, w - 1, 8, kSlabTop - 1); }
void hah(Canvas& c, int w) {
    slab(c, w);
    c.fill(2, w - 1, 7, 8);
    c.fill(w - 2, w - 1, 9, kSlabTop - 1);
}
void dal(Canvas& c, int w) { slab(c, w); c.fill(0, 1, 8, kSlabTop - 1); }
void reh(Canvas& c, int w) {
    c.fill(3, w - 1, kSlabTop, kBaseline);
    c.fill(0, 2, 15, 23);
}
void seen(Canvas& c, int w) {
    slab(c, w);
    c.fill(0, 1, 8, kSlabTop - 1);
    c.fill(6, 7, 8, kSlabTop - 1);
    c.fill(w - 2, w - 1, 8, kSlabTop - 1);
}
void sad(Canvas& c, int w) {
    slab(c, w);
    c.fill(4, w - 3, 13, 15, 0);
    c.fill(0, 1, 8, kSlabTop - 1);
}
void tah(Canvas& c, int w) {
    slab(c, w);
    c.fill(5, 9, 13, 15, 0);
    c.fill(2, 3, 1, kSlabTop - 1);
}
void ain(Canvas& c, int w) {
    slab(c, w);
    c.fill(3, w - 1, 7, 8);
    c.fill(3, 4, 9, kSlabTop - 1);
}
void feh(Canvas& c, int w) {
    slab(c, w);
    c.fill(6, w - 1, 7, kSlabTop - 1);
    c.fill(8, 9, 8, 9, 0);
}
void kaf(Canvas& c, int w) {
    slab(c, w);
    c.fill(w - 2, w - 1, 1, kSlabTop - 1);
    c.fill(3, w - 3, 5, 6);
}
void lam(Canvas& c, int w) {
    slab(c, w);
    c.fill(w - 2, w - 1, 1, kSlabTop - 1);
    c.fill(0, 1, kBaseline + 1, 23);
}
void meem(Canvas& c, int w) {
    slab(c, w);
    c.fill(3, 8, 13, 15, 0);
    c.fill(0, 1, kBaseline + 1, 24);
}
void heh(Canvas& c, int w) {
    slab(c, w);
    c.fill(2, 4, 13, 15, 0);
    c.fill(7, 9, 13, 15, 0);
}
void waw(Canvas& c, int w) {
    slab(c, w);
    c.fill(6, 8, 13, 15, 0);
    c.fill(0, 2, kBaseline + 1, 21);
}

const std::map<char32_t, Design>& designs() {
    static const std::map<char32_t, Design> table{
        {U'ا', {11, alef, Dots::None}},
        {U'ب', {11, beh, Dots::OneBelow}},
        {U'ت', {11, beh, Dots::TwoAbove}},
        {U'ث', {11, beh, Dots::ThreeAbove}},
        {U'ج', {12, hah, Dots::OneBelow}},
        {U'ح', {12, hah, Dots::None}},
        {U'خ', {12, hah, Dots::OneAbove, 5}},
        {U'د', {11, dal, Dots::None}},
        {U'ذ', {11, dal, Dots::OneAbove, 6}},
        {U'ر', {11, reh, Dots::None}},
        {U'ز', {11, reh, Dots::OneAbove, 6}},
        {U'س', {14, seen, Dots::None}},
        {U'ش', {14, seen, Dots::ThreeAbove}},
        {U'ص', {14, sad, Dots::None}},
        {U'ض', {14, sad, Dots::OneAbove, 7}},
        {U'ط', {12, tah, Dots::None}},
        {U'ظ', {12, tah, Dots::OneAbove, 8}},
        {U'ع', {11, ain, Dots::None}},
        {U'غ', {11, ain, Dots::OneAbove, 7}},
        {U'ف', {12, feh, Dots::OneAbove, 8}},
        {U'ق', {12, feh, Dots::TwoAbove, 8}},
        {U'ك', {12, kaf, Dots::None}},
        {U'ل', {11, lam, Dots::None}},
        {U'م', {11, meem, Dots::None}},
        {U'ن', {11, beh, Dots::OneAbove}},
        {U'ه', {12, heh, Dots::None}},
        {U'و', {11, waw, Dots::None}},
        {U'ي', {11, beh, Dots::TwoBelow}},
    };
    return table;
}

void dot(Canvas& c, int x, int y) { c.fill(x, x + 1, y, y + 1); }

void draw_dots(Canvas& c, int width, Dots dots, int center) {
    const int mid = center >= 0 ? center : width / 2;
    switch (dots) {
        case Dots::None: return;
        case Dots::OneAbove: dot(c, mid - 1, kDotAboveTop); return;
        case Dots::OneBelow: dot(c, mid - 1, kDotBelowTop); return;
        case Dots::TwoAbove:
            dot(c, mid - 3, kDotAboveTop);
            dot(c, mid + 1, kDotAboveTop);
            return;
        case Dots::TwoBelow:
            dot(c, mid - 3, kDotBelowTop);
            dot(c, mid + 1, kDotBelowTop);
            return;
        case Dots::ThreeAbove:
            dot(c, mid - 3, kDotAboveTop + 1);
            dot(c, mid + 1, kDotAboveTop + 1);
            dot(c, mid - 1, kDotAboveTop - 2);
            return;
    }
}

}  // namespace

void GlyphAtlas::add(const GlyphClass& glyph, BinaryImage bitmap) {
    if (bitmap.height() != cell_height_) {
        throw Error(ErrorCode::BadDims, "glyph " + describe(glyph) + " does not match the cell height");
    }
    glyphs_.insert_or_assign(glyph, std::move(bitmap));
}

const BinaryImage& GlyphAtlas::at(const GlyphClass& glyph) const {
    const auto it = glyphs_.find(glyph);
    if (it == glyphs_.end()) throw Error(ErrorCode::MissingGlyph, "atlas has no glyph " + describe(glyph));
    return it->second;
}

void GlyphAtlas::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    int sheet_width = 1;
    for (const auto& [g, bmp] : glyphs_) sheet_width = std::max(sheet_width, bmp.width());
    BinaryImage sheet(sheet_width, std::max<int>(1, static_cast<int>(glyphs_.size()) * cell_height_));

    nlohmann::json meta;
    meta["version"] = "1";
    meta["cell_height"] = cell_height_;
    meta["baseline"] = baseline_;
    auto& entries = meta["glyphs"] = nlohmann::json::array();
    int y = 0;
    for (const auto& [g, bmp] : glyphs_) {
        for (int r = 0; r < bmp.height(); ++r) {
            for (int x = 0; x < bmp.width(); ++x) sheet.at(x, y + r) = bmp.at(x, r);
        }
        entries.push_back({{"letter", utf8::encode(g.letter)},
                           {"form", shaping::to_string(g.form)},
                           {"y", y},
                           {"width", bmp.width()}});
        y += cell_height_;
    }
    io::write_png(dir / "atlas.png", sheet);
    std::ofstream(dir / "atlas.json") << meta.dump(1) << '\n';
}

GlyphAtlas GlyphAtlas::load(const std::filesystem::path& dir) {
    std::ifstream in(dir / "atlas.json");
    if (!in) throw Error(ErrorCode::MissingModel, "cannot open " + (dir / "atlas.json").string());
    if (!std::filesystem::exists(dir / "atlas.png")) {
        throw Error(ErrorCode::MissingModel, "cannot open " + (dir / "atlas.png").string());
    }
    const BinaryImage sheet = io::read_binary_png(dir / "atlas.png");
    try {
        const auto meta = nlohmann::json::parse(in);
        GlyphAtlas atlas(meta.at("cell_height").get<int>(), meta.at("baseline").get<int>());
        for (const auto& e : meta.at("glyphs")) {
            const auto letter = utf8::decode(e.at("letter").get<std::string>());
            const auto form = shaping::form_from_string(e.at("form").get<std::string>());
            const int y = e.at("y").get<int>();
            const int w = e.at("width").get<int>();
            if (letter.size() != 1 || !form) throw Error(ErrorCode::MalformedInput, "bad atlas entry");
            if (w < 1 || w > sheet.width() || y < 0 || y + atlas.cell_height() > sheet.height()) {
                throw Error(ErrorCode::MalformedInput, "atlas entry outside the sheet");
            }
            atlas.add({letter.front(), *form}, imaging::crop(sheet, Box{0, y, w - 1, y + atlas.cell_height() - 1}));
        }
        return atlas;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("bad atlas.json: ") + e.what());
    }
}

GlyphAtlas build_default_atlas() {
    GlyphAtlas atlas(kCellHeight, kBaseline);
    const auto& table = shaping::ShapingTable::arabic();
    for (const auto& info : table.letters()) {
        const auto& design = designs().at(info.letter);
        for (const Form form : {Form::Isolated, Form::Initial, Form::Medial, Form::Final}) {
            if (!table.has_form(info.letter, form)) continue;
            const int left = shaping::joins_left(form) ? kStub : 0;
            const int right = shaping::joins_right(form) ? kStub : 0;
            Canvas c{BinaryImage(left + design.width + right, kCellHeight), left};
            design.draw(c, design.width);
            draw_dots(c, design.width, design.dots, design.dot_center);
            if (left) c.fill(-left, -1, kBaseline - 1, kBaseline);
            if (right) c.fill(design.width, design.width + right - 1, kBaseline - 1, kBaseline);
            atlas.add({info.letter, form}, std::move(c.img));
        }
    }
    return atlas;
}

BinaryImage render_word(const GlyphAtlas& atlas, std::u32string_view word, const RenderJitter& jitter, Rng& rng) {
    if (word.empty()) throw Error(ErrorCode::EmptyInput, "empty word");
    if (!(jitter.scale > 0.0)) throw Error(ErrorCode::BadArgument, "render scale must be positive");
    const auto forms = shaping::ShapingTable::arabic().forms_for(word);
    const int h = atlas.cell_height();

    // Pieces in reading order; each followed by a joint (ligature or gap).
    std::vector<BinaryImage> pieces;
    for (std::size_t i = 0; i < word.size(); ++i) {
        const BinaryImage& g = atlas.at({word[i], forms[i]});
        const double f = jitter.stretch_min == jitter.stretch_max ? jitter.stretch_min
                                                                  : rng.uniform(jitter.stretch_min, jitter.stretch_max);
        const int w = std::max(1, static_cast<int>(std::lround(g.width() * f)));
        pieces.push_back(w == g.width() ? g : imaging::resize_nearest(g, w, h));
    }
    int total = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        total += pieces[i].width();
        if (i + 1 < pieces.size()) total += shaping::joins_left(forms[i]) ? jitter.ligature_extra : jitter.subword_gap;
    }

    BinaryImage line(total, h);
    int right = total;  // exclusive right edge of the next piece
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& p = pieces[i];
        const int x0 = right - p.width();
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < p.width(); ++x) {
                if (p.at(x, y)) line.at(x0 + x, y) = 1;
            }
        }
        right = x0;
        if (i + 1 == pieces.size()) break;
        if (shaping::joins_left(forms[i])) {
            for (int x = right - jitter.ligature_extra; x < right; ++x) {
                for (int y = atlas.baseline() - 1; y <= atlas.baseline(); ++y) line.at(x, y) = 1;
            }
            right -= jitter.ligature_extra;
        } else {
            right -= jitter.subword_gap;
        }
    }

    if (jitter.scale == 1.0) return line;
    const int sw = std::max(1, static_cast<int>(std::lround(total * jitter.scale)));
    const int sh = std::max(1, static_cast<int>(std::lround(h * jitter.scale)));
    return imaging::resize_nearest(line, sw, sh);
}

}  // namespace savo::synth
