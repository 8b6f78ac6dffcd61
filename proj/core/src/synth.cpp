#include "savo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "savo/error.hpp"
#include "savo/imaging.hpp"
#include "savo/png_io.hpp"
#include "savo/utf8.hpp"

namespace savo::synth {

namespace {

double luma(const Rgb& p) { return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b; }

std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

Rgb random_color(Rng& rng) {
    return {static_cast<std::uint8_t>(rng.range(0, 255)), static_cast<std::uint8_t>(rng.range(0, 255)),
            static_cast<std::uint8_t>(rng.range(0, 255))};
}

ColorImage fit_background(const ColorImage& bg, int width, int height) {
    if (bg.width() == width && bg.height() == height) return bg;
    ColorImage out(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) out.at(x, y) = bg.at(x * bg.width() / width, y * bg.height() / height);
    }
    return out;
}

// Text colour for a caption over the given background box.
Rgb pick_text_color(const ColorImage& img, const Box& box, double min_contrast, Rng& rng) {
    double lo = 255.0, hi = 0.0;
    for (int y = box.y0; y <= box.y1; ++y) {
        for (int x = box.x0; x <= box.x1; ++x) {
            const double l = luma(img.at(x, y));
            lo = std::min(lo, l);
            hi = std::max(hi, l);
        }
    }
    const double bright_floor = hi + min_contrast;
    const double dark_ceiling = lo - min_contrast;
    const bool bright_ok = bright_floor <= 255.0;
    const bool dark_ok = dark_ceiling >= 0.0;
    bool bright;
    if (bright_ok && dark_ok) {
        bright = rng.unit() < 0.5;
    } else if (bright_ok || dark_ok) {
        bright = bright_ok;
    } else {
        bright = 255.0 - hi > lo;
    }
    const double level = bright ? rng.uniform(std::min(255.0, bright_floor), 255.0)
                                : rng.uniform(0.0, std::max(0.0, dark_ceiling));
    if (bright && rng.unit() < 0.5) {
        // Yellow caption at the same luma.
        const double b = std::max(0.0, level - 60.0);
        const double rg = std::min(255.0, (level - 0.114 * b) / (0.299 + 0.587));
        return {clamp_byte(rg), clamp_byte(rg), clamp_byte(b)};
    }
    return {clamp_byte(level), clamp_byte(level), clamp_byte(level)};
}

}  // namespace

std::string truth_to_json(const Truth& truth) {
    nlohmann::json j;
    j["version"] = "1";
    auto& frames = j["frames"] = nlohmann::json::array();
    for (const auto& f : truth.frames) {
        nlohmann::json boxes = nlohmann::json::array();
        for (const auto& b : f.boxes) {
            boxes.push_back({{"x0", b.box.x0}, {"y0", b.box.y0}, {"x1", b.box.x1}, {"y1", b.box.y1}, {"word", b.word}});
        }
        frames.push_back({{"index", f.index}, {"file", f.file}, {"boxes", std::move(boxes)}});
    }
    return j.dump(1);
}

Truth truth_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("version").get<std::string>() != "1") throw Error(ErrorCode::MalformedInput, "unsupported truth version");
        Truth t;
        for (const auto& f : j.at("frames")) {
            TruthFrame frame;
            frame.index = f.at("index").get<int>();
            frame.file = f.value("file", std::string{});
            for (const auto& b : f.at("boxes")) {
                frame.boxes.push_back({Box{b.at("x0").get<int>(), b.at("y0").get<int>(), b.at("x1").get<int>(),
                                           b.at("y1").get<int>()},
                                       b.value("word", std::string{})});
            }
            t.frames.push_back(std::move(frame));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("bad truth JSON: ") + e.what());
    }
}

ColorImage make_background(int width, int height, Rng& rng) {
    if (width < 1 || height < 1) throw Error(ErrorCode::BadArgument, "background size must be positive");
    const Rgb a = random_color(rng);
    const Rgb b = random_color(rng);
    const double angle = rng.uniform(0.0, 2.0 * M_PI);
    const double dx = std::cos(angle), dy = std::sin(angle);
    const double span = std::abs(dx) * width + std::abs(dy) * height;
    const double offset = std::min(0.0, dx * width) + std::min(0.0, dy * height);

    struct Blob {
        double cx, cy, sigma, alpha;
        Rgb color;
    };
    std::vector<Blob> blobs(static_cast<std::size_t>(rng.range(1, 4)));
    for (auto& bl : blobs) {
        bl = {rng.uniform(0, width), rng.uniform(0, height), rng.uniform(30.0, 80.0), rng.uniform(0.3, 0.8),
              random_color(rng)};
    }

    ColorImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double t = (dx * x + dy * y - offset) / span;
            double c[3] = {a.r + t * (b.r - a.r), a.g + t * (b.g - a.g), a.b + t * (b.b - a.b)};
            for (const auto& bl : blobs) {
                const double d2 = (x - bl.cx) * (x - bl.cx) + (y - bl.cy) * (y - bl.cy);
                const double w = bl.alpha * std::exp(-d2 / (2.0 * bl.sigma * bl.sigma));
                c[0] += w * (bl.color.r - c[0]);
                c[1] += w * (bl.color.g - c[1]);
                c[2] += w * (bl.color.b - c[2]);
            }
            img.at(x, y) = {clamp_byte(c[0]), clamp_byte(c[1]), clamp_byte(c[2])};
        }
    }
    return img;
}

void write_backgrounds(const std::filesystem::path& dir, int count, int width, int height, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        std::ostringstream name;
        name << "bg_" << std::setw(3) << std::setfill('0') << i << ".png";
        io::write_png(dir / name.str(), make_background(width, height, rng));
    }
}

SynthFrame synth_frame(const GlyphAtlas& atlas, const std::vector<std::u32string>& words,
                       const ColorImage& background, const SynthConfig& config, Rng& rng) {
    if (words.empty()) throw Error(ErrorCode::EmptyInput, "empty word list");
    SynthFrame frame{fit_background(background, config.width, config.height), {}};

    const int n = rng.range(config.min_words, config.max_words);
    std::vector<std::pair<std::u32string, BinaryImage>> lines;
    int used = 0;
    const int avail = config.height - 2 * config.margin;
    for (int i = 0; i < n; ++i) {
        const auto& word = words[rng.next() % words.size()];
        RenderJitter jitter;
        jitter.scale = rng.uniform(config.scale_min, config.scale_max);
        jitter.stretch_min = config.stretch_min;
        jitter.stretch_max = config.stretch_max;
        jitter.ligature_extra = rng.range(0, config.ligature_extra_max);
        jitter.subword_gap = rng.range(config.gap_min, config.gap_max);
        BinaryImage mask = render_word(atlas, word, jitter, rng);
        const int need = mask.height() + (lines.empty() ? 0 : config.line_gap);
        if (used + need > avail || mask.width() > config.width - 2 * config.margin) continue;
        used += need;
        lines.emplace_back(word, std::move(mask));
    }

    int slack = avail - used;
    int y = config.margin;
    for (auto& [word, mask] : lines) {
        const int shift = rng.range(0, slack);
        slack -= shift;
        y += shift;
        const int x = config.margin + rng.range(0, config.width - 2 * config.margin - mask.width());
        const Box ink = imaging::ink_bbox(mask);
        const Box placed{x + ink.x0, y + ink.y0, x + ink.x1, y + ink.y1};
        const Rgb color = pick_text_color(frame.image, placed, config.min_contrast, rng);
        for (int my = 0; my < mask.height(); ++my) {
            for (int mx = 0; mx < mask.width(); ++mx) {
                if (mask.at(mx, my)) frame.image.at(x + mx, y + my) = color;
            }
        }
        frame.boxes.push_back({placed, utf8::encode(word)});
        y += mask.height() + config.line_gap;
    }

    if (config.noise > 0) {
        for (auto& p : frame.image.pixels()) {
            p.r = clamp_byte(p.r + rng.range(-config.noise, config.noise));
            p.g = clamp_byte(p.g + rng.range(-config.noise, config.noise));
            p.b = clamp_byte(p.b + rng.range(-config.noise, config.noise));
        }
    }
    return frame;
}

Truth synth_generate(const GlyphAtlas& atlas, const std::vector<std::u32string>& words,
                     const std::vector<ColorImage>& backgrounds, int n, std::uint64_t seed,
                     const std::filesystem::path& out, const SynthConfig& config) {
    if (backgrounds.empty()) throw Error(ErrorCode::EmptyInput, "no backgrounds");
    if (n < 0) throw Error(ErrorCode::BadArgument, "frame count must be >= 0");
    const auto& table = shaping::ShapingTable::arabic();
    for (const auto& w : words) {
        for (const auto ch : w) {
            if (!table.knows(ch)) throw Error(ErrorCode::MissingGlyph, "no glyph for letter " + utf8::encode(ch));
        }
        const auto forms = table.forms_for(w);
        for (std::size_t i = 0; i < w.size(); ++i) atlas.at({w[i], forms[i]});
    }

    std::filesystem::create_directories(out);
    Rng rng(seed);
    Truth truth;
    for (int i = 0; i < n; ++i) {
        const auto& bg = backgrounds[rng.next() % backgrounds.size()];
        SynthFrame f = synth_frame(atlas, words, bg, config, rng);
        std::ostringstream name;
        name << "frame_" << std::setw(4) << std::setfill('0') << i << ".png";
        io::write_png(out / name.str(), f.image);
        truth.frames.push_back({i, name.str(), std::move(f.boxes)});
    }
    std::ofstream(out / "truth.json") << truth_to_json(truth) << '\n';
    return truth;
}

std::vector<std::u32string> read_word_list(const std::filesystem::path& path) { return utf8::read_lines(path); }

std::vector<ColorImage> read_backgrounds(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::Io, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<ColorImage> out;
    for (const auto& f : files) out.push_back(io::read_color_png(f));
    if (out.empty()) throw Error(ErrorCode::EmptyInput, "no PNG backgrounds in " + dir.string());
    return out;
}

}  // namespace savo::synth
