#include "savo/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "savo/error.hpp"
#include "savo/imaging.hpp"
#include "savo/script.hpp"

namespace savo::training {

namespace {

int overlap(int a0, int a1, int b0, int b1) { return std::max(0, std::min(a1, b1) - std::max(a0, b0) + 1); }

bool mostly_inside_rows(const localization::Band& b, std::span<const synth::TruthBox> boxes) {
    int covered = 0;
    for (int y = b.start; y < b.start + b.length; ++y) {
        for (const auto& t : boxes) {
            if (y >= t.box.y0 && y <= t.box.y1) {
                ++covered;
                break;
            }
        }
    }
    return 2 * covered >= b.length;
}

}  // namespace

std::vector<localization::TrainingSample> band_samples(const ColorImage& frame, std::span<const synth::TruthBox> boxes,
                                                       const localization::LocalizeConfig& config) {
    using localization::Axis;
    const auto im = localization::band_images(frame);
    const int bh = config.band_height;
    std::vector<localization::TrainingSample> out;

    for (const auto& b : localization::make_bands(Axis::Rows, frame.height(), bh)) {
        out.push_back({localization::band_features(im.value, im.edges, b), mostly_inside_rows(b, boxes) ? 1 : 0});
    }

    const auto column_samples = [&](int y0, int y1) {
        for (const auto& b : localization::make_bands(Axis::Cols, frame.width(), bh, y0, y1)) {
            int covered = 0;
            for (const auto& t : boxes) {
                if (overlap(t.box.y0, t.box.y1, y0, y1) == 0) continue;
                covered = std::max(covered, overlap(t.box.x0, t.box.x1, b.start, b.start + b.length - 1));
            }
            out.push_back({localization::band_features(im.value, im.edges, b), 2 * covered >= b.length ? 1 : 0});
        }
    };

    std::vector<bool> text_rows(static_cast<std::size_t>(frame.height()), false);
    for (const auto& t : boxes) {
        const int y0 = t.box.y0 / bh * bh;
        const int y1 = std::min(frame.height() - 1, (t.box.y1 / bh + 1) * bh - 1);
        column_samples(y0, y1);
        for (int y = y0; y <= y1; ++y) text_rows[static_cast<std::size_t>(y)] = true;
    }
    // One caption-sized window of pure background, when the frame has room for it.
    const int window = 8 * bh;
    for (int y0 = 0; y0 + window <= frame.height(); y0 += bh) {
        const bool clear = std::none_of(text_rows.begin() + y0, text_rows.begin() + y0 + window, [](bool v) { return v; });
        if (clear) {
            column_samples(y0, y0 + window - 1);
            break;
        }
    }
    return out;
}

std::vector<localization::TrainingSample> balance(std::vector<localization::TrainingSample> samples) {
    std::vector<localization::TrainingSample> pos, neg;
    for (auto& s : samples) (s.label ? pos : neg).push_back(s);
    if (pos.empty() || neg.empty()) return samples;
    auto& small = pos.size() < neg.size() ? pos : neg;
    const auto& large = pos.size() < neg.size() ? neg : pos;
    const std::size_t base = small.size();
    for (std::size_t i = 0; small.size() < large.size(); ++i) small.push_back(small[i % base]);
    std::vector<localization::TrainingSample> out = std::move(neg);
    out.insert(out.end(), pos.begin(), pos.end());
    return out;
}

localization::MlpTrainResult train_localizer(const synth::GlyphAtlas& atlas, const std::vector<std::u32string>& words,
                                             const std::vector<ColorImage>& backgrounds,
                                             const localization::LocalizeConfig& localize,
                                             const LocalizerTraining& config) {
    if (backgrounds.empty()) throw Error(ErrorCode::EmptyInput, "no backgrounds");
    synth::Rng rng(config.seed);
    std::vector<localization::TrainingSample> samples;
    for (int i = 0; i < config.frames; ++i) {
        const auto& bg = backgrounds[rng.next() % backgrounds.size()];
        const auto frame = synth::synth_frame(atlas, words, bg, config.synth, rng);
        auto s = band_samples(frame.image, frame.boxes, localize);
        samples.insert(samples.end(), s.begin(), s.end());
    }
    return localization::mlp_train(balance(std::move(samples)), config.mlp);
}

std::vector<recognition::LabeledSample> glyph_samples(const synth::GlyphAtlas& atlas,
                                                      const pipeline::PipelineConfig& config,
                                                      const GlyphTraining& training) {
    const auto& table = shaping::ShapingTable::arabic();
    const auto letters = table.letters();
    const auto classes = table.all_classes();
    std::map<shaping::GlyphClass, int> count;
    for (const auto& c : classes) count[c] = 0;
    const auto full = [&] {
        return std::all_of(count.begin(), count.end(), [&](const auto& kv) { return kv.second >= training.per_class; });
    };

    synth::Rng rng(training.seed);
    const auto& sc = training.synth;
    std::vector<recognition::LabeledSample> out;
    for (int n = 0; n < training.max_words && !full(); ++n) {
        const int len = rng.unit() < 0.3 ? 1 : rng.range(2, training.max_letters);
        std::u32string word;
        for (int i = 0; i < len; ++i) word.push_back(letters[rng.next() % letters.size()].letter);
        const auto forms = table.forms_for(word);
        bool wanted = false;
        for (std::size_t i = 0; i < word.size(); ++i) wanted |= count[{word[i], forms[i]}] < training.per_class;
        if (!wanted) continue;

        synth::RenderJitter jitter;
        jitter.scale = rng.uniform(sc.scale_min, sc.scale_max);
        jitter.stretch_min = sc.stretch_min;
        jitter.stretch_max = sc.stretch_max;
        jitter.ligature_extra = rng.range(0, sc.ligature_extra_max);
        jitter.subword_gap = rng.range(sc.gap_min, sc.gap_max);
        const BinaryImage mask = synth::render_word(atlas, word, jitter, rng);

        // Grey patch with a gentle gradient, noise and a text level of either polarity.
        const int margin = 10;
        GrayImage patch(mask.width() + 2 * margin, mask.height() + 2 * margin);
        const double bg = rng.uniform(0.0, 255.0);
        const double slope = rng.uniform(-20.0, 20.0) / patch.width();
        const bool bright = bg + sc.min_contrast + 10 > 255.0 ? false
                            : bg - sc.min_contrast - 10 < 0.0  ? true
                                                                : rng.unit() < 0.5;
        const double ink = bright ? rng.uniform(std::min(255.0, bg + sc.min_contrast + 30), 255.0)
                                  : rng.uniform(0.0, std::max(0.0, bg - sc.min_contrast - 30));
        for (int y = 0; y < patch.height(); ++y) {
            for (int x = 0; x < patch.width(); ++x) {
                const int mx = x - margin, my = y - margin;
                const bool text = mask.contains(mx, my) && mask.at(mx, my);
                const double v = (text ? ink : bg + slope * (x - patch.width() / 2.0)) + rng.range(-sc.noise, sc.noise);
                patch.at(x, y) = std::clamp(v, 0.0, 255.0);
            }
        }
        const Box ink_box = imaging::ink_bbox(mask);
        const Box region = imaging::clamp_box(Box{margin + ink_box.x0 - rng.range(0, 4), margin + ink_box.y0 - rng.range(0, 4),
                                                  margin + ink_box.x1 + rng.range(0, 4), margin + ink_box.y1 + rng.range(0, 4)},
                                              patch.width(), patch.height());

        const auto line = pipeline::prepare_line(patch, region, config, rng.next());
        if (!line) continue;
        const auto analysis = script::analyze_line(line->line, config.segmentation);
        if (analysis.segments.size() != word.size()) continue;
        for (std::size_t i = 0; i < word.size(); ++i) {
            const shaping::GlyphClass g{word[i], forms[i]};
            if (count[g] >= training.per_class) continue;
            ++count[g];
            const auto f = features::extract_features(analysis.segments[i]);
            out.push_back({std::vector<double>(f.begin(), f.end()), g});
        }
    }
    if (out.empty()) throw Error(ErrorCode::EmptyInput, "no usable glyph samples were rendered");
    return out;
}

}  // namespace savo::training
