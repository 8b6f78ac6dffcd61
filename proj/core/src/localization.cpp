#include "savo/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "savo/imaging.hpp"

namespace savo::localization {

namespace {

constexpr double kCiZ = 1.96;

double sigmoid(double z) noexcept { return 1.0 / (1.0 + std::exp(-z)); }

template <typename Image>
void check_same_dims(std::span<const Image> frames) {
    if (frames.empty()) throw Error(ErrorCode::EmptyInput, "no frames to integrate");
    for (const auto& f : frames) {
        if (f.width() != frames.front().width() || f.height() != frames.front().height()) {
            throw Error(ErrorCode::DimensionMismatch, "frames differ in size");
        }
    }
}

double combine(std::vector<double>& values, MfiStatistic stat) {
    if (stat == MfiStatistic::Mean) {
        return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct Hidden {
    std::array<double, MlpModel::kInputs> x{};
    std::array<double, MlpModel::kHidden> h{};
    double y = 0.0;
};

Hidden forward_pass(const MlpModel& m, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(MlpModel::kInputs)) {
        throw Error(ErrorCode::BadInputLength, "MLP expects 10 inputs");
    }
    Hidden s;
    for (int i = 0; i < MlpModel::kInputs; ++i) {
        s.x[static_cast<std::size_t>(i)] = (x[static_cast<std::size_t>(i)] - m.input_mean[static_cast<std::size_t>(i)]) /
                                           m.input_scale[static_cast<std::size_t>(i)];
    }
    double z2 = m.b2;
    for (int j = 0; j < MlpModel::kHidden; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        double z = m.b1[ju];
        for (int i = 0; i < MlpModel::kInputs; ++i) z += m.w1[ju][static_cast<std::size_t>(i)] * s.x[static_cast<std::size_t>(i)];
        s.h[ju] = sigmoid(z);
        z2 += m.w2[ju] * s.h[ju];
    }
    s.y = sigmoid(z2);
    return s;
}

template <std::size_t N>
std::array<double, N> array_from(const nlohmann::json& j) {
    auto v = j.get<std::vector<double>>();
    if (v.size() != N) throw Error(ErrorCode::MalformedInput, "MLP array has wrong length");
    std::array<double, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

}  // namespace

GrayImage integrate_frames(std::span<const GrayImage> frames, MfiStatistic stat) {
    check_same_dims(frames);
    GrayImage out(frames.front().width(), frames.front().height());
    std::vector<double> values(frames.size());
    auto dst = out.pixels();
    for (std::size_t p = 0; p < dst.size(); ++p) {
        for (std::size_t f = 0; f < frames.size(); ++f) values[f] = frames[f].pixels()[p];
        dst[p] = combine(values, stat);
    }
    return out;
}

ColorImage integrate_frames(std::span<const ColorImage> frames, MfiStatistic stat) {
    check_same_dims(frames);
    ColorImage out(frames.front().width(), frames.front().height());
    std::vector<double> values(frames.size());
    auto dst = out.pixels();
    auto channel = [&](std::size_t p, auto member) {
        for (std::size_t f = 0; f < frames.size(); ++f) values[f] = frames[f].pixels()[p].*member;
        return static_cast<std::uint8_t>(std::clamp(std::lround(combine(values, stat)), 0L, 255L));
    };
    for (std::size_t p = 0; p < dst.size(); ++p) {
        dst[p] = Rgb{channel(p, &Rgb::r), channel(p, &Rgb::g), channel(p, &Rgb::b)};
    }
    return out;
}

BandFeatures band_features(const GrayImage& value, const GrayImage& edges, const Band& band) {
    if (value.width() != edges.width() || value.height() != edges.height()) {
        throw Error(ErrorCode::DimensionMismatch, "value and edge images differ in size");
    }
    const bool rows = band.axis == Axis::Rows;
    const int along = rows ? value.height() : value.width();
    const int across = rows ? value.width() : value.height();
    const int a0 = band.start;
    const int a1 = band.start + band.length - 1;
    const int s0 = band.span_begin < 0 ? 0 : band.span_begin;
    const int s1 = band.span_end < 0 ? across - 1 : band.span_end;
    if (band.length < 1 || a0 < 0 || a1 >= along || s0 > s1 || s1 >= across) {
        throw Error(ErrorCode::EmptyBand, "band is empty or outside the image");
    }

    BandFeatures out;
    const GrayImage* images[2] = {&value, &edges};
    for (int k = 0; k < 2; ++k) {
        const GrayImage& img = *images[k];
        double sum = 0.0;
        long n = 0;
        for (int a = a0; a <= a1; ++a) {
            for (int s = s0; s <= s1; ++s) {
                sum += rows ? img.at(s, a) : img.at(a, s);
                ++n;
            }
        }
        const double mean = sum / static_cast<double>(n);
        double m2 = 0.0;
        double m3 = 0.0;
        for (int a = a0; a <= a1; ++a) {
            for (int s = s0; s <= s1; ++s) {
                const double d = (rows ? img.at(s, a) : img.at(a, s)) - mean;
                m2 += d * d;
                m3 += d * d * d;
            }
        }
        m2 /= static_cast<double>(n);
        m3 /= static_cast<double>(n);
        const double half = kCiZ * std::sqrt(m2);
        const std::size_t base = static_cast<std::size_t>(5 * k);
        out.values[base + 0] = mean;
        out.values[base + 1] = m2;
        out.values[base + 2] = m3;
        out.values[base + 3] = mean - half;
        out.values[base + 4] = mean + half;
    }
    return out;
}

double mlp_forward(const MlpModel& model, std::span<const double> x) { return forward_pass(model, x).y; }

double mlp_loss(const MlpModel& model, std::span<const double> x, double target) {
    const double d = mlp_forward(model, x) - target;
    return 0.5 * d * d;
}

MlpGradient mlp_gradient(const MlpModel& model, std::span<const double> x, double target) {
    const Hidden s = forward_pass(model, x);
    MlpGradient g;
    const double dz2 = (s.y - target) * s.y * (1.0 - s.y);
    g.b2 = dz2;
    for (int j = 0; j < MlpModel::kHidden; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        g.w2[ju] = dz2 * s.h[ju];
        const double dz1 = dz2 * model.w2[ju] * s.h[ju] * (1.0 - s.h[ju]);
        g.b1[ju] = dz1;
        for (int i = 0; i < MlpModel::kInputs; ++i) {
            g.w1[ju][static_cast<std::size_t>(i)] = dz1 * s.x[static_cast<std::size_t>(i)];
        }
    }
    return g;
}

MlpTrainResult mlp_train(std::span<const TrainingSample> data, const MlpTrainConfig& config) {
    if (config.epochs < 1) throw Error(ErrorCode::BadArgument, "epochs must be >= 1");
    if (data.empty()) throw Error(ErrorCode::EmptyInput, "no training samples");
    const bool has_pos = std::any_of(data.begin(), data.end(), [](const auto& s) { return s.label == 1; });
    const bool has_neg = std::any_of(data.begin(), data.end(), [](const auto& s) { return s.label == 0; });
    if (!has_pos || !has_neg) throw Error(ErrorCode::DegenerateData, "both classes are required");

    MlpTrainResult result;
    MlpModel& m = result.model;
    const double n = static_cast<double>(data.size());
    for (std::size_t i = 0; i < kBandFeatureCount; ++i) {
        double mean = 0.0;
        for (const auto& s : data) mean += s.features.values[i];
        mean /= n;
        double var = 0.0;
        for (const auto& s : data) var += (s.features.values[i] - mean) * (s.features.values[i] - mean);
        const double sd = std::sqrt(var / n);
        m.input_mean[i] = mean;
        m.input_scale[i] = sd > 1e-12 ? sd : 1.0;
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> init(-0.5, 0.5);
    for (auto& row : m.w1) {
        for (auto& w : row) w = init(rng);
    }
    for (auto& b : m.b1) b = init(rng);
    for (auto& w : m.w2) w = init(rng);
    m.b2 = init(rng);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    for (int e = 0; e < config.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss = 0.0;
        for (auto idx : order) {
            const auto& s = data[idx];
            const double target = s.label ? 1.0 : 0.0;
            loss += mlp_loss(m, s.features.values, target);
            const MlpGradient g = mlp_gradient(m, s.features.values, target);
            for (int j = 0; j < MlpModel::kHidden; ++j) {
                const auto ju = static_cast<std::size_t>(j);
                for (int i = 0; i < MlpModel::kInputs; ++i) {
                    m.w1[ju][static_cast<std::size_t>(i)] -= config.lr * g.w1[ju][static_cast<std::size_t>(i)];
                }
                m.b1[ju] -= config.lr * g.b1[ju];
                m.w2[ju] -= config.lr * g.w2[ju];
            }
            m.b2 -= config.lr * g.b2;
        }
        result.loss_history.push_back(loss / n);
    }
    return result;
}

std::string mlp_to_json(const MlpModel& model) {
    nlohmann::json j;
    j["version"] = "1";
    j["topology"] = {MlpModel::kInputs, MlpModel::kHidden, 1};
    j["w1"] = model.w1;
    j["b1"] = model.b1;
    j["w2"] = {model.w2};
    j["b2"] = {model.b2};
    j["input_mean"] = model.input_mean;
    j["input_scale"] = model.input_scale;
    return j.dump(2);
}

MlpModel mlp_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        if (j.at("version").get<std::string>() != "1") throw Error(ErrorCode::MalformedInput, "unsupported MLP version");
        if (j.at("topology").get<std::vector<int>>() != std::vector<int>{10, 3, 1}) {
            throw Error(ErrorCode::MalformedInput, "MLP topology must be [10,3,1]");
        }
        MlpModel m;
        const auto& w1 = j.at("w1");
        if (!w1.is_array() || w1.size() != MlpModel::kHidden) throw Error(ErrorCode::MalformedInput, "w1 must be 3x10");
        for (std::size_t r = 0; r < MlpModel::kHidden; ++r) m.w1[r] = array_from<MlpModel::kInputs>(w1[r]);
        m.b1 = array_from<MlpModel::kHidden>(j.at("b1"));
        const auto& w2 = j.at("w2");
        m.w2 = array_from<MlpModel::kHidden>(w2.is_array() && !w2.empty() && w2[0].is_array() ? w2[0] : w2);
        const auto& b2 = j.at("b2");
        m.b2 = b2.is_array() ? b2.at(0).get<double>() : b2.get<double>();
        if (j.contains("input_mean")) m.input_mean = array_from<MlpModel::kInputs>(j["input_mean"]);
        if (j.contains("input_scale")) m.input_scale = array_from<MlpModel::kInputs>(j["input_scale"]);
        auto finite = [](double v) { return std::isfinite(v); };
        bool ok = std::isfinite(m.b2) && std::all_of(m.b1.begin(), m.b1.end(), finite) &&
                  std::all_of(m.w2.begin(), m.w2.end(), finite);
        for (const auto& row : m.w1) ok = ok && std::all_of(row.begin(), row.end(), finite);
        if (!ok) throw Error(ErrorCode::MalformedInput, "MLP weights must be finite");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("bad MLP JSON: ") + e.what());
    }
}

std::vector<Band> make_bands(Axis axis, int extent, int band_height, int span_begin, int span_end) {
    if (band_height < 1) throw Error(ErrorCode::BadArgument, "band height must be >= 1");
    std::vector<Band> bands;
    for (int start = 0; start < extent; start += band_height) {
        bands.push_back(Band{axis, start, std::min(band_height, extent - start), span_begin, span_end});
    }
    return bands;
}

std::vector<BandDecision> score_bands(const GrayImage& value, const GrayImage& edges, const MlpModel& model,
                                      std::span<const Band> bands, double threshold) {
    std::vector<BandDecision> out;
    out.reserve(bands.size());
    for (const auto& b : bands) {
        const double score = mlp_forward(model, band_features(value, edges, b).values);
        out.push_back(BandDecision{b, score, score >= threshold});
    }
    return out;
}

BandImages band_images(const ColorImage& frame) {
    BandImages im;
    im.value = imaging::value_channel(imaging::rgb_to_hsv(frame));
    im.edges = imaging::sobel_magnitude(im.value);
    return im;
}

std::vector<bool> classify_bands(const ColorImage& frame, const MlpModel& model, Axis axis, int band_height,
                                 double threshold) {
    const BandImages im = band_images(frame);
    const int extent = axis == Axis::Rows ? frame.height() : frame.width();
    const auto bands = make_bands(axis, extent, band_height);
    std::vector<bool> flags;
    for (const auto& d : score_bands(im.value, im.edges, model, bands, threshold)) flags.push_back(d.text);
    return flags;
}

std::vector<bool> expand_band_mask(std::span<const Band> bands, const std::vector<bool>& flags, int extent) {
    if (bands.size() != flags.size()) throw Error(ErrorCode::DimensionMismatch, "one flag per band required");
    std::vector<bool> out(static_cast<std::size_t>(extent), false);
    for (std::size_t i = 0; i < bands.size(); ++i) {
        if (!flags[i]) continue;
        for (int p = bands[i].start; p < bands[i].start + bands[i].length && p < extent; ++p) {
            out[static_cast<std::size_t>(p)] = true;
        }
    }
    return out;
}

void fill_gaps(std::vector<bool>& flags, int max_gap) {
    if (max_gap < 1) return;
    std::size_t i = 0;
    while (i < flags.size() && !flags[i]) ++i;
    while (i < flags.size()) {
        std::size_t j = i;
        while (j < flags.size() && flags[j]) ++j;
        std::size_t k = j;
        while (k < flags.size() && !flags[k]) ++k;
        if (k < flags.size() && k - j <= static_cast<std::size_t>(max_gap)) {
            for (std::size_t p = j; p < k; ++p) flags[p] = true;
        }
        i = k;
    }
}

std::vector<TextRegion> merge_masks(const std::vector<bool>& rows, const std::vector<bool>& cols, int width,
                                    int height, int min_area) {
    if (rows.size() != static_cast<std::size_t>(height) || cols.size() != static_cast<std::size_t>(width)) {
        throw Error(ErrorCode::DimensionMismatch, "masks must cover the frame");
    }
    BinaryImage mask(width, height);
    for (int y = 0; y < height; ++y) {
        if (!rows[static_cast<std::size_t>(y)]) continue;
        for (int x = 0; x < width; ++x) mask.at(x, y) = cols[static_cast<std::size_t>(x)] ? 1 : 0;
    }
    std::vector<TextRegion> regions;
    for (const auto& comp : imaging::connected_components(mask)) {
        if (comp.pixel_count() < min_area) continue;
        regions.push_back(TextRegion{comp.bbox, 0, 0, 0.0});
    }
    return regions;
}

std::vector<TextRegion> localize_text(const ColorImage& frame, const MlpModel& model, const LocalizeConfig& config) {
    const BandImages im = band_images(frame);
    const int w = frame.width();
    const int h = frame.height();

    const auto row_bands = make_bands(Axis::Rows, h, config.band_height);
    const auto row_scores = score_bands(im.value, im.edges, model, row_bands, config.threshold);
    std::vector<bool> row_flags;
    for (const auto& d : row_scores) row_flags.push_back(d.text);
    fill_gaps(row_flags, config.row_gap_fill);

    std::vector<TextRegion> regions;
    std::size_t i = 0;
    while (i < row_bands.size()) {
        if (!row_flags[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        double row_score = 0.0;
        while (j < row_bands.size() && row_flags[j]) row_score += row_scores[j++].score;
        row_score /= static_cast<double>(j - i);
        const int y0 = row_bands[i].start;
        const int y1 = row_bands[j - 1].start + row_bands[j - 1].length - 1;

        const auto col_bands = make_bands(Axis::Cols, w, config.band_height, y0, y1);
        const auto col_scores = score_bands(im.value, im.edges, model, col_bands, config.threshold);
        std::vector<bool> col_flags;
        for (const auto& d : col_scores) col_flags.push_back(d.text);
        fill_gaps(col_flags, config.col_gap_fill);

        std::vector<bool> window_rows(static_cast<std::size_t>(h), false);
        for (int y = y0; y <= y1; ++y) window_rows[static_cast<std::size_t>(y)] = true;
        for (auto r : merge_masks(window_rows, expand_band_mask(col_bands, col_flags, w), w, h, config.min_area)) {
            double col_score = 0.0;
            int n = 0;
            for (const auto& d : col_scores) {
                if (d.band.start + d.band.length - 1 < r.box.x0 || d.band.start > r.box.x1) continue;
                col_score += d.score;
                ++n;
            }
            r.score = 0.5 * (row_score + (n > 0 ? col_score / n : 0.0));
            regions.push_back(r);
        }
        i = j;
    }
    return regions;
}

}  // namespace savo::localization
