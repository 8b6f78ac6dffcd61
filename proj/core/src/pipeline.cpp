#include "savo/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "savo/error.hpp"
#include "savo/imaging.hpp"
#include "savo/png_io.hpp"
#include "savo/utf8.hpp"

namespace savo::pipeline {

using nlohmann::json;

// ---------------------------------------------------------------------------
// configuration

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, std::string_view expected) {
    throw Error(ErrorCode::BadArgument, "config key '" + key + "': '" + value + "' is not " + std::string(expected));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) bad_value(key, value, "a number");
    return out;
}

int int_in(const std::string& key, const std::string& value, int lo, int hi) {
    const int v = parse_number<int>(key, value);
    if (v < lo || v > hi) bad_value(key, value, "in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

// Open interval at `lo` when lo_open is set.
double real_in(const std::string& key, const std::string& value, double lo, double hi, bool lo_open) {
    const double v = parse_number<double>(key, value);
    if (!std::isfinite(v) || v > hi || (lo_open ? v <= lo : v < lo)) {
        std::ostringstream range;
        range << (lo_open ? "in (" : "in [") << lo << ", " << hi << "]";
        bad_value(key, value, range.str());
    }
    return v;
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(v);
}

using Setter = std::function<void(PipelineConfig&, const std::string& key, const std::string& value)>;
using Getter = std::function<std::string(const PipelineConfig&)>;

struct Key {
    std::string_view name;
    Setter set;
    Getter get;
};

const std::vector<Key>& keys() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr int imax = std::numeric_limits<int>::max();
    static const std::vector<Key> table{
        {"band_height", [](auto& c, auto& k, auto& v) { c.localize.band_height = int_in(k, v, 1, 4096); },
         [](auto& c) { return std::to_string(c.localize.band_height); }},
        {"mlp_threshold", [](auto& c, auto& k, auto& v) { c.localize.threshold = real_in(k, v, 0.0, 1.0, false); },
         [](auto& c) { return format_real(c.localize.threshold); }},
        {"min_area", [](auto& c, auto& k, auto& v) { c.localize.min_area = int_in(k, v, 1, imax); },
         [](auto& c) { return std::to_string(c.localize.min_area); }},
        {"row_gap_fill", [](auto& c, auto& k, auto& v) { c.localize.row_gap_fill = int_in(k, v, 0, 4096); },
         [](auto& c) { return std::to_string(c.localize.row_gap_fill); }},
        {"col_gap_fill", [](auto& c, auto& k, auto& v) { c.localize.col_gap_fill = int_in(k, v, 0, 4096); },
         [](auto& c) { return std::to_string(c.localize.col_gap_fill); }},
        {"mfi_window", [](auto& c, auto& k, auto& v) { c.mfi_window = int_in(k, v, 1, imax); },
         [](auto& c) { return std::to_string(c.mfi_window); }},
        {"mfi_statistic",
         [](auto& c, auto& k, auto& v) {
             if (v == "median") c.mfi_statistic = localization::MfiStatistic::Median;
             else if (v == "mean") c.mfi_statistic = localization::MfiStatistic::Mean;
             else bad_value(k, v, "median or mean");
         },
         [](auto& c) { return std::string(c.mfi_statistic == localization::MfiStatistic::Median ? "median" : "mean"); }},
        {"fcm_m", [](auto& c, auto& k, auto& v) { c.binarize.m = real_in(k, v, 1.0, 100.0, true); },
         [](auto& c) { return format_real(c.binarize.m); }},
        {"fcm_tol", [](auto& c, auto& k, auto& v) { c.binarize.tol = real_in(k, v, 0.0, 1.0, true); },
         [](auto& c) { return format_real(c.binarize.tol); }},
        {"fcm_max_iter", [](auto& c, auto& k, auto& v) { c.binarize.max_iter = int_in(k, v, 1, 100000); },
         [](auto& c) { return std::to_string(c.binarize.max_iter); }},
        {"knn_k", [](auto& c, auto& k, auto& v) { c.knn.k = int_in(k, v, 1, imax); },
         [](auto& c) { return std::to_string(c.knn.k); }},
        {"knn_m", [](auto& c, auto& k, auto& v) { c.knn.m = real_in(k, v, 1.0, 100.0, true); },
         [](auto& c) { return format_real(c.knn.m); }},
        {"knn_exponent",
         [](auto& c, auto& k, auto& v) {
             if (v == "auto") c.knn.exponent.reset();
             else c.knn.exponent = real_in(k, v, 0.0, 100.0, true);
         },
         [](auto& c) { return c.knn.exponent ? format_real(*c.knn.exponent) : std::string("auto"); }},
        {"baseline_band_ratio",
         [](auto& c, auto& k, auto& v) { c.segmentation.baseline_band_ratio = real_in(k, v, 0.0, 0.5, false); },
         [](auto& c) { return format_real(c.segmentation.baseline_band_ratio); }},
        {"diacritic_area_ratio",
         [](auto& c, auto& k, auto& v) { c.segmentation.diacritic_area_ratio = real_in(k, v, 0.0, 1.0, false); },
         [](auto& c) { return format_real(c.segmentation.diacritic_area_ratio); }},
        {"diacritic_pixel_ratio",
         [](auto& c, auto& k, auto& v) { c.segmentation.diacritic_pixel_ratio = real_in(k, v, 0.0, 1.0, false); },
         [](auto& c) { return format_real(c.segmentation.diacritic_pixel_ratio); }},
        {"narrow_ratio", [](auto& c, auto& k, auto& v) { c.segmentation.narrow_ratio = real_in(k, v, 0.0, inf, false); },
         [](auto& c) { return format_real(c.segmentation.narrow_ratio); }},
        {"valley_tolerance", [](auto& c, auto& k, auto& v) { c.segmentation.valley_tolerance = int_in(k, v, 0, 64); },
         [](auto& c) { return std::to_string(c.segmentation.valley_tolerance); }},
        {"min_ligature_run", [](auto& c, auto& k, auto& v) { c.segmentation.min_ligature_run = int_in(k, v, 1, 64); },
         [](auto& c) { return std::to_string(c.segmentation.min_ligature_run); }},
        {"max_merges", [](auto& c, auto& k, auto& v) { c.segmentation.max_merges = int_in(k, v, 0, 2); },
         [](auto& c) { return std::to_string(c.segmentation.max_merges); }},
        {"beam", [](auto& c, auto& k, auto& v) { c.beam = int_in(k, v, 1, 1000); },
         [](auto& c) { return std::to_string(c.beam); }},
        {"max_distance", [](auto& c, auto& k, auto& v) { c.max_distance = int_in(k, v, 0, 64); },
         [](auto& c) { return std::to_string(c.max_distance); }},
        {"max_hypotheses", [](auto& c, auto& k, auto& v) { c.max_hypotheses = int_in(k, v, 1, 1000); },
         [](auto& c) { return std::to_string(c.max_hypotheses); }},
        {"line_height", [](auto& c, auto& k, auto& v) { c.line_height = int_in(k, v, 8, 1024); },
         [](auto& c) { return std::to_string(c.line_height); }},
        {"region_padding", [](auto& c, auto& k, auto& v) { c.region_padding = int_in(k, v, 0, 256); },
         [](auto& c) { return std::to_string(c.region_padding); }},
        {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); },
         [](auto& c) { return c.seed ? std::to_string(*c.seed) : std::string(); }},
        {"workers", [](auto& c, auto& k, auto& v) { c.workers = int_in(k, v, 0, 1024); },
         [](auto& c) { return std::to_string(c.workers); }},
        {"lexicon", [](auto& c, auto&, auto& v) { c.lexicon = v; }, [](auto& c) { return c.lexicon; }},
        {"models", [](auto& c, auto&, auto& v) { c.models = v; }, [](auto& c) { return c.models; }},
    };
    return table;
}

}  // namespace

PipelineConfig parse_config(std::string_view text) {
    PipelineConfig config;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::BadArgument, "config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const auto it = std::find_if(keys().begin(), keys().end(), [&](const Key& k) { return k.name == key; });
        if (it == keys().end()) throw Error(ErrorCode::BadArgument, "unknown config key '" + key + "'");
        it->set(config, key, value);
    }
    if (!config.seed) throw Error(ErrorCode::BadArgument, "config must set 'seed'");
    return config;
}

PipelineConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

std::string config_to_text(const PipelineConfig& config) {
    std::string out;
    for (const auto& k : keys()) {
        out += std::string(k.name) + " = " + k.get(config) + "\n";
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
}

Models load_models(const std::filesystem::path& dir) {
    const auto read_model = [&](std::string_view name) {
        const auto path = dir / name;
        if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::MissingModel, "missing model " + path.string());
        return read_text_file(path);
    };
    Models m;
    m.mlp = localization::mlp_from_json(read_model(kMlpFile));
    m.store = recognition::store_from_json(read_model(kStoreFile));
    return m;
}

// ---------------------------------------------------------------------------
// per-region stages

std::optional<PreparedLine> prepare_line(const GrayImage& gray, const Box& region, const PipelineConfig& config,
                                         std::uint64_t seed) {
    const int pad = config.region_padding;
    const Box padded = imaging::clamp_box(Box{region.x0 - pad, region.y0 - pad, region.x1 + pad, region.y1 + pad},
                                          gray.width(), gray.height());
    if (padded.empty() || padded.width() < 3 || padded.height() < 3) return std::nullopt;

    binarization::BinarizeConfig bc = config.binarize;
    bc.seed = seed;
    const BinaryImage mask = binarization::binarize_region(gray, padded, bc);
    const Box ink = imaging::ink_bbox(mask);
    if (ink.empty()) return std::nullopt;

    PreparedLine out;
    out.ink_box = Box{padded.x0 + ink.x0, padded.y0 + ink.y0, padded.x0 + ink.x1, padded.y0 + ink.y1};
    out.line = imaging::crop(mask, ink);
    const int h = out.line.height();
    if (h < config.line_height) {
        const double factor = static_cast<double>(config.line_height) / h;
        const GrayImage big = imaging::upscale(imaging::to_gray(out.line), factor);
        BinaryImage up = imaging::threshold(big, 127.5);
        const Box upbox = imaging::ink_bbox(up);
        if (upbox.empty()) return std::nullopt;
        out.line = imaging::crop(up, upbox);
    } else if (h > config.line_height) {
        const int w = std::max(1, static_cast<int>(std::lround(out.line.width() * config.line_height / double(h))));
        out.line = imaging::resize_nearest(out.line, w, config.line_height);
    }
    return out;
}

std::vector<post::Candidate> segment_hypotheses(std::span<const double> features, const recognition::PrototypeStore& store,
                                                const PipelineConfig& config) {
    recognition::KnnParams params = config.knn;
    params.k = std::min<int>(params.k, static_cast<int>(store.prototypes.size()));
    std::vector<post::Candidate> out;
    for (const auto& r : recognition::classify(features, store, params)) {
        if (r.membership <= 0.0 || static_cast<int>(out.size()) >= config.max_hypotheses) break;
        out.push_back({r.glyph, r.membership});
    }
    return out;
}

std::string_view to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::Localize: return "localize";
        case Stage::Binarize: return "binarize";
        case Stage::Segment: return "segment";
        case Stage::Features: return "features";
        case Stage::Classify: return "classify";
    }
    return "localize";
}

std::optional<Stage> stage_from_string(std::string_view text) noexcept {
    for (const Stage s : {Stage::Localize, Stage::Binarize, Stage::Segment, Stage::Features, Stage::Classify}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// result JSON

namespace {

json box_json(const Box& b) { return {{"x0", b.x0}, {"y0", b.y0}, {"x1", b.x1}, {"y1", b.y1}}; }
Box box_from(const json& j) { return {j.at("x0").get<int>(), j.at("y0").get<int>(), j.at("x1").get<int>(), j.at("y1").get<int>()}; }

json candidate_json(const post::Candidate& c) {
    return {{"letter", utf8::encode(c.glyph.letter)}, {"form", shaping::to_string(c.glyph.form)},
            {"membership", c.membership}};
}

post::Candidate candidate_from(const json& j) {
    const auto letter = utf8::decode(j.at("letter").get<std::string>());
    const auto form = shaping::form_from_string(j.at("form").get<std::string>());
    if (letter.size() != 1 || !form) throw Error(ErrorCode::MalformedInput, "bad hypothesis entry");
    return {{letter.front(), *form}, j.at("membership").get<double>()};
}

json hypotheses_json(const std::vector<std::vector<post::Candidate>>& segs) {
    json out = json::array();
    for (const auto& seg : segs) {
        json hyps = json::array();
        for (const auto& c : seg) hyps.push_back(candidate_json(c));
        out.push_back({{"hypotheses", std::move(hyps)}});
    }
    return out;
}

std::vector<std::vector<post::Candidate>> hypotheses_from(const json& j) {
    std::vector<std::vector<post::Candidate>> out;
    for (const auto& seg : j) {
        auto& v = out.emplace_back();
        for (const auto& c : seg.at("hypotheses")) v.push_back(candidate_from(c));
    }
    return out;
}

}  // namespace

std::string result_to_json(const RecognitionResult& result) {
    json j;
    j["version"] = "1";
    auto& dets = j["detections"] = json::array();
    for (const auto& d : result.detections) {
        json e = box_json(d.box);
        e["region_id"] = d.region_id;
        e["frame_first"] = d.frame_first;
        e["frame_last"] = d.frame_last;
        e["score"] = d.score;
        e["word"] = utf8::encode(d.word.letters);
        e["recognized"] = utf8::encode(d.word.recognized);
        e["word_score"] = d.word.score;
        e["lexicon_status"] = post::to_string(d.word.status);
        e["distance"] = d.word.distance;
        e["segments"] = hypotheses_json(d.segments);
        dets.push_back(std::move(e));
    }
    return j.dump(1) + "\n";
}

RecognitionResult result_from_json(const std::string& text) {
    try {
        const auto j = json::parse(text);
        if (j.at("version").get<std::string>() != "1") throw Error(ErrorCode::MalformedInput, "unsupported result version");
        RecognitionResult r;
        for (const auto& e : j.at("detections")) {
            Detection d;
            d.region_id = e.at("region_id").get<int>();
            d.frame_first = e.at("frame_first").get<int>();
            d.frame_last = e.at("frame_last").get<int>();
            d.box = box_from(e);
            d.score = e.at("score").get<double>();
            d.word.letters = utf8::decode(e.at("word").get<std::string>());
            d.word.recognized = utf8::decode(e.value("recognized", e.at("word").get<std::string>()));
            d.word.score = e.value("word_score", 0.0);
            const auto status = e.value("lexicon_status", std::string("unknown"));
            d.word.status = status == "exact"       ? post::LexiconStatus::Exact
                            : status == "corrected" ? post::LexiconStatus::Corrected
                                                    : post::LexiconStatus::Unknown;
            d.word.distance = e.value("distance", std::size_t{0});
            if (e.contains("segments")) d.segments = hypotheses_from(e.at("segments"));
            r.detections.push_back(std::move(d));
        }
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("bad result JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// window records and stage dumps

namespace {

struct RegionRecord {
    localization::TextRegion region;
    bool dropped = false;
    std::optional<PreparedLine> line;
    std::optional<script::LineAnalysis> analysis;
    std::vector<features::GlyphFeatureVector> features;
    std::vector<std::vector<post::Candidate>> hypotheses;
};

struct WindowRecord {
    int index = 0;
    int frame_first = 0;
    int frame_last = 0;
    std::vector<RegionRecord> regions;
};

std::string window_stem(int index) {
    std::ostringstream s;
    s << "window_" << std::setw(4) << std::setfill('0') << index;
    return s.str();
}

std::string line_file(int window, std::size_t region) {
    std::ostringstream s;
    s << window_stem(window) << "_r" << std::setw(2) << std::setfill('0') << region << ".png";
    return s.str();
}

std::string segment_file(int window, std::size_t region, std::size_t segment) {
    std::ostringstream s;
    s << window_stem(window) << "_r" << std::setw(2) << std::setfill('0') << region << "_s" << std::setw(2)
      << std::setfill('0') << segment << ".png";
    return s.str();
}

json mark_json(const script::DiacriticMark& m) {
    json px = json::array();
    for (const auto& p : m.component.pixels) px.push_back({p.x, p.y});
    return {{"position", m.position == script::MarkPosition::Above ? "above" : "below"}, {"pixels", std::move(px)}};
}

script::DiacriticMark mark_from(const json& j) {
    script::DiacriticMark m;
    m.position = j.at("position").get<std::string>() == "above" ? script::MarkPosition::Above : script::MarkPosition::Below;
    Box b{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1};
    for (const auto& p : j.at("pixels")) {
        const Point pt{p.at(0).get<int>(), p.at(1).get<int>()};
        m.component.pixels.push_back(pt);
        b = {std::min(b.x0, pt.x), std::min(b.y0, pt.y), std::max(b.x1, pt.x), std::max(b.y1, pt.y)};
    }
    if (m.component.pixels.empty()) throw Error(ErrorCode::MalformedInput, "diacritic without pixels");
    m.component.bbox = b;
    return m;
}

bool same_mark(const script::DiacriticMark& a, const script::DiacriticMark& b) {
    return a.position == b.position && a.component.pixels.size() == b.component.pixels.size() &&
           std::equal(a.component.pixels.begin(), a.component.pixels.end(), b.component.pixels.begin(),
                      [](const Point& p, const Point& q) { return p.x == q.x && p.y == q.y; });
}

void write_record(const WindowRecord& rec, Stage stage, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json j;
    j["version"] = "1";
    j["stage"] = to_string(stage);
    j["window"] = rec.index;
    j["frame_first"] = rec.frame_first;
    j["frame_last"] = rec.frame_last;
    auto& regions = j["regions"] = json::array();
    for (std::size_t r = 0; r < rec.regions.size(); ++r) {
        const auto& rr = rec.regions[r];
        json e = box_json(rr.region.box);
        e["score"] = rr.region.score;
        if (stage >= Stage::Binarize) {
            e["dropped"] = rr.dropped;
            if (rr.line) {
                const auto file = line_file(rec.index, r);
                io::write_png(dir / file, rr.line->line);
                e["line"] = file;
                e["ink"] = box_json(rr.line->ink_box);
            }
        }
        if (stage >= Stage::Segment && rr.analysis) {
            const auto& a = *rr.analysis;
            e["baseline"] = a.baseline;
            json marks = json::array();
            for (const auto& m : a.diacritics) marks.push_back(mark_json(m));
            e["diacritics"] = std::move(marks);
            json segs = json::array();
            for (std::size_t k = 0; k < a.segments.size(); ++k) {
                const auto& s = a.segments[k];
                json attached = json::array();
                for (const auto& m : s.diacritics) {
                    const auto it = std::find_if(a.diacritics.begin(), a.diacritics.end(),
                                                 [&](const auto& d) { return same_mark(d, m); });
                    const auto& b = m.component.bbox;
                    attached.push_back({{"index", it - a.diacritics.begin()},
                                        {"position", m.position == script::MarkPosition::Above ? "above" : "below"},
                                        {"bbox", {b.x0, b.y0, b.x1, b.y1}}});
                }
                const auto crop = segment_file(rec.index, r, k);
                io::write_png(dir / crop, s.crop);
                segs.push_back({{"span", {s.x0, s.x1}}, {"merge_count", s.merge_count},
                                {"joined_left", s.joined_left}, {"joined_right", s.joined_right},
                                {"diacritics", std::move(attached)}, {"crop", crop}});
            }
            e["segments"] = std::move(segs);
        }
        if (stage >= Stage::Features) {
            json feats = json::array();
            for (const auto& f : rr.features) feats.push_back(f);
            e["features"] = std::move(feats);
        }
        if (stage >= Stage::Classify) e["hypotheses"] = hypotheses_json(rr.hypotheses);
        regions.push_back(std::move(e));
    }
    write_text_file(dir / (window_stem(rec.index) + ".json"), j.dump(1) + "\n");
}

WindowRecord read_record(int index, Stage stage, const std::filesystem::path& dir) {
    const auto path = dir / (window_stem(index) + ".json");
    if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::Io, "missing stage dump " + path.string());
    try {
        const auto j = json::parse(read_text_file(path));
        const auto dumped = stage_from_string(j.at("stage").get<std::string>());
        if (!dumped || *dumped < stage) {
            throw Error(ErrorCode::MalformedInput, path.string() + " does not hold stage " + std::string(to_string(stage)));
        }
        WindowRecord rec;
        rec.index = index;
        rec.frame_first = j.at("frame_first").get<int>();
        rec.frame_last = j.at("frame_last").get<int>();
        for (const auto& e : j.at("regions")) {
            RegionRecord rr;
            rr.region = {box_from(e), rec.frame_first, rec.frame_last, e.at("score").get<double>()};
            if (stage >= Stage::Binarize) {
                rr.dropped = e.at("dropped").get<bool>();
                if (e.contains("line")) {
                    rr.line = PreparedLine{io::read_binary_png(dir / e.at("line").get<std::string>()), box_from(e.at("ink"))};
                }
            }
            if (stage >= Stage::Segment && e.contains("segments")) {
                script::LineAnalysis a;
                a.baseline = e.at("baseline").get<int>();
                a.height = rr.line->line.height();
                for (const auto& m : e.at("diacritics")) a.diacritics.push_back(mark_from(m));
                BinaryImage body = rr.line->line;
                for (const auto& m : a.diacritics) {
                    for (const auto& p : m.component.pixels) body.at(p.x, p.y) = 0;
                }
                for (const auto& s : e.at("segments")) {
                    script::GlyphSegment g;
                    g.x0 = s.at("span").at(0).get<int>();
                    g.x1 = s.at("span").at(1).get<int>();
                    g.merge_count = s.at("merge_count").get<int>();
                    g.joined_left = s.at("joined_left").get<bool>();
                    g.joined_right = s.at("joined_right").get<bool>();
                    g.crop = imaging::crop(body, Box{g.x0, 0, g.x1, body.height() - 1});
                    for (const auto& d : s.at("diacritics")) g.diacritics.push_back(a.diacritics.at(d.at("index").get<std::size_t>()));
                    a.segments.push_back(std::move(g));
                }
                rr.analysis = std::move(a);
            }
            if (stage >= Stage::Features && e.contains("features")) {
                for (const auto& f : e.at("features")) rr.features.push_back(f.get<features::GlyphFeatureVector>());
            }
            if (stage >= Stage::Classify && e.contains("hypotheses")) rr.hypotheses = hypotheses_from(e.at("hypotheses"));
            rec.regions.push_back(std::move(rr));
        }
        return rec;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedInput, "bad stage dump " + path.string() + ": " + e.what());
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void draw_box(ColorImage& img, const Box& b, Rgb color) {
    const Box c = imaging::clamp_box(b, img.width(), img.height());
    if (c.empty()) return;
    for (int x = c.x0; x <= c.x1; ++x) img.at(x, c.y0) = img.at(x, c.y1) = color;
    for (int y = c.y0; y <= c.y1; ++y) img.at(c.x0, y) = img.at(c.x1, y) = color;
}

class WindowRunner {
public:
    WindowRunner(const FrameLoader& load, const PipelineConfig& config, const Models& models, const post::Lexicon& lexicon,
                 const RunOptions& options)
        : load_(load), config_(config), models_(models), lexicon_(lexicon), options_(options) {}

    WindowRecord run(int index, int first, int last, std::vector<Detection>& out) const {
        WindowRecord rec;
        Stage done = Stage::Localize;
        bool have = false;
        if (options_.resume) {
            rec = read_record(index, options_.resume->first, options_.resume->second);
            done = options_.resume->first;
            have = true;
        }
        std::optional<ColorImage> integrated;
        if (!have || options_.overlay_dir) integrated = integrate(first, last);

        if (!have) {
            rec.index = index;
            rec.frame_first = first;
            rec.frame_last = last;
            guarded(Stage::Localize, first, [&] {
                for (auto r : localization::localize_text(*integrated, models_.mlp, config_.localize)) {
                    r.frame_first = first;
                    r.frame_last = last;
                    RegionRecord rr;
                    rr.region = r;
                    rec.regions.push_back(std::move(rr));
                }
            });
            dump(rec, Stage::Localize);
        }

        if (done < Stage::Binarize) {
            if (!integrated) integrated = integrate(first, last);
            const GrayImage gray = imaging::to_gray(*integrated);
            guarded(Stage::Binarize, first, [&] {
                for (std::size_t r = 0; r < rec.regions.size(); ++r) {
                    auto& rr = rec.regions[r];
                    rr.line = prepare_line(gray, rr.region.box, config_, mix_seed(*config_.seed, index, r));
                    rr.dropped = !rr.line;
                }
            });
            dump(rec, Stage::Binarize);
        }

        if (done < Stage::Segment) {
            guarded(Stage::Segment, first, [&] {
                for (auto& rr : rec.regions) {
                    if (rr.line) rr.analysis = script::analyze_line(rr.line->line, config_.segmentation);
                }
            });
            dump(rec, Stage::Segment);
        }

        if (done < Stage::Features) {
            guarded(Stage::Features, first, [&] {
                for (auto& rr : rec.regions) {
                    rr.features.clear();
                    if (!rr.analysis) continue;
                    for (const auto& s : rr.analysis->segments) rr.features.push_back(features::extract_features(s));
                }
            });
            dump(rec, Stage::Features);
        }

        if (done < Stage::Classify) {
            guarded(Stage::Classify, first, [&] {
                for (auto& rr : rec.regions) {
                    rr.hypotheses.clear();
                    for (const auto& f : rr.features) {
                        auto h = segment_hypotheses(f, models_.store, config_);
                        if (!h.empty()) rr.hypotheses.push_back(std::move(h));
                    }
                }
            });
            dump(rec, Stage::Classify);
        }

        guarded(Stage::Classify, first, [&] {
            for (const auto& rr : rec.regions) {
                if (rr.dropped || !rr.line || rr.hypotheses.empty()) continue;
                post::ReconstructConfig rc;
                rc.beam = config_.beam;
                const auto words = post::reconstruct_word(rr.hypotheses, rc);
                Detection d;
                d.frame_first = rr.region.frame_first;
                d.frame_last = rr.region.frame_last;
                d.box = rr.line->ink_box;
                d.score = rr.region.score;
                d.word = post::correct_word(words, lexicon_, static_cast<std::size_t>(config_.max_distance));
                d.segments = rr.hypotheses;
                out.push_back(std::move(d));
            }
        });

        if (options_.overlay_dir) {
            ColorImage overlay = *integrated;
            for (const auto& rr : rec.regions) draw_box(overlay, rr.region.box, {0, 0, 255});
            for (const auto& d : out) draw_box(overlay, d.box, {255, 0, 0});
            std::filesystem::create_directories(*options_.overlay_dir);
            io::write_png(*options_.overlay_dir / (window_stem(index) + ".png"), overlay);
        }
        return rec;
    }

private:
    ColorImage integrate(int first, int last) const {
        std::vector<ColorImage> frames;
        for (int f = first; f <= last; ++f) {
            guarded(Stage::Localize, f, [&] { frames.push_back(load_(static_cast<std::size_t>(f))); });
        }
        if (frames.size() == 1) return std::move(frames.front());
        return localization::integrate_frames(frames, config_.mfi_statistic);
    }

    template <typename F>
    static void guarded(Stage stage, int frame, F&& body) {
        try {
            body();
        } catch (const Error& e) {
            throw Error(e.code(), "stage " + std::string(to_string(stage)) + ", frame " + std::to_string(frame) + ": " +
                                      e.what());
        }
    }

    void dump(const WindowRecord& rec, Stage stage) const {
        for (const auto& [s, dir] : options_.dumps) {
            if (s == stage) write_record(rec, stage, dir);
        }
    }

    const FrameLoader& load_;
    const PipelineConfig& config_;
    const Models& models_;
    const post::Lexicon& lexicon_;
    const RunOptions& options_;
};

}  // namespace

RecognitionResult run_pipeline(std::size_t frame_count, const FrameLoader& load, const PipelineConfig& config,
                               const Models& models, const post::Lexicon& lexicon, const RunOptions& options) {
    if (!config.seed) throw Error(ErrorCode::BadArgument, "pipeline config needs a seed");
    if (frame_count == 0) throw Error(ErrorCode::EmptyInput, "no frames");
    if (models.store.prototypes.empty()) throw Error(ErrorCode::EmptyStore, "prototype store is empty");

    const int window = config.mfi_window;
    const int windows = static_cast<int>((frame_count + static_cast<std::size_t>(window) - 1) / window);
    std::vector<std::vector<Detection>> per_window(static_cast<std::size_t>(windows));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(windows));
    const WindowRunner runner(load, config, models, lexicon, options);

    std::atomic<int> next{0};
    const auto work = [&] {
        for (int w = next++; w < windows; w = next++) {
            const int first = w * window;
            const int last = std::min<int>(first + window, static_cast<int>(frame_count)) - 1;
            try {
                runner.run(w, first, last, per_window[static_cast<std::size_t>(w)]);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        }
    };
    int workers = config.workers > 0 ? config.workers : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, windows);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    RecognitionResult result;
    int id = 0;
    for (auto& dets : per_window) {
        for (auto& d : dets) {
            d.region_id = id++;
            result.detections.push_back(std::move(d));
        }
    }
    return result;
}

RecognitionResult run_pipeline(std::span<const ColorImage> frames, const PipelineConfig& config, const Models& models,
                               const post::Lexicon& lexicon, const RunOptions& options) {
    const FrameLoader load = [&](std::size_t i) { return frames[i]; };
    return run_pipeline(frames.size(), load, config, models, lexicon, options);
}

}  // namespace savo::pipeline
