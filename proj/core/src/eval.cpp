#include "savo/eval.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "savo/error.hpp"
#include "savo/postprocess.hpp"
#include "savo/utf8.hpp"

namespace savo::eval {

double iou(const Box& a, const Box& b) noexcept {
    if (a.empty() || b.empty()) return 0.0;
    const int w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0) + 1;
    const int h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0) + 1;
    if (w <= 0 || h <= 0) return 0.0;
    const double inter = static_cast<double>(w) * h;
    return inter / (static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter);
}

std::vector<Match> match_boxes(std::span<const Box> pred, std::span<const Box> truth, double threshold) {
    std::vector<Match> pairs;
    for (std::size_t p = 0; p < pred.size(); ++p) {
        for (std::size_t t = 0; t < truth.size(); ++t) {
            const double v = iou(pred[p], truth[t]);
            if (v >= threshold && v > 0.0) pairs.push_back({p, t, v});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Match& a, const Match& b) { return a.iou > b.iou; });
    std::vector<bool> used_p(pred.size()), used_t(truth.size());
    std::vector<Match> out;
    for (const auto& m : pairs) {
        if (used_p[m.pred] || used_t[m.truth]) continue;
        used_p[m.pred] = used_t[m.truth] = true;
        out.push_back(m);
    }
    return out;
}

DetectionCounts eval_detection(std::span<const Box> pred, std::span<const Box> truth, double threshold) {
    const auto m = match_boxes(pred, truth, threshold);
    return {m.size(), pred.size() - m.size(), truth.size() - m.size()};
}

RecognitionCounts eval_recognition(std::span<const IdWord> pred, std::span<const IdWord> truth) {
    std::map<std::string, const std::u32string*> predicted;
    for (const auto& p : pred) {
        if (!predicted.emplace(p.id, &p.word).second) throw Error(ErrorCode::UnalignedIds, "duplicate prediction id " + p.id);
    }
    RecognitionCounts c;
    std::size_t used = 0;
    for (const auto& t : truth) {
        const auto it = predicted.find(t.id);
        const std::u32string empty;
        const std::u32string& guess = it == predicted.end() ? empty : *it->second;
        if (it != predicted.end()) ++used;
        ++c.words;
        c.chars += t.word.size();
        c.edits += post::levenshtein(guess, t.word);
        if (guess == t.word) ++c.exact;
    }
    if (used != predicted.size()) throw Error(ErrorCode::UnalignedIds, "predictions reference ids missing from truth");
    return c;
}

EvalReport evaluate(const pipeline::RecognitionResult& result, const synth::Truth& truth, double iou_threshold) {
    EvalReport report;
    report.iou_threshold = iou_threshold;
    std::vector<IdWord> pred_words, truth_words;
    std::vector<bool> seen(result.detections.size(), false);
    for (const auto& frame : truth.frames) {
        std::vector<Box> pb, tb;
        std::vector<std::size_t> pidx;
        for (std::size_t i = 0; i < result.detections.size(); ++i) {
            const auto& d = result.detections[i];
            if (frame.index < d.frame_first || frame.index > d.frame_last) continue;
            pb.push_back(d.box);
            pidx.push_back(i);
            seen[i] = true;
        }
        for (const auto& t : frame.boxes) tb.push_back(t.box);
        const auto matches = match_boxes(pb, tb, iou_threshold);
        report.detection += DetectionCounts{matches.size(), pb.size() - matches.size(), tb.size() - matches.size()};

        for (std::size_t t = 0; t < frame.boxes.size(); ++t) {
            const std::string id = std::to_string(frame.index) + ":" + std::to_string(t);
            truth_words.push_back({id, utf8::decode(frame.boxes[t].word)});
        }
        for (const auto& m : matches) {
            const std::string id = std::to_string(frame.index) + ":" + std::to_string(m.truth);
            pred_words.push_back({id, result.detections[pidx[m.pred]].word.letters});
        }
    }
    // Detections on frames without truth entries are false positives.
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) ++report.detection.fp;
    }
    report.recognition = eval_recognition(pred_words, truth_words);
    return report;
}

std::string report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["version"] = "1";
    j["iou_threshold"] = r.iou_threshold;
    j["precision"] = r.detection.precision();
    j["recall"] = r.detection.recall();
    j["tp"] = r.detection.tp;
    j["fp"] = r.detection.fp;
    j["fn"] = r.detection.fn;
    j["word_rate"] = r.recognition.word_rate();
    j["char_rate"] = r.recognition.char_rate();
    j["truth_words"] = r.recognition.words;
    j["exact_words"] = r.recognition.exact;
    j["edit_distance"] = r.recognition.edits;
    j["truth_chars"] = r.recognition.chars;
    return j.dump(1) + "\n";
}

}  // namespace savo::eval
