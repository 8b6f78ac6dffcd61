#include "savo/postprocess.hpp"

#include <algorithm>
#include <limits>

#include "savo/error.hpp"
#include "savo/utf8.hpp"

namespace savo::post {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
            diag = up;
        }
    }
    return row[b.size()];
}

Lexicon::Lexicon(std::vector<std::u32string> words) : words_(std::move(words)) {
    std::erase_if(words_, [](const auto& w) { return w.empty(); });
    std::sort(words_.begin(), words_.end());
    words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
    set_.insert(words_.begin(), words_.end());
}

Lexicon Lexicon::load(const std::filesystem::path& path) { return Lexicon(utf8::read_lines(path)); }

Lexicon::Nearest Lexicon::nearest(std::u32string_view word) const {
    Nearest best{{}, std::numeric_limits<std::size_t>::max()};
    for (const auto& w : words_) {
        // Length difference bounds the distance from below.
        const auto gap = w.size() > word.size() ? w.size() - word.size() : word.size() - w.size();
        if (gap >= best.distance) continue;
        const auto d = levenshtein(word, w);
        if (d < best.distance) best = {w, d};
        if (d == 0) break;
    }
    return best;
}

LookupResult lexicon_lookup(std::u32string_view word, const Lexicon& lexicon) {
    return lexicon.contains(word) ? LookupResult::Exact : LookupResult::Absent;
}

std::string_view to_string(LexiconStatus status) noexcept {
    switch (status) {
        case LexiconStatus::Exact: return "exact";
        case LexiconStatus::Corrected: return "corrected";
        case LexiconStatus::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

struct Path {
    std::vector<GlyphClass> glyphs;
    double score = 1.0;
};

bool better(const Path& a, const Path& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.glyphs < b.glyphs;
}

WordHypothesis to_hypothesis(const Path& p) {
    WordHypothesis h;
    h.glyphs = p.glyphs;
    h.score = p.score;
    for (const auto& g : p.glyphs) h.letters.push_back(g.letter);
    h.recognized = h.letters;
    return h;
}

// Best letter per segment, forms recomputed from context.
WordHypothesis reshape_fallback(std::span<const std::vector<Candidate>> segments, const ReconstructConfig& config) {
    const auto& table = shaping::ShapingTable::arabic();
    std::u32string letters;
    double score = 1.0;
    for (const auto& seg : segments) {
        const Candidate* best = nullptr;
        double best_score = 0.0;
        for (const auto& c : seg) {
            if (!table.knows(c.glyph.letter)) continue;
            const double s = c.membership * (config.letter_prior ? config.letter_prior(c.glyph.letter) : 1.0);
            if (s > best_score) {
                best = &c;
                best_score = s;
            }
        }
        if (!best) throw Error(ErrorCode::EmptySegments, "segment without a usable hypothesis");
        letters.push_back(best->glyph.letter);
        score *= best_score;
    }
    const auto forms = table.forms_for(letters);
    WordHypothesis h;
    h.letters = letters;
    h.recognized = letters;
    h.score = score;
    for (std::size_t i = 0; i < letters.size(); ++i) h.glyphs.push_back({letters[i], forms[i]});
    return h;
}

}  // namespace

std::vector<WordHypothesis> reconstruct_word(std::span<const std::vector<Candidate>> segments,
                                             const ReconstructConfig& config) {
    if (segments.empty()) throw Error(ErrorCode::EmptySegments, "no segments");
    for (const auto& seg : segments) {
        if (seg.empty()) throw Error(ErrorCode::EmptySegments, "segment without hypotheses");
    }
    if (config.beam < 1) throw Error(ErrorCode::BadArgument, "beam must be >= 1");

    const auto& table = shaping::ShapingTable::arabic();
    const auto beam = static_cast<std::size_t>(config.beam);
    std::vector<Path> paths{Path{}};
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const bool last = s + 1 == segments.size();
        std::vector<Path> next;
        for (const auto& p : paths) {
            const GlyphClass* prev = p.glyphs.empty() ? nullptr : &p.glyphs.back();
            for (const auto& c : segments[s]) {
                double m = c.membership;
                if (config.letter_prior) m *= config.letter_prior(c.glyph.letter);
                if (m <= 0.0) continue;
                if (!table.may_follow(prev, c.glyph)) continue;
                if (last && !table.may_end(c.glyph)) continue;
                Path q = p;
                q.glyphs.push_back(c.glyph);
                q.score = p.score * m;
                next.push_back(std::move(q));
            }
        }
        std::sort(next.begin(), next.end(), better);
        if (next.size() > beam) next.resize(beam);
        paths = std::move(next);
        if (paths.empty()) break;
    }

    std::vector<WordHypothesis> out;
    for (const auto& p : paths) out.push_back(to_hypothesis(p));
    if (out.empty()) out.push_back(reshape_fallback(segments, config));
    return out;
}

WordHypothesis correct_word(std::span<const WordHypothesis> candidates, const Lexicon& lexicon,
                            std::size_t max_distance) {
    if (candidates.empty()) throw Error(ErrorCode::EmptyInput, "no word candidates");

    // Stable ordering: score descending, input order on ties.
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return candidates[a].score > candidates[b].score; });

    for (auto i : order) {
        if (lexicon.contains(candidates[i].letters)) {
            WordHypothesis h = candidates[i];
            h.status = LexiconStatus::Exact;
            h.distance = 0;
            return h;
        }
    }

    const WordHypothesis* best = nullptr;
    Lexicon::Nearest best_match{{}, std::numeric_limits<std::size_t>::max()};
    for (auto i : order) {
        auto match = lexicon.nearest(candidates[i].letters);
        if (match.distance < best_match.distance) {
            best_match = std::move(match);
            best = &candidates[i];
        }
    }
    if (best && best_match.distance <= max_distance) {
        WordHypothesis h = *best;
        h.recognized = best->recognized.empty() ? best->letters : best->recognized;
        h.letters = best_match.word;
        h.status = LexiconStatus::Corrected;
        h.distance = best_match.distance;
        return h;
    }

    WordHypothesis h = candidates[order.front()];
    h.status = LexiconStatus::Unknown;
    h.distance = 0;
    return h;
}

}  // namespace savo::post
