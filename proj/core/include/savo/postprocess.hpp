#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "savo/shaping.hpp"

/// Word reconstruction from per-segment hypotheses and lexicon correction.
namespace savo::post {

using shaping::GlyphClass;

/// Code-point edit distance with unit costs.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::vector<std::u32string> words);

    /// UTF-8, one word per line; blank lines ignored, surrounding whitespace trimmed.
    static Lexicon load(const std::filesystem::path& path);

    bool contains(std::u32string_view word) const { return set_.contains(std::u32string(word)); }
    bool empty() const noexcept { return words_.empty(); }
    std::size_t size() const noexcept { return words_.size(); }
    std::span<const std::u32string> words() const noexcept { return words_; }

    struct Nearest {
        std::u32string word;
        std::size_t distance = 0;
    };
    /// Closest entry; ties resolved by lexicon order. Empty lexicon yields distance SIZE_MAX.
    Nearest nearest(std::u32string_view word) const;

private:
    std::vector<std::u32string> words_;  // sorted, unique
    std::unordered_set<std::u32string> set_;
};

enum class LookupResult { Exact, Absent };
LookupResult lexicon_lookup(std::u32string_view word, const Lexicon& lexicon);

enum class LexiconStatus { Exact, Corrected, Unknown };
std::string_view to_string(LexiconStatus status) noexcept;

struct Candidate {
    GlyphClass glyph;
    double membership = 0.0;
};

struct WordHypothesis {
    std::u32string letters;           // logical order, base letters
    std::vector<GlyphClass> glyphs;   // one per segment
    double score = 0.0;               // product of segment memberships
    LexiconStatus status = LexiconStatus::Unknown;
    std::size_t distance = 0;         // edit distance to `letters` when corrected
    std::u32string recognized;        // letters before lexicon correction
};

struct ReconstructConfig {
    int beam = 5;
    /// Optional per-letter prior multiplied into segment scores; unset means none.
    std::function<double(char32_t)> letter_prior;
};

/// Beam search over segment choices (segments in reading order). Paths breaking the
/// joining rules are dropped. If nothing survives, the best letters are re-shaped
/// into the forms their context requires.
std::vector<WordHypothesis> reconstruct_word(std::span<const std::vector<Candidate>> segments,
                                             const ReconstructConfig& config = {});

WordHypothesis correct_word(std::span<const WordHypothesis> candidates, const Lexicon& lexicon,
                            std::size_t max_distance = 1);

}  // namespace savo::post
