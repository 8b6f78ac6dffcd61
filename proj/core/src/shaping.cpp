#include "savo/shaping.hpp"

#include "savo/error.hpp"
#include "savo/utf8.hpp"

namespace savo::shaping {

std::string_view to_string(Form form) noexcept {
    switch (form) {
        case Form::Isolated: return "isolated";
        case Form::Initial: return "initial";
        case Form::Medial: return "medial";
        case Form::Final: return "final";
    }
    return "isolated";
}

std::optional<Form> form_from_string(std::string_view text) noexcept {
    if (text == "isolated") return Form::Isolated;
    if (text == "initial") return Form::Initial;
    if (text == "medial") return Form::Medial;
    if (text == "final") return Form::Final;
    return std::nullopt;
}

const ShapingTable& ShapingTable::arabic() {
    static const ShapingTable table({
        {U'ا', "alef", false},  {U'ب', "ba", true},    {U'ت', "ta", true},
        {U'ث', "tha", true},    {U'ج', "jeem", true},  {U'ح', "hha", true},
        {U'خ', "kha", true},    {U'د', "dal", false},  {U'ذ', "thal", false},
        {U'ر', "ra", false},    {U'ز', "zai", false},  {U'س', "seen", true},
        {U'ش', "sheen", true},  {U'ص', "sad", true},   {U'ض', "dad", true},
        {U'ط', "tta", true},    {U'ظ', "dha", true},   {U'ع', "ain", true},
        {U'غ', "ghain", true},  {U'ف', "fa", true},    {U'ق', "qaf", true},
        {U'ك', "kaf", true},    {U'ل', "lam", true},   {U'م', "meem", true},
        {U'ن', "noon", true},   {U'ه', "ha", true},    {U'و', "waw", false},
        {U'ي', "ya", true},
    });
    return table;
}

const LetterInfo* ShapingTable::find(char32_t letter) const noexcept {
    for (const auto& l : letters_) {
        if (l.letter == letter) return &l;
    }
    return nullptr;
}

bool ShapingTable::has_form(char32_t letter, Form form) const noexcept {
    const LetterInfo* info = find(letter);
    if (!info) return false;
    return info->connects_left || !joins_left(form);
}

std::vector<Form> ShapingTable::forms_for(std::u32string_view word) const {
    std::vector<Form> forms;
    forms.reserve(word.size());
    bool prev_joins = false;
    for (std::size_t i = 0; i < word.size(); ++i) {
        const LetterInfo* info = find(word[i]);
        if (!info) {
            throw Error(ErrorCode::MissingGlyph, "letter not in shaping table: " + utf8::encode(word[i]));
        }
        const bool left = info->connects_left && i + 1 < word.size();
        if (prev_joins) {
            forms.push_back(left ? Form::Medial : Form::Final);
        } else {
            forms.push_back(left ? Form::Initial : Form::Isolated);
        }
        prev_joins = left;
    }
    return forms;
}

bool ShapingTable::may_follow(const GlyphClass* prev, const GlyphClass& next) const noexcept {
    if (!has_form(next.letter, next.form)) return false;
    const bool prev_joins = prev != nullptr && joins_left(prev->form);
    return prev_joins == joins_right(next.form);
}

bool ShapingTable::valid_sequence(std::span<const GlyphClass> glyphs) const noexcept {
    if (glyphs.empty()) return false;
    const GlyphClass* prev = nullptr;
    for (const auto& g : glyphs) {
        if (!may_follow(prev, g)) return false;
        prev = &g;
    }
    return may_end(glyphs.back());
}

std::vector<GlyphClass> ShapingTable::all_classes() const {
    std::vector<GlyphClass> out;
    for (const auto& l : letters_) {
        for (Form f : {Form::Isolated, Form::Initial, Form::Medial, Form::Final}) {
            if (has_form(l.letter, f)) out.push_back({l.letter, f});
        }
    }
    return out;
}

}  // namespace savo::shaping
