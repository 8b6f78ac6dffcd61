#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

/// Positional forms and joining behaviour of the 28 base Arabic letters.
namespace savo::shaping {

enum class Form { Isolated, Initial, Medial, Final };

std::string_view to_string(Form form) noexcept;
std::optional<Form> form_from_string(std::string_view text) noexcept;

/// Connects to the following (left-hand) letter.
constexpr bool joins_left(Form f) noexcept { return f == Form::Initial || f == Form::Medial; }
/// Connects to the preceding (right-hand) letter.
constexpr bool joins_right(Form f) noexcept { return f == Form::Medial || f == Form::Final; }

struct GlyphClass {
    char32_t letter = 0;
    Form form = Form::Isolated;

    friend bool operator==(const GlyphClass&, const GlyphClass&) = default;
    friend auto operator<=>(const GlyphClass&, const GlyphClass&) = default;
};

struct LetterInfo {
    char32_t letter;
    std::string_view name;
    /// False for letters with no initial/medial form (alef, dal, thal, ra, zain, waw).
    bool connects_left;
};

class ShapingTable {
public:
    static const ShapingTable& arabic();

    std::span<const LetterInfo> letters() const noexcept { return letters_; }
    const LetterInfo* find(char32_t letter) const noexcept;
    bool knows(char32_t letter) const noexcept { return find(letter) != nullptr; }
    bool has_form(char32_t letter, Form form) const noexcept;

    /// Contextual forms of a word written in logical (right-to-left reading) order.
    std::vector<Form> forms_for(std::u32string_view word) const;

    /// Every glyph exists in the table and neighbouring forms agree on joining.
    bool valid_sequence(std::span<const GlyphClass> glyphs) const noexcept;

    /// Whether `next` may follow `prev` (null prev = word start).
    bool may_follow(const GlyphClass* prev, const GlyphClass& next) const noexcept;
    bool may_end(const GlyphClass& last) const noexcept { return !joins_left(last.form); }

    /// All (letter, form) pairs the table allows.
    std::vector<GlyphClass> all_classes() const;

private:
    explicit ShapingTable(std::vector<LetterInfo> letters) : letters_(std::move(letters)) {}
    std::vector<LetterInfo> letters_;
};

}  // namespace savo::shaping
