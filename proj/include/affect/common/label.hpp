#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace affect {

/// Ordinal ternary class. Enumerator order is the ordinal order L < M < H.
enum class Label : std::uint8_t { Low = 0, Medium = 1, High = 2 };

inline constexpr std::array<Label, 3> kAllLabels{Label::Low, Label::Medium, Label::High};
inline constexpr std::size_t kNumClasses = 3;

enum class Task : std::uint8_t { Valence, Arousal };

inline constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }
inline constexpr Label label_at(std::size_t i) { return static_cast<Label>(i); }
inline constexpr bool is_extreme(Label l) { return l != Label::Medium; }
inline constexpr bool opposite_extremes(Label a, Label b) {
    return (a == Label::Low && b == Label::High) || (a == Label::High && b == Label::Low);
}

char to_char(Label l);
/// Parses "L", "M" or "H". Throws DataError("unknown label ...") otherwise.
Label parse_label(std::string_view token);
/// Empty token means "unlabeled".
std::optional<Label> parse_optional_label(std::string_view token);

std::string_view to_string(Task t);
Task parse_task(std::string_view s);

using ClassCounts = std::array<std::size_t, kNumClasses>;

/// Small set of labels, e.g. the minority classes of a task.
class LabelSet {
public:
    LabelSet() = default;
    LabelSet(std::initializer_list<Label> labels) {
        for (Label l : labels) insert(l);
    }

    void insert(Label l) { bits_ |= mask(l); }
    bool contains(Label l) const { return (bits_ & mask(l)) != 0; }
    bool empty() const { return bits_ == 0; }
    std::size_t size() const;
    /// "LH", "M", "" ...
    std::string to_string() const;
    static LabelSet parse(std::string_view s);

    friend bool operator==(const LabelSet&, const LabelSet&) = default;

private:
    static constexpr std::uint8_t mask(Label l) { return static_cast<std::uint8_t>(1u << index_of(l)); }
    std::uint8_t bits_ = 0;
};

/// Labels whose count is strictly below the maximum count. Empty when all counts tie.
LabelSet minority_from_counts(const ClassCounts& counts);

} // namespace affect
