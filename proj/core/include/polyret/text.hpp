#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polyret {

/// How text is segmented into index/query tokens.
///
/// `whitespace` splits on any code point that is not a letter, digit or
/// combining mark. `unigram` does the same but additionally emits every
/// Han, Hiragana, Katakana, Hangul and Thai code point as its own token.
/// `automatic` picks one of the two per input string by majority script.
enum class ScriptPolicy { whitespace, unigram, automatic };

[[nodiscard]] ScriptPolicy parse_script_policy(std::string_view name);
[[nodiscard]] std::string_view to_string(ScriptPolicy policy) noexcept;

using TokenStream = std::vector<std::string>;

/// A token plus the byte range of the source text it came from.
struct TokenSpan {
    std::string token;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Case-folded tokens; never contains an empty string. Invalid UTF-8
/// sequences act as separators.
[[nodiscard]] TokenStream tokenize(std::string_view text, ScriptPolicy policy);
[[nodiscard]] std::vector<TokenSpan> tokenize_spans(std::string_view text, ScriptPolicy policy);

/// Resolves `automatic` for one string; other policies pass through.
[[nodiscard]] ScriptPolicy resolve_policy(std::string_view text, ScriptPolicy policy);

[[nodiscard]] bool is_valid_utf8(std::string_view text) noexcept;

/// Trims ASCII and Unicode-agnostic whitespace (space, tab, CR, LF, VT, FF).
[[nodiscard]] std::string_view trim(std::string_view text) noexcept;

/// Splits on runs of ASCII whitespace; no empty fields.
[[nodiscard]] std::vector<std::string_view> split_whitespace(std::string_view line);

/// Splits on every occurrence of `sep`; empty fields kept.
[[nodiscard]] std::vector<std::string_view> split_on(std::string_view line, char sep);

/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_real(double value);
[[nodiscard]] std::string format_real(float value);

[[nodiscard]] std::optional<double> parse_real(std::string_view text) noexcept;
[[nodiscard]] std::optional<float> parse_float(std::string_view text) noexcept;
[[nodiscard]] std::optional<std::int64_t> parse_int(std::string_view text) noexcept;

/// Escapes backslash, tab, newline and carriage return as `\\`, `\t`,
/// `\n`, `\r` so a value fits in one tab-separated field.
[[nodiscard]] std::string escape_field(std::string_view text);
[[nodiscard]] std::string unescape_field(std::string_view text);

} // namespace polyret
