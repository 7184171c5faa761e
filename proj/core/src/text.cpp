#include "polyret/text.hpp"

#include "polyret/error.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

namespace polyret {

namespace {

bool is_token_char(UChar32 c)
{
    if (u_hasBinaryProperty(c, UCHAR_ALPHABETIC) != 0 || u_isdigit(c) != 0) {
        return true;
    }
    // Indic vowel signs and viramas are marks, not letters; splitting on
    // them would shred Devanagari/Bengali/Telugu words.
    return (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

bool is_unigram_script(UChar32 c)
{
    UErrorCode status = U_ZERO_ERROR;
    UScriptCode script = uscript_getScript(c, &status);
    if (U_FAILURE(status)) {
        return false;
    }
    switch (script) {
    case USCRIPT_HAN:
    case USCRIPT_HIRAGANA:
    case USCRIPT_KATAKANA:
    case USCRIPT_HANGUL:
    case USCRIPT_THAI:
        return true;
    default:
        return false;
    }
}

void append_folded(std::string &out, UChar32 c)
{
    UChar32 folded = u_foldCase(c, U_FOLD_CASE_DEFAULT);
    char buffer[U8_MAX_LENGTH];
    std::int32_t length = 0;
    U8_APPEND_UNSAFE(buffer, length, folded);
    out.append(buffer, static_cast<std::size_t>(length));
}

template <typename Visitor>
void for_each_code_point(std::string_view text, Visitor &&visit)
{
    auto const *data = reinterpret_cast<std::uint8_t const *>(text.data());
    auto const length = static_cast<std::int32_t>(text.size());
    std::int32_t offset = 0;
    while (offset < length) {
        std::int32_t const begin = offset;
        UChar32 c = 0;
        U8_NEXT(data, offset, length, c);
        visit(c, static_cast<std::size_t>(begin), static_cast<std::size_t>(offset));
    }
}

} // namespace

ScriptPolicy parse_script_policy(std::string_view name)
{
    if (name == "whitespace") {
        return ScriptPolicy::whitespace;
    }
    if (name == "unigram") {
        return ScriptPolicy::unigram;
    }
    if (name == "auto" || name == "automatic") {
        return ScriptPolicy::automatic;
    }
    throw InvalidArgument("unknown script policy '" + std::string(name) + "'");
}

std::string_view to_string(ScriptPolicy policy) noexcept
{
    switch (policy) {
    case ScriptPolicy::whitespace:
        return "whitespace";
    case ScriptPolicy::unigram:
        return "unigram";
    case ScriptPolicy::automatic:
        return "auto";
    }
    return "auto";
}

ScriptPolicy resolve_policy(std::string_view text, ScriptPolicy policy)
{
    if (policy != ScriptPolicy::automatic) {
        return policy;
    }
    std::size_t unigram = 0;
    std::size_t other = 0;
    for_each_code_point(text, [&](UChar32 c, std::size_t, std::size_t) {
        if (c < 0 || !is_token_char(c)) {
            return;
        }
        if (is_unigram_script(c)) {
            ++unigram;
        } else {
            ++other;
        }
    });
    return unigram > other ? ScriptPolicy::unigram : ScriptPolicy::whitespace;
}

std::vector<TokenSpan> tokenize_spans(std::string_view text, ScriptPolicy policy)
{
    policy = resolve_policy(text, policy);
    std::vector<TokenSpan> tokens;
    TokenSpan current;
    bool in_word = false;

    auto flush = [&] {
        if (in_word) {
            tokens.push_back(std::move(current));
            current = TokenSpan{};
            in_word = false;
        }
    };

    for_each_code_point(text, [&](UChar32 c, std::size_t begin, std::size_t end) {
        if (c < 0 || !is_token_char(c)) {
            flush();
            return;
        }
        if (policy == ScriptPolicy::unigram && is_unigram_script(c)) {
            flush();
            TokenSpan single{{}, begin, end};
            append_folded(single.token, c);
            tokens.push_back(std::move(single));
            return;
        }
        if (!in_word) {
            in_word = true;
            current.begin = begin;
        }
        append_folded(current.token, c);
        current.end = end;
    });
    flush();
    return tokens;
}

TokenStream tokenize(std::string_view text, ScriptPolicy policy)
{
    auto spans = tokenize_spans(text, policy);
    TokenStream tokens;
    tokens.reserve(spans.size());
    for (auto &span : spans) {
        tokens.push_back(std::move(span.token));
    }
    return tokens;
}

bool is_valid_utf8(std::string_view text) noexcept
{
    bool valid = true;
    for_each_code_point(text, [&](UChar32 c, std::size_t, std::size_t) {
        if (c < 0) {
            valid = false;
        }
    });
    return valid;
}

std::string_view trim(std::string_view text) noexcept
{
    constexpr std::string_view blanks = " \t\r\n\v\f";
    auto const first = text.find_first_not_of(blanks);
    if (first == std::string_view::npos) {
        return {};
    }
    auto const last = text.find_last_not_of(blanks);
    return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split_whitespace(std::string_view line)
{
    constexpr std::string_view blanks = " \t\r\n\v\f";
    std::vector<std::string_view> fields;
    std::size_t pos = line.find_first_not_of(blanks);
    while (pos != std::string_view::npos) {
        auto const end = line.find_first_of(blanks, pos);
        fields.push_back(line.substr(pos, end == std::string_view::npos ? end : end - pos));
        if (end == std::string_view::npos) {
            break;
        }
        pos = line.find_first_not_of(blanks, end);
    }
    return fields;
}

std::vector<std::string_view> split_on(std::string_view line, char sep)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto const pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string format_real(double value)
{
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        throw Error("cannot format real value");
    }
    return std::string(buffer, end);
}

std::string format_real(float value)
{
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        throw Error("cannot format real value");
    }
    return std::string(buffer, end);
}

namespace {

template <typename T>
std::optional<T> parse_number(std::string_view text) noexcept
{
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

} // namespace

std::optional<double> parse_real(std::string_view text) noexcept
{
    auto value = parse_number<double>(text);
    if (value && !std::isfinite(*value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<float> parse_float(std::string_view text) noexcept
{
    auto value = parse_number<float>(text);
    if (value && !std::isfinite(*value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<std::int64_t> parse_int(std::string_view text) noexcept
{
    return parse_number<std::int64_t>(text);
}

std::string escape_field(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '\\':
            out += "\\\\";
            break;
        case '\t':
            out += "\\t";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\r':
            out += "\\r";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string unescape_field(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        char const c = text[i];
        if (c != '\\' || i + 1 == text.size()) {
            out += c;
            continue;
        }
        char const next = text[++i];
        switch (next) {
        case '\\':
            out += '\\';
            break;
        case 't':
            out += '\t';
            break;
        case 'n':
            out += '\n';
            break;
        case 'r':
            out += '\r';
            break;
        default:
            out += '\\';
            out += next;
        }
    }
    return out;
}

} // namespace polyret
