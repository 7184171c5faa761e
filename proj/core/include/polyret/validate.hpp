#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polyret {

enum class ArtifactKind { corpus, topics, qrels, run, vectors, pairs, index, report };

[[nodiscard]] ArtifactKind parse_artifact_kind(std::string_view name);
[[nodiscard]] std::string_view to_string(ArtifactKind kind) noexcept;

/// One format violation. `line` is 1-based, 0 for whole-file problems.
struct Diagnostic {
    std::string file;
    std::size_t line = 0;
    std::string rule;
    std::string message;

    friend bool operator==(Diagnostic const &, Diagnostic const &) = default;
};

/// Guesses the kind from the file name, then from the first data line.
/// nullopt when neither is conclusive.
[[nodiscard]] std::optional<ArtifactKind> detect_artifact_kind(std::filesystem::path const &path);

/// Checks one stream against the rules of `kind`. Unlike the loaders, keeps
/// going after a violation so every bad line is reported.
[[nodiscard]] std::vector<Diagnostic> validate_stream(std::istream &in, ArtifactKind kind,
                                                      std::string const &source);

[[nodiscard]] std::vector<Diagnostic> validate_file(std::filesystem::path const &path,
                                                    std::optional<ArtifactKind> kind = std::nullopt);

/// Every file, each with its detected kind unless `kind` forces one.
[[nodiscard]] std::vector<Diagnostic> validate_artifacts(std::span<std::filesystem::path const> paths,
                                                         std::optional<ArtifactKind> kind = std::nullopt);

/// "file:line: [rule] message"
void write_diagnostic(std::ostream &out, Diagnostic const &diagnostic);

} // namespace polyret
