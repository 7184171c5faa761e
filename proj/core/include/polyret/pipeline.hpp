#pragma once

#include "polyret/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace polyret {

struct SummaryRow {
    std::string language;  // "macro" for cross-language averages
    std::string run;
    std::string label;
    double value = 0.0;

    friend bool operator==(SummaryRow const &, SummaryRow const &) = default;
};

struct PipelineSummary {
    std::vector<std::filesystem::path> artifacts;
    std::vector<SummaryRow> metrics;
};

/// Comment line stamped at the top of every text artifact.
[[nodiscard]] std::string artifact_header(std::uint64_t seed, std::string_view stage,
                                          std::string_view language = {});

/// Runs the configured stages for every language, in stage order, writing
/// into `<output_dir>/<lang>/`. A stage whose input artifact is missing
/// throws DependencyError naming the stage that produces it. Progress lines
/// go to `log` when given.
PipelineSummary run_pipeline(ExperimentConfig const &config, std::ostream *log = nullptr);

/// "lang<TAB>run<TAB>metric<TAB>value" rows.
void write_summary(std::ostream &out, std::vector<SummaryRow> const &rows, std::string const &header = {});

} // namespace polyret
