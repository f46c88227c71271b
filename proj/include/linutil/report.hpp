#pragma once

#include "linutil/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace linutil::cli {

enum class OutputFormat { Text, Json };

struct RunOptions {
    OutputFormat format = OutputFormat::Text;
    std::uint64_t seed = 0;
    /// Grid resolution for the insurance brute-force cross-check.
    std::optional<int> oracle_resolution;
    /// Force the exact rational backend.
    bool exact = false;
    /// Perturbation size for almost-linear breakpoint analysis.
    std::optional<Rational> delta;
};

/// Structured result of one command. `body` holds the echoed input and every
/// computed quantity; numbers computed on the exact backend appear as
/// {"decimal": ..., "rational": "a/b"}, float results as plain numbers.
struct Report {
    nlohmann::ordered_json body;
};

/// Dispatches the document to the matching library operations. Throws
/// ValidationError / PreconditionError for bad input and InternalError when a
/// cross-check or verifier fails; never returns a partial report.
Report run_command(const ScenarioDocument& doc, const RunOptions& options);

std::string render(const Report& report, OutputFormat format);

}  // namespace linutil::cli
