#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nlpot {

enum ExitStatus : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3 };

struct RunOptions {
    int threads = 0; ///< 0 keeps the process default
    /// Output directory; when empty, NLPOT_OUTPUT_DIR, then the document's `output`
    /// key (relative to the document), then the document's directory.
    std::filesystem::path output_dir;
};

struct RunResult {
    int status = kExitOk;
    std::vector<std::filesystem::path> artifacts;
    std::string message; ///< error text when status != 0
};

const std::vector<std::string>& task_names();

/// Runs the single task named by the document and writes `<task>.<label>.*` files.
///
/// Parsing, file lookup and parameter preconditions are checked before any module
/// call; failures there give kExitValidation. An error raised by the module gives
/// kExitNumerical. Both write `<task>.<label>.error.json`.
RunResult run_task(const std::filesystem::path& document, const RunOptions& opts = {});

} // namespace nlpot
