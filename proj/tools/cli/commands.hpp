#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spraycard/pipeline.hpp"

namespace spraycard::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 1,
    kExitReliability = 2,
    kExitDistorted = 3,
    kExitUsage = 64,
};

struct AnalyzeOutputs {
    std::optional<std::filesystem::path> report;
    std::optional<std::filesystem::path> csv;
    std::optional<std::filesystem::path> overlay;
};

/// Analyzes one image and writes the requested outputs; the JSON report
/// goes to `out` when no report path is given. Returns the exit code.
int analyze_command(const std::filesystem::path& image, const AnalysisConfig& config,
                    const AnalyzeOutputs& outputs, std::ostream& out, std::ostream& err);

/// Analyzes every .png/.pgm file in `dir` (sorted by name) with up to
/// `jobs` workers, writing `<file>.json` per image and `summary.json` into
/// `out_dir`. Failures are recorded in the summary and do not stop the run.
int batch_command(const std::filesystem::path& dir, const AnalysisConfig& config,
                  const std::filesystem::path& out_dir, unsigned jobs, std::ostream& out,
                  std::ostream& err);

int dpi_check_command(double diameter_um, double dpi, std::ostream& out, std::ostream& err);

/// Prints the whole diameter x dpi feasibility table.
int dpi_table_command(std::ostream& out);

int synth_command(const std::filesystem::path& layout, const std::filesystem::path& png_out,
                  std::optional<std::filesystem::path> truth_out, std::optional<std::uint64_t> seed,
                  std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spraycard::cli
