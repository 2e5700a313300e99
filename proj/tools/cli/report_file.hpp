#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "spraycard/pipeline.hpp"

namespace spraycard::cli {

inline constexpr std::string_view kReportSchema = "spraycard.report/1";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Everything in the report that depends only on the input and the config.
/// Serialized with sorted keys so identical runs give identical bytes.
nlohmann::json report_payload(const std::string& input_path, const std::string& input_sha256,
                              const std::string& input_format, const Analysis& analysis,
                              const AnalysisConfig& config);

/// Wraps the payload with `payload_sha256` (over `payload.dump()`) and a
/// `generated_at` UTC timestamp that is not covered by the checksum.
nlohmann::json report_document(nlohmann::json payload);

/// Strips the timestamp and returns the exact bytes the checksum covers.
std::string checksummed_bytes(const nlohmann::json& document);

/// id, area_px, area_um2, diameter_um, calibrated_diameter_um,
/// centroid_x_px, centroid_y_px; one row per drop.
std::string drops_csv(const SprayReport& report);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace spraycard::cli
