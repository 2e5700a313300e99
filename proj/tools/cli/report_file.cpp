#include "report_file.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "spraycard/error.hpp"
#include "version.hpp"

namespace spraycard::cli {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open " + path.string());
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return sha256_hex(bytes);
}

namespace {

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

}  // namespace

json report_payload(const std::string& input_path, const std::string& input_sha256,
                    const std::string& input_format, const Analysis& analysis,
                    const AnalysisConfig& config) {
    const SprayReport& r = analysis.report;

    json drops = json::array();
    for (std::size_t i = 0; i < r.drops.size(); ++i) {
        const DropMeasure& d = r.drops[i];
        drops.push_back({{"id", i + 1},
                         {"label", d.label},
                         {"area_px", d.area_px},
                         {"area_um2", d.area_um2},
                         {"diameter_um", d.diameter_um},
                         {"calibrated_diameter_um", d.calibrated_diameter_um},
                         {"centroid_x_px", d.centroid_x_px},
                         {"centroid_y_px", d.centroid_y_px}});
    }

    return json{
        {"schema", kReportSchema},
        {"tool", {{"name", "spraycard"}, {"version", kVersion}}},
        {"input",
         {{"path", input_path},
          {"sha256", input_sha256},
          {"format", input_format},
          {"width_px", analysis.card.image_width_px},
          {"height_px", analysis.card.image_height_px}}},
        {"config",
         {{"threshold", config.threshold},
          {"se_side", config.se_side},
          {"min_area_px", config.min_area_px},
          {"card_width_um", config.card_width_um},
          {"card_height_um", config.card_height_um},
          {"calibration",
           {{"enabled", config.calibration.enabled},
            {"a", config.calibration.a},
            {"b", config.calibration.b}}}}},
        {"report",
         {{"drop_count", r.drop_count},
          {"no_drops", r.no_drops},
          {"um_per_px", r.um_per_px},
          {"card_area_cm2", r.card_area_cm2},
          {"total_drop_area_um2", r.total_drop_area_um2},
          {"density_per_cm2", r.density_per_cm2},
          {"coverage_density_pct", r.coverage_density_pct},
          {"vmd_um", optional_number(r.vmd_um)},
          {"d10_um", optional_number(r.d10_um)},
          {"d90_um", optional_number(r.d90_um)},
          {"drs", optional_number(r.drs)},
          {"reliability_warning", r.reliability_warning}}},
        {"drops", std::move(drops)},
    };
}

json report_document(json payload) {
    const std::string digest = sha256_hex(payload.dump());
    payload["payload_sha256"] = digest;
    payload["generated_at"] = utc_now();
    return payload;
}

std::string checksummed_bytes(const json& document) {
    json copy = document;
    copy.erase("generated_at");
    copy.erase("payload_sha256");
    return copy.dump();
}

std::string drops_csv(const SprayReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "id,area_px,area_um2,diameter_um,calibrated_diameter_um,centroid_x_px,centroid_y_px\n";
    for (std::size_t i = 0; i < report.drops.size(); ++i) {
        const DropMeasure& d = report.drops[i];
        out << i + 1 << ',' << d.area_px << ',' << d.area_um2 << ',' << d.diameter_um << ','
            << d.calibrated_diameter_um << ',' << d.centroid_x_px << ',' << d.centroid_y_px << '\n';
    }
    return out.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ImageIoError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ImageIoError("write failed for " + path.string());
}

}  // namespace spraycard::cli
