#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "report_file.hpp"
#include "spraycard/error.hpp"
#include "spraycard/image_io.hpp"
#include "spraycard/synthcard.hpp"
#include "spraycard/synthcard_json.hpp"
#include "version.hpp"

namespace spraycard::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void validate_config(const AnalysisConfig& c) {
    if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw ParameterError("--threshold must lie in (0,1)");
    if (c.se_side < 1 || c.se_side % 2 == 0) throw ParameterError("--se-side must be odd and >= 1");
    if (c.min_area_px < 1) throw ParameterError("--min-area-px must be >= 1");
    if (!(c.card_width_um > 0.0 && c.card_height_um > 0.0)) {
        throw ParameterError("--card-um must give two positive lengths");
    }
    if (c.calibration.enabled && !(c.calibration.a > 0.0 && c.calibration.b > 0.0)) {
        throw ParameterError("--calibrate coefficients must be positive");
    }
}

struct Outcome {
    int code = kExitOk;
    std::string error;
    std::optional<DecodedImage> image;
    std::optional<Analysis> analysis;
    json document;
};

Outcome analyze_file(const fs::path& image, const AnalysisConfig& config) {
    Outcome o;
    try {
        const std::string checksum = sha256_file(image);
        const ImageFormat format = detect_format(image);
        DecodedImage decoded = read_image(image);
        Analysis a = analyze(decoded, config);
        o.document = report_document(report_payload(image.string(), checksum,
                                                    format == ImageFormat::png ? "png" : "pgm", a,
                                                    config));
        o.code = a.report.reliability_warning ? kExitReliability : kExitOk;
        o.analysis = std::move(a);
        o.image = std::move(decoded);
    } catch (const DistortedCaptureError& e) {
        o.code = kExitDistorted;
        o.error = e.what();
    } catch (const ParameterError& e) {
        o.code = kExitUsage;
        o.error = e.what();
    } catch (const std::exception& e) {
        o.code = kExitInput;
        o.error = e.what();
    }
    return o;
}

std::string coverage_warning(const SprayReport& r) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << "coverage " << r.coverage_density_pct
      << "% exceeds " << kReliableCoverageLimitPct
      << "%; drop counts and diameters are unreliable";
    return s.str();
}

bool is_image_name(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".pgm";
}

}  // namespace

int analyze_command(const fs::path& image, const AnalysisConfig& config,
                    const AnalyzeOutputs& outputs, std::ostream& out, std::ostream& err) {
    try {
        validate_config(config);
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    Outcome o = analyze_file(image, config);
    if (!o.analysis) {
        err << "error: " << image.string() << ": " << o.error << '\n';
        return o.code;
    }

    try {
        const std::string text = o.document.dump(2) + "\n";
        if (outputs.report) {
            write_text(*outputs.report, text);
        } else {
            out << text;
        }
        if (outputs.csv) write_text(*outputs.csv, drops_csv(o.analysis->report));
        if (outputs.overlay) {
            const Segmentation& s = o.analysis->segmentation;
            write_png(*outputs.overlay, render_overlay(*o.image, s.labels, s.segments));
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    if (o.code == kExitReliability) err << "warning: " << coverage_warning(o.analysis->report) << '\n';
    return o.code;
}

int batch_command(const fs::path& dir, const AnalysisConfig& config, const fs::path& out_dir,
                  unsigned jobs, std::ostream& out, std::ostream& err) {
    try {
        validate_config(config);
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        err << "error: " << dir.string() << " is not a directory\n";
        return kExitUsage;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && is_image_name(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        err << "error: no .png or .pgm files in " << dir.string() << '\n';
        return kExitUsage;
    }
    fs::create_directories(out_dir, ec);
    if (ec) {
        err << "error: cannot create " << out_dir.string() << ": " << ec.message() << '\n';
        return kExitInput;
    }

    struct Row {
        int code = kExitOk;
        std::string error;
        json report;
    };
    std::vector<Row> rows(files.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            Outcome o = analyze_file(files[i], config);
            Row& row = rows[i];
            row.code = o.code;
            row.error = o.error;
            if (o.analysis) {
                try {
                    write_text(out_dir / (files[i].filename().string() + ".json"),
                               o.document.dump(2) + "\n");
                    row.report = o.document["report"];
                } catch (const std::exception& e) {
                    row.code = kExitInput;
                    row.error = e.what();
                }
            }
        }
    };
    const unsigned n_workers = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(files.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < n_workers; ++t) pool.emplace_back(worker);
        worker();
    }

    json cards = json::array();
    std::size_t failed = 0;
    bool any_warning = false;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const Row& row = rows[i];
        json card{{"file", files[i].filename().string()}, {"exit_code", row.code}};
        if (row.report.is_null()) {
            ++failed;
            card["status"] = "failed";
            card["error"] = row.error;
            err << "error: " << files[i].string() << ": " << row.error << '\n';
        } else {
            card["status"] = "ok";
            card["report_file"] = files[i].filename().string() + ".json";
            for (const char* key : {"drop_count", "total_drop_area_um2", "density_per_cm2",
                                    "coverage_density_pct", "vmd_um", "drs", "reliability_warning"}) {
                card[key] = row.report[key];
            }
            any_warning = any_warning || row.report["reliability_warning"].get<bool>();
        }
        cards.push_back(std::move(card));
    }
    json summary{{"schema", "spraycard.batch/1"},
                 {"tool", {{"name", "spraycard"}, {"version", kVersion}}},
                 {"directory", dir.string()},
                 {"analyzed", files.size() - failed},
                 {"failed", failed},
                 {"cards", std::move(cards)}};
    try {
        write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    out << "analyzed " << files.size() - failed << " of " << files.size() << " cards; summary in "
        << (out_dir / "summary.json").string() << '\n';
    if (failed > 0) return kExitInput;
    return any_warning ? kExitReliability : kExitOk;
}

int dpi_check_command(double diameter_um, double dpi, std::ostream& out, std::ostream& err) {
    if (!(diameter_um > 0.0) || !(dpi > 0.0)) {
        err << "error: diameter and dpi must be positive\n";
        return kExitUsage;
    }
    const std::int64_t px = pixels_for(diameter_um, dpi);
    out << diameter_um << " um @ " << dpi << " dpi: ";
    if (px == 0) {
        out << "not representable\n";
    } else {
        out << px << " px, representable\n";
    }
    out << "diameter_um,dpi,pixels,representable\n"
        << diameter_um << ',' << dpi << ',' << px << ',' << (px > 0 ? "true" : "false") << '\n';
    return kExitOk;
}

int dpi_table_command(std::ostream& out) {
    static constexpr double kDiameters[] = {10, 50, 100, 250, 500, 1000, 10000};
    static constexpr double kDpis[] = {50, 100, 300, 600, 1200, 2400, 2600};
    out << std::setw(8) << "um\\dpi";
    for (double d : kDpis) out << std::setw(7) << d;
    out << '\n';
    for (double um : kDiameters) {
        out << std::setw(8) << um;
        for (double dpi : kDpis) {
            const std::int64_t px = pixels_for(um, dpi);
            if (px == 0) {
                out << std::setw(7) << "-";
            } else {
                out << std::setw(7) << px;
            }
        }
        out << '\n';
    }
    return kExitOk;
}

int synth_command(const fs::path& layout, const fs::path& png_out,
                  std::optional<fs::path> truth_out, std::optional<std::uint64_t> seed,
                  std::ostream& out, std::ostream& err) {
    SynthSpec spec;
    try {
        spec = load_synth_spec(layout);
        if (seed) spec.rng_seed = *seed;
    } catch (const LayoutError& e) {
        err << "error: " << layout.string() << ": " << e.what() << '\n';
        return kExitUsage;
    }
    if (!truth_out) truth_out = fs::path(png_out).replace_extension(".truth.json");
    try {
        const SynthCard card = render(spec);
        write_png(png_out, card.image);
        write_text(*truth_out, ground_truth_json(spec, card.truth));
        out << "rendered " << card.image.width() << "x" << card.image.height() << " px card with "
            << card.truth.drops.size() << " drops at " << spec.dpi << " dpi -> " << png_out.string()
            << " (truth: " << truth_out->string() << ")\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}

namespace {

std::pair<double, double> parse_card_um(const std::string& text) {
    const auto sep = text.find_first_of("xX");
    if (sep == std::string::npos) throw CLI::ValidationError("--card-um", "expected WxH in micrometres");
    try {
        std::size_t used_w = 0;
        std::size_t used_h = 0;
        const std::string ws = text.substr(0, sep);
        const std::string hs = text.substr(sep + 1);
        const double w = std::stod(ws, &used_w);
        const double h = std::stod(hs, &used_h);
        if (used_w != ws.size() || used_h != hs.size()) throw std::invalid_argument("trailing");
        return {w, h};
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--card-um", "expected WxH in micrometres, got '" + text + "'");
    }
}

CalibrationParams parse_calibration(const std::string& text) {
    CalibrationParams c;
    c.enabled = true;
    if (text == "default") return c;
    const auto sep = text.find(',');
    if (sep == std::string::npos) throw CLI::ValidationError("--calibrate", "expected a,b or 'default'");
    try {
        c.a = std::stod(text.substr(0, sep));
        c.b = std::stod(text.substr(sep + 1));
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--calibrate", "expected a,b or 'default', got '" + text + "'");
    }
    return c;
}

struct AnalysisFlags {
    std::string card_um;
    std::string calibrate;
    AnalysisConfig config;

    void attach(CLI::App* cmd) {
        cmd->add_option("--card-um", card_um, "Physical card size in micrometres, e.g. 76000x26000")
            ->required();
        cmd->add_option("--threshold", config.threshold, "Binarization threshold in (0,1)")
            ->capture_default_str();
        cmd->add_option("--se-side", config.se_side, "Structuring element side (odd)")
            ->capture_default_str();
        cmd->add_option("--min-area-px", config.min_area_px, "Smallest segment kept, in pixels")
            ->capture_default_str();
        cmd->add_option("--calibrate", calibrate,
                        "Enable diameter' = a*d^b; 'a,b' or 'default' (a=0.2192733, b=1.227941)");
    }

    AnalysisConfig resolve() {
        const auto [w, h] = parse_card_um(card_um);
        config.card_width_um = w;
        config.card_height_um = h;
        if (!calibrate.empty()) config.calibration = parse_calibration(calibrate);
        return config;
    }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Water-sensitive spray card analysis", "spraycard"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    AnalysisFlags analyze_flags;
    std::string image;
    AnalyzeOutputs outputs;
    std::string report_out, csv_out, overlay_out;
    auto* analyze_cmd = app.add_subcommand("analyze", "Segment one card image and report spray metrics");
    analyze_cmd->add_option("image", image, "PNG or PGM card image")->required();
    analyze_flags.attach(analyze_cmd);
    analyze_cmd->add_option("--out", report_out, "Write the JSON report here instead of stdout");
    analyze_cmd->add_option("--csv", csv_out, "Write the per-drop table as CSV");
    analyze_cmd->add_option("--overlay", overlay_out, "Write a PNG with segments painted over the image");

    AnalysisFlags batch_flags;
    std::string batch_dir, batch_out;
    unsigned jobs = 1;
    auto* batch_cmd = app.add_subcommand("batch", "Analyze every PNG/PGM card in a directory");
    batch_cmd->add_option("dir", batch_dir, "Directory of card images")->required();
    batch_flags.attach(batch_cmd);
    batch_cmd->add_option("--out", batch_out, "Output directory for reports and summary.json")
        ->required();
    batch_cmd->add_option("--jobs", jobs, "Parallel workers")->capture_default_str();

    double dpi_diameter = 0.0;
    double dpi_value = 0.0;
    bool dpi_table = false;
    auto* dpi_cmd = app.add_subcommand("dpi-check", "Pixels needed to represent a diameter at a dpi");
    dpi_cmd->add_option("diameter_um", dpi_diameter, "Drop diameter in micrometres");
    dpi_cmd->add_option("dpi", dpi_value, "Scan or capture resolution");
    dpi_cmd->add_flag("--table", dpi_table, "Print the full diameter x dpi table");

    std::string layout, synth_out, truth_out;
    std::uint64_t seed = 0;
    auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic card from a JSON layout");
    synth_cmd->add_option("layout", layout, "Layout JSON document")->required();
    synth_cmd->add_option("--out", synth_out, "Output PNG")->required();
    synth_cmd->add_option("--truth", truth_out, "Ground-truth JSON (default: the output path with extension .truth.json)");
    auto* seed_opt = synth_cmd->add_option("--seed", seed, "Override the layout's rng_seed");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("spraycard");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    AnalysisConfig analyze_config;
    AnalysisConfig batch_config;
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (analyze_cmd->parsed()) analyze_config = analyze_flags.resolve();
        if (batch_cmd->parsed()) batch_config = batch_flags.resolve();
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (analyze_cmd->parsed()) {
            if (!report_out.empty()) outputs.report = report_out;
            if (!csv_out.empty()) outputs.csv = csv_out;
            if (!overlay_out.empty()) outputs.overlay = overlay_out;
            return analyze_command(image, analyze_config, outputs, out, err);
        }
        if (batch_cmd->parsed()) {
            return batch_command(batch_dir, batch_config, batch_out, jobs, out, err);
        }
        if (dpi_cmd->parsed()) {
            if (dpi_table) return dpi_table_command(out);
            if (dpi_cmd->count("diameter_um") == 0 || dpi_cmd->count("dpi") == 0) {
                err << "error: dpi-check needs <diameter_um> <dpi> or --table\n";
                return kExitUsage;
            }
            return dpi_check_command(dpi_diameter, dpi_value, out, err);
        }
        if (synth_cmd->parsed()) {
            std::optional<fs::path> truth;
            if (!truth_out.empty()) truth = truth_out;
            std::optional<std::uint64_t> seed_override;
            if (seed_opt->count() > 0) seed_override = seed;
            return synth_command(layout, synth_out, truth, seed_override, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitUsage;
}

}  // namespace spraycard::cli
