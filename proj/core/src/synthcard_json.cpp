#include "spraycard/synthcard_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spraycard/error.hpp"

namespace spraycard {

using nlohmann::json;

namespace {

double number_at(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw LayoutError(path + key, "missing required number");
    if (!it->is_number()) throw LayoutError(path + key, "expected a number");
    return it->get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
    return obj.contains(key) ? number_at(obj, key, path) : fallback;
}

const json& array_at(const json& obj, const std::string& key) {
    const json& arr = obj.at(key);
    if (!arr.is_array()) throw LayoutError(key, "expected an array");
    return arr;
}

const json& object_at(const json& arr, std::size_t i, const std::string& key) {
    const json& item = arr[i];
    if (!item.is_object()) {
        throw LayoutError(key + "[" + std::to_string(i) + "]", "expected an object");
    }
    return item;
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw LayoutError("", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw LayoutError("", "layout document must be a JSON object");

    SynthSpec spec;
    spec.card_width_um = number_at(doc, "card_width_um", "");
    spec.card_height_um = number_at(doc, "card_height_um", "");
    spec.dpi = number_at(doc, "dpi", "");
    spec.background_intensity = number_or(doc, "background_intensity", "", spec.background_intensity);
    spec.drop_intensity = number_or(doc, "drop_intensity", "", spec.drop_intensity);
    spec.noise_sigma = number_or(doc, "noise_sigma", "", spec.noise_sigma);
    if (doc.contains("rng_seed")) {
        if (!doc["rng_seed"].is_number_unsigned()) {
            throw LayoutError("rng_seed", "expected a non-negative integer");
        }
        spec.rng_seed = doc["rng_seed"].get<std::uint64_t>();
    }

    if (doc.contains("drops")) {
        const json& arr = array_at(doc, "drops");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const json& d = object_at(arr, i, "drops");
            const std::string path = "drops[" + std::to_string(i) + "].";
            spec.drops.push_back(SynthDrop{number_at(d, "center_x_um", path),
                                           number_at(d, "center_y_um", path),
                                           number_at(d, "diameter_um", path)});
        }
    }

    if (doc.contains("grids")) {
        const json& arr = array_at(doc, "grids");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const json& g = object_at(arr, i, "grids");
            const std::string path = "grids[" + std::to_string(i) + "].";
            GridLayout grid;
            grid.diameter_um = number_at(g, "diameter_um", path);
            const double count = number_at(g, "count", path);
            if (count < 0 || count != static_cast<int>(count)) {
                throw LayoutError(path + "count", "expected a non-negative integer");
            }
            grid.count = static_cast<int>(count);
            grid.spacing_um = number_at(g, "spacing_um", path);
            if (g.contains("phase_px")) {
                const json& ph = g["phase_px"];
                if (!ph.is_array() || ph.size() != 2 || !ph[0].is_number() || !ph[1].is_number()) {
                    throw LayoutError(path + "phase_px", "expected [x, y] in pixel units");
                }
                grid.phase = PixelPhase{ph[0].get<double>(), ph[1].get<double>()};
            }
            try {
                const auto drops = grid_layout(grid, spec.card_width_um, spec.card_height_um, spec.dpi);
                spec.drops.insert(spec.drops.end(), drops.begin(), drops.end());
            } catch (const LayoutError& e) {
                throw LayoutError(path + e.field(), e.message());
            }
        }
    }

    if (doc.contains("overlap_pairs")) {
        const json& arr = array_at(doc, "overlap_pairs");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const json& p = object_at(arr, i, "overlap_pairs");
            const std::string path = "overlap_pairs[" + std::to_string(i) + "].";
            const double diameter = number_at(p, "diameter_um", path);
            const double distance = number_at(p, "center_distance_um", path);
            const double mid_x = number_at(p, "mid_x_um", path);
            const double mid_y = number_at(p, "mid_y_um", path);
            try {
                const auto pair = overlap_pair(diameter, distance, mid_x, mid_y);
                spec.drops.insert(spec.drops.end(), pair.begin(), pair.end());
            } catch (const LayoutError& e) {
                throw LayoutError(path + e.field(), e.message());
            }
        }
    }

    validate(spec);
    return spec;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LayoutError("", "cannot open layout file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_synth_spec(ss.str());
}

std::string ground_truth_json(const SynthSpec& spec, const GroundTruth& truth) {
    json doc;
    doc["card_width_um"] = spec.card_width_um;
    doc["card_height_um"] = spec.card_height_um;
    doc["dpi"] = spec.dpi;
    doc["image_width_px"] = spec.image_width_px();
    doc["image_height_px"] = spec.image_height_px();
    doc["um_per_px"] = spec.um_per_px();
    doc["rng_seed"] = spec.rng_seed;
    doc["noise_sigma"] = spec.noise_sigma;
    json drops = json::array();
    for (std::size_t i = 0; i < truth.drops.size(); ++i) {
        const TruthDrop& t = truth.drops[i];
        drops.push_back({{"id", i + 1},
                         {"diameter_um", t.diameter_um},
                         {"area_px", t.area_px},
                         {"center_x_px", t.center_x_px},
                         {"center_y_px", t.center_y_px}});
    }
    doc["drops"] = std::move(drops);
    return doc.dump(2) + "\n";
}

}  // namespace spraycard
