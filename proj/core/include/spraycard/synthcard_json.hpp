#pragma once

#include <filesystem>
#include <string>

#include "spraycard/synthcard.hpp"

namespace spraycard {

/// Parses a layout document:
///
///   { "card_width_um": 76000, "card_height_um": 26000, "dpi": 600,
///     "background_intensity": 0.85, "drop_intensity": 0.10,
///     "noise_sigma": 0.0, "rng_seed": 7,
///     "drops": [ {"center_x_um": 500, "center_y_um": 500, "diameter_um": 250} ],
///     "grids": [ {"diameter_um": 1000, "count": 20, "spacing_um": 3000,
///                 "phase_px": [0.5, 0.5]} ],
///     "overlap_pairs": [ {"diameter_um": 800, "center_distance_um": 600,
///                         "mid_x_um": 4000, "mid_y_um": 2000} ] }
///
/// Intensities, noise, seed, drops, grids and overlap_pairs are optional.
/// Grid and pair drops are appended after the explicit drops. Throws
/// LayoutError with the JSON path of the first bad field.
SynthSpec parse_synth_spec(const std::string& json_text);
SynthSpec load_synth_spec(const std::filesystem::path& path);

/// Ground-truth sidecar as pretty-printed JSON.
std::string ground_truth_json(const SynthSpec& spec, const GroundTruth& truth);

}  // namespace spraycard
