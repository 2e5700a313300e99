#include "spraycard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spraycard/error.hpp"

namespace spraycard {

double px_to_um_ratio(const CardSpec& spec) {
    if (!(spec.card_width_um > 0.0) || !(spec.card_height_um > 0.0)) {
        throw ParameterError("card dimensions must be positive");
    }
    if (spec.image_width_px <= 0 || spec.image_height_px <= 0) {
        throw ParameterError("image dimensions must be positive");
    }
    const double wr = spec.card_width_um / spec.image_width_px;
    const double hr = spec.card_height_um / spec.image_height_px;
    if (std::abs(wr - hr) > kMaxAspectMismatch * std::min(wr, hr)) {
        throw DistortedCaptureError("horizontal scale " + std::to_string(wr) +
                                    " um/px and vertical scale " + std::to_string(hr) +
                                    " um/px differ by more than 2%; capture is not orthogonal");
    }
    return wr;
}

double diameter_from_area_um(double area_px, double um_per_px) {
    return 2.0 * std::sqrt(area_px / std::numbers::pi) * um_per_px;
}

double segment_diameter_um(const DropSegment& seg, double um_per_px) {
    return diameter_from_area_um(static_cast<double>(seg.area_px), um_per_px);
}

double calibrate_diameter(double diameter_um, const CalibrationParams& params) {
    if (!params.enabled) return diameter_um;
    return params.a * std::pow(diameter_um, params.b);
}

double percentile(std::span<const double> values, double p) {
    if (values.empty()) throw ParameterError("percentile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("percentile p must lie in [0,1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SprayReport compute_report(std::span<const DropSegment> segments, const CardSpec& spec,
                           const CalibrationParams& cal) {
    if (cal.enabled && !(cal.a > 0.0 && cal.b > 0.0)) {
        throw ParameterError("calibration parameters a and b must be positive");
    }
    const double ratio = px_to_um_ratio(spec);

    SprayReport r;
    r.um_per_px = ratio;
    r.card_area_cm2 = spec.card_area_um2() * 1e-8;
    r.drop_count = static_cast<std::int64_t>(segments.size());
    r.no_drops = segments.empty();

    std::vector<double> reported;
    reported.reserve(segments.size());
    r.drops.reserve(segments.size());
    for (const DropSegment& s : segments) {
        DropMeasure m;
        m.label = s.label;
        m.area_px = s.area_px;
        m.area_um2 = static_cast<double>(s.area_px) * ratio * ratio;
        m.diameter_um = segment_diameter_um(s, ratio);
        m.calibrated_diameter_um = calibrate_diameter(m.diameter_um, cal);
        m.centroid_x_px = s.centroid_x;
        m.centroid_y_px = s.centroid_y;
        r.total_drop_area_um2 += m.area_um2;
        reported.push_back(m.calibrated_diameter_um);
        r.drops.push_back(m);
    }

    r.density_per_cm2 = static_cast<double>(r.drop_count) / r.card_area_cm2;
    // The image may overshoot the card by the tolerated aspect mismatch.
    r.coverage_density_pct =
        std::min(100.0, r.total_drop_area_um2 / spec.card_area_um2() * 100.0);
    r.reliability_warning = r.coverage_density_pct > kReliableCoverageLimitPct;

    if (!reported.empty()) {
        r.d10_um = percentile(reported, 0.1);
        r.vmd_um = percentile(reported, 0.5);
        r.d90_um = percentile(reported, 0.9);
        r.drs = (*r.d90_um - *r.d10_um) / *r.vmd_um;
    }
    return r;
}

std::int64_t pixels_for(double diameter_um, double dpi) {
    if (!(diameter_um > 0.0) || !(dpi > 0.0)) {
        throw ParameterError("diameter and dpi must be positive");
    }
    const double px = diameter_um * dpi / kMicrometersPerInch;
    if (std::round(px * 10.0) < 10.0) return 0;
    return static_cast<std::int64_t>(std::llround(px));
}

}  // namespace spraycard
