#include <benchmark/benchmark.h>

#include <algorithm>
#include <map>

#include "spraycard/pipeline.hpp"
#include "spraycard/raster.hpp"
#include "spraycard/segmentation.hpp"
#include "spraycard/synthcard.hpp"

namespace {

using namespace spraycard;

// A standard 76 x 26 mm card with a few hundred mixed drops.
const SynthSpec& card_spec(double dpi) {
    static std::map<double, SynthSpec> cache;
    auto [it, inserted] = cache.try_emplace(dpi);
    if (inserted) {
        SynthSpec& s = it->second;
        s.card_width_um = 76000;
        s.card_height_um = 26000;
        s.dpi = dpi;
        s.noise_sigma = 0.03;
        s.rng_seed = 1;
        for (const auto& g : {GridLayout{1000.0, 60, 3000.0, std::nullopt},
                              GridLayout{250.0, 150, 1500.0, std::nullopt}}) {
            const auto drops = grid_layout(g, s.card_width_um, s.card_height_um, dpi);
            // Offset the second grid so the two sets interleave.
            const double shift = g.diameter_um < 500 ? 750.0 : 0.0;
            for (auto d : drops) {
                d.center_x_um = std::min(d.center_x_um + shift, s.card_width_um - d.diameter_um);
                s.drops.push_back(d);
            }
        }
    }
    return it->second;
}

const RgbImage& card_image(double dpi) {
    static std::map<double, RgbImage> cache;
    auto it = cache.find(dpi);
    if (it == cache.end()) it = cache.emplace(dpi, render(card_spec(dpi)).image).first;
    return it->second;
}

void BM_Grayscale(benchmark::State& state) {
    const RgbImage& img = card_image(static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(to_grayscale(img));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

void BM_Binarize(benchmark::State& state) {
    const GrayImage gray = to_grayscale(card_image(static_cast<double>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(binarize(gray));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(gray.size()));
}

void BM_DilateErode(benchmark::State& state) {
    const BinaryImage bin = binarize(to_grayscale(card_image(600)));
    const StructuringElement se(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dilate(bin, se));
        benchmark::DoNotOptimize(erode(bin, se));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(bin.size()));
}

void BM_FindContours(benchmark::State& state) {
    const BinaryImage bin = binarize(to_grayscale(card_image(static_cast<double>(state.range(0)))));
    const BinaryImage ring = contour_mask(dilate(bin), erode(bin));
    for (auto _ : state) benchmark::DoNotOptimize(find_contours(ring));
}

void BM_Watershed(benchmark::State& state) {
    const GrayImage gray = to_grayscale(card_image(static_cast<double>(state.range(0))));
    const BinaryImage bin = binarize(gray);
    const BinaryImage dil = dilate(bin);
    const auto contours = find_contours(contour_mask(dil, erode(bin)));
    const auto markers = core_markers(contours, bin);
    for (auto _ : state) benchmark::DoNotOptimize(watershed(gray, markers, dil));
}

void BM_FullPipeline(benchmark::State& state) {
    const double dpi = static_cast<double>(state.range(0));
    const RgbImage& img = card_image(dpi);
    AnalysisConfig cfg;
    cfg.card_width_um = card_spec(dpi).card_width_um;
    cfg.card_height_um = card_spec(dpi).card_height_um;
    for (auto _ : state) benchmark::DoNotOptimize(analyze(img, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

}  // namespace

BENCHMARK(BM_Grayscale)->Arg(600)->Arg(1200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Binarize)->Arg(600)->Arg(1200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DilateErode)->Arg(3)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FindContours)->Arg(600)->Arg(1200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Watershed)->Arg(600)->Arg(1200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FullPipeline)->Arg(300)->Arg(600)->Arg(1200)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
