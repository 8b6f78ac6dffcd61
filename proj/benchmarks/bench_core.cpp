#include <benchmark/benchmark.h>

#include <vector>

#include "savo/atlas.hpp"
#include "savo/binarization.hpp"
#include "savo/features.hpp"
#include "savo/imaging.hpp"
#include "savo/recognition.hpp"
#include "savo/script.hpp"
#include "savo/utf8.hpp"

namespace {

using namespace savo;

GrayImage noise_image(int w, int h, std::uint64_t seed) {
    synth::Rng rng(seed);
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) img.at(x, y) = rng.uniform(0.0, 255.0);
    }
    return img;
}

const synth::GlyphAtlas& atlas() {
    static const synth::GlyphAtlas a = synth::build_default_atlas();
    return a;
}

BinaryImage sample_line() {
    synth::Rng rng(7);
    return synth::render_word(atlas(), utf8::decode("مسلمون"), synth::RenderJitter{}, rng);
}

void BM_Sobel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto img = noise_image(n, n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(imaging::sobel_magnitude(img));
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Sobel)->Arg(128)->Arg(512);

void BM_BinarizeRegion(benchmark::State& state) {
    const auto img = noise_image(160, 40, 2);
    for (auto _ : state) benchmark::DoNotOptimize(binarization::binarize_region(img, Box{0, 0, 159, 39}));
}
BENCHMARK(BM_BinarizeRegion);

void BM_Fcm(benchmark::State& state) {
    synth::Rng rng(3);
    std::vector<binarization::Point> pts;
    for (int i = 0; i < state.range(0); ++i) pts.push_back({rng.uniform(0, 50), rng.uniform(0, 3)});
    binarization::FcmConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(binarization::fuzzy_cmeans(pts, cfg));
}
BENCHMARK(BM_Fcm)->Arg(1000)->Arg(10000);

void BM_SegmentLine(benchmark::State& state) {
    const auto line = sample_line();
    for (auto _ : state) benchmark::DoNotOptimize(script::analyze_line(line));
}
BENCHMARK(BM_SegmentLine);

void BM_ExtractFeatures(benchmark::State& state) {
    const auto analysis = script::analyze_line(sample_line());
    for (auto _ : state) {
        for (const auto& seg : analysis.segments) benchmark::DoNotOptimize(features::extract_features(seg));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(analysis.segments.size()));
}
BENCHMARK(BM_ExtractFeatures);

void BM_KnnMembership(benchmark::State& state) {
    synth::Rng rng(4);
    const auto n = static_cast<int>(state.range(0));
    std::vector<recognition::LabeledSample> samples;
    const auto& glyphs = atlas().glyphs();
    auto it = glyphs.begin();
    for (int i = 0; i < n; ++i, ++it) {
        if (it == glyphs.end()) it = glyphs.begin();
        std::vector<double> f(features::kFeatureLength);
        for (auto& v : f) v = rng.uniform(0, 40);
        samples.push_back({std::move(f), it->first});
    }
    const auto store = recognition::build_store(samples);
    std::vector<double> q(features::kFeatureLength);
    for (auto& v : q) v = rng.uniform(0, 40);
    const recognition::KnnParams params{};
    for (auto _ : state) benchmark::DoNotOptimize(recognition::knn_membership(q, store, params));
}
BENCHMARK(BM_KnnMembership)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
