#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "savo/atlas.hpp"
#include "savo/imaging.hpp"
#include "savo/localization.hpp"
#include "savo/pipeline.hpp"
#include "test_util.hpp"

using namespace savo;
using namespace savo::localization;

namespace {

MlpModel random_model(std::mt19937& rng) {
    std::normal_distribution<double> w(0.0, 1.0);
    MlpModel m;
    for (auto& row : m.w1) {
        for (auto& v : row) v = w(rng);
    }
    for (auto& v : m.b1) v = w(rng);
    for (auto& v : m.w2) v = w(rng);
    m.b2 = w(rng);
    return m;
}

MlpModel fixture_model() {
    return pipeline::load_models(std::filesystem::path(SAVO_DATA_DIR) / "models").mlp;
}

}  // namespace

TEST_CASE("frame integration") {
    GrayImage a(3, 2, 10.0);
    std::vector<GrayImage> same(4, a);
    CHECK(integrate_frames(same) == a);

    std::vector<GrayImage> outlier(3, a);
    outlier[1].at(2, 1) = 250.0;
    CHECK(integrate_frames(outlier).at(2, 1) == 10.0);
    CHECK(integrate_frames(outlier, MfiStatistic::Mean).at(2, 1) == doctest::Approx(90.0));

    std::vector<GrayImage> mixed{a, GrayImage(2, 2)};
    CHECK_CODE(integrate_frames(mixed), ErrorCode::DimensionMismatch);

    std::vector<ColorImage> colors(3, ColorImage(2, 2, Rgb{1, 2, 3}));
    colors[0].at(0, 0) = Rgb{200, 200, 200};
    CHECK(integrate_frames(colors).at(0, 0) == Rgb{1, 2, 3});
}

TEST_CASE("band features") {
    const GrayImage c(8, 8, 40.0);
    const BandFeatures f = band_features(c, c, Band{Axis::Rows, 2, 3});
    for (int k = 0; k < 2; ++k) {
        CHECK(f.values[5 * k + 0] == 40.0);
        CHECK(f.values[5 * k + 1] == 0.0);
        CHECK(f.values[5 * k + 2] == 0.0);
        CHECK(f.values[5 * k + 3] == 40.0);
        CHECK(f.values[5 * k + 4] == 40.0);
    }

    GrayImage two(4, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) two.at(x, y) = (x % 2) ? 255.0 : 0.0;
    }
    const BandFeatures g = band_features(two, two, Band{Axis::Cols, 0, 2});
    CHECK(g.values[0] == doctest::Approx(127.5));
    CHECK(g.values[1] == doctest::Approx(127.5 * 127.5));
    CHECK(g.values[2] == doctest::Approx(0.0));
    CHECK(g.values[3] == doctest::Approx(127.5 - 1.96 * 127.5));
    CHECK(g.values[4] == doctest::Approx(127.5 + 1.96 * 127.5));

    CHECK_CODE(band_features(c, c, Band{Axis::Rows, 7, 3}), ErrorCode::EmptyBand);
    CHECK_CODE(band_features(c, c, Band{Axis::Cols, 0, 2, 5, 9}), ErrorCode::EmptyBand);
}

TEST_CASE("mlp forward") {
    MlpModel zero;
    const std::array<double, 10> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(mlp_forward(zero, x) == 0.5);

    MlpModel hot;
    hot.w1[0][0] = 1.0;
    hot.w2[0] = 2.0;
    hot.b2 = -1.0;
    const std::array<double, 10> e0{1, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    const double h0 = 1.0 / (1.0 + std::exp(-1.0));
    const double want = 1.0 / (1.0 + std::exp(-(2.0 * h0 + 0.5 * 0.0 - 1.0)));
    CHECK(mlp_forward(hot, e0) == doctest::Approx(want));

    const std::array<double, 9> short_x{};
    CHECK_CODE(mlp_forward(zero, short_x), ErrorCode::BadInputLength);
}

TEST_CASE("mlp gradient matches finite differences") {
    std::mt19937 rng(101);
    std::normal_distribution<double> in(0.0, 2.0);
    constexpr double h = 1e-5;
    for (int t = 0; t < 20; ++t) {
        MlpModel m = random_model(rng);
        std::array<double, 10> x{};
        for (auto& v : x) v = in(rng);
        const double target = t % 2;
        const MlpGradient g = mlp_gradient(m, x, target);
        auto numeric = [&](double& p) {
            const double keep = p;
            p = keep + h;
            const double up = mlp_loss(m, x, target);
            p = keep - h;
            const double down = mlp_loss(m, x, target);
            p = keep;
            return (up - down) / (2 * h);
        };
        CHECK(g.b2 == doctest::Approx(numeric(m.b2)).epsilon(1e-4));
        for (int j = 0; j < 3; ++j) {
            CHECK(g.w2[j] == doctest::Approx(numeric(m.w2[j])).epsilon(1e-4));
            CHECK(g.b1[j] == doctest::Approx(numeric(m.b1[j])).epsilon(1e-4));
        }
    }
}

TEST_CASE("mlp training") {
    std::mt19937 rng(6);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<TrainingSample> data;
    for (int i = 0; i < 100; ++i) {
        TrainingSample s;
        s.label = i % 2;
        for (auto& v : s.features.values) v = (s.label ? 2.0 : -2.0) + noise(rng);
        data.push_back(s);
    }
    MlpTrainConfig cfg;
    cfg.epochs = 200;
    const auto result = mlp_train(data, cfg);
    int right = 0;
    for (const auto& s : data) right += (mlp_forward(result.model, s.features.values) >= 0.5) == (s.label == 1);
    CHECK(right >= 95);
    CHECK(result.loss_history.size() == 200);
    CHECK(result.loss_history.back() < result.loss_history.front());
    CHECK(mlp_train(data, cfg).model == result.model);
    CHECK(mlp_from_json(mlp_to_json(result.model)) == result.model);

    cfg.epochs = 0;
    CHECK_CODE(mlp_train(data, cfg), ErrorCode::BadArgument);
    cfg.epochs = 5;
    std::vector<TrainingSample> one_class(3);
    CHECK_CODE(mlp_train(one_class, cfg), ErrorCode::DegenerateData);
    CHECK_CODE(mlp_from_json("{\"version\":\"1\"}"), ErrorCode::MalformedInput);
}

TEST_CASE("bands and masks") {
    const auto bands = make_bands(Axis::Rows, 10, 4);
    REQUIRE(bands.size() == 3);
    CHECK(bands[2].start == 8);
    CHECK(bands[2].length == 2);
    const auto tall = make_bands(Axis::Rows, 10, 50);
    REQUIRE(tall.size() == 1);
    CHECK(tall[0].length == 10);

    CHECK(expand_band_mask(bands, {false, true, false}, 10) ==
          std::vector<bool>{false, false, false, false, true, true, true, true, false, false});

    std::vector<bool> gaps{true, false, true, false, false, false, true, false};
    fill_gaps(gaps, 2);
    CHECK(gaps == std::vector<bool>{true, true, true, false, false, false, true, false});

    CHECK(merge_masks(std::vector<bool>(20, true), std::vector<bool>(20, false), 20, 20, 1).empty());

    std::vector<bool> rows(20, false), cols(30, false);
    for (int y = 4; y < 8; ++y) rows[y] = true;
    for (int x = 10; x < 14; ++x) cols[x] = true;
    const auto one = merge_masks(rows, cols, 30, 20, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].box == Box{10, 4, 13, 7});

    for (int x = 20; x < 25; ++x) cols[x] = true;
    const auto two = merge_masks(rows, cols, 30, 20, 1);
    BinaryImage mask(30, 20);
    for (int y = 0; y < 20; ++y) {
        for (int x = 0; x < 30; ++x) mask.at(x, y) = rows[y] && cols[x];
    }
    CHECK(two.size() == oracle::components(mask).size());
    CHECK(two.size() == 2);
    CHECK(merge_masks(rows, cols, 30, 20, 17).size() == 1);
}

TEST_CASE("trained classifier on fixtures") {
    const MlpModel model = fixture_model();
    const ColorImage flat(120, 80, Rgb{90, 90, 90});
    for (bool b : classify_bands(flat, model, Axis::Rows, 4)) CHECK_FALSE(b);
    CHECK(localize_text(flat, model, {}).empty());

    const auto atlas = synth::build_default_atlas();
    synth::Rng rng(1);
    const BinaryImage word = synth::render_word(atlas, U"كتاب", {}, rng);
    ColorImage frame(160, 80, Rgb{20, 30, 60});
    const int ox = 40, oy = 28;
    for (int y = 0; y < word.height(); ++y) {
        for (int x = 0; x < word.width(); ++x) {
            if (word.at(x, y)) frame.at(ox + x, oy + y) = Rgb{240, 240, 240};
        }
    }
    const auto flags = classify_bands(frame, model, Axis::Rows, 4);
    const BinaryImage gray_ink = imaging::threshold(imaging::to_gray(frame), 128);
    const Box tight = imaging::ink_bbox(gray_ink);
    for (std::size_t i = 0; i < flags.size(); ++i) {
        const int y0 = static_cast<int>(i) * 4, y1 = y0 + 3;
        if (y1 < tight.y0 - 4 || y0 > tight.y1 + 4) CHECK_FALSE(flags[i]);
    }
    int hits = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) hits += flags[i];
    CHECK(hits >= 3);
    CHECK(classify_bands(frame, model, Axis::Rows, 4) == flags);

    const auto regions = localize_text(frame, model, {});
    REQUIRE(regions.size() == 1);
    CHECK(regions[0].box.x0 <= tight.x0 + 2);
    CHECK(regions[0].box.x1 >= tight.x1 - 2);
}
