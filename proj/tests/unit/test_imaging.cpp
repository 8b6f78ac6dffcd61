#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "savo/imaging.hpp"
#include "savo/png_io.hpp"
#include "savo/utf8.hpp"

using namespace savo;
namespace im = savo::imaging;

namespace {

GrayImage random_gray(std::mt19937& rng, int w, int h) {
    std::uniform_real_distribution<double> v(0.0, 255.0);
    GrayImage g(w, h);
    for (auto& p : g.pixels()) p = v(rng);
    return g;
}

BinaryImage random_binary(std::mt19937& rng, int w, int h, double p = 0.4) {
    std::bernoulli_distribution ink(p);
    BinaryImage b(w, h);
    for (auto& px : b.pixels()) px = ink(rng) ? 1 : 0;
    return b;
}

}  // namespace

TEST_CASE("rgb_to_hsv hexcone values") {
    const Hsv red = im::rgb_to_hsv(Rgb{255, 0, 0});
    CHECK(red.h == doctest::Approx(0.0));
    CHECK(red.s == doctest::Approx(1.0));
    CHECK(red.v == doctest::Approx(1.0));

    const Hsv gray = im::rgb_to_hsv(Rgb{128, 128, 128});
    CHECK(gray.h == 0.0);
    CHECK(gray.s == 0.0);
    CHECK(gray.v == doctest::Approx(128.0 / 255.0));

    const Hsv cyan = im::rgb_to_hsv(Rgb{0, 255, 255});
    CHECK(cyan.h == doctest::Approx(180.0));
    CHECK(cyan.s == doctest::Approx(1.0));
    CHECK(cyan.v == doctest::Approx(1.0));

    ColorImage img(2, 1);
    img.at(1, 0) = Rgb{0, 0, 255};
    const GrayImage v = im::value_channel(im::rgb_to_hsv(img));
    CHECK(v.at(0, 0) == doctest::Approx(0.0));
    CHECK(v.at(1, 0) == doctest::Approx(255.0));
}

TEST_CASE("sobel magnitude") {
    const GrayImage flat(6, 5, 77.0);
    const GrayImage flat_mag = im::sobel_magnitude(flat);
    for (double p : flat_mag.pixels()) CHECK(p == 0.0);

    GrayImage step(6, 5, 0.0);
    for (int y = 0; y < 5; ++y) {
        for (int x = 3; x < 6; ++x) step.at(x, y) = 255.0;
    }
    const GrayImage mag = im::sobel_magnitude(step);
    CHECK(mag.at(2, 2) == 255.0);
    CHECK(mag.at(3, 2) == 255.0);
    CHECK(mag.at(0, 2) == 0.0);
    for (double p : mag.pixels()) {
        CHECK(p >= 0.0);
        CHECK(p <= 255.0);
    }

    CHECK_THROWS_AS(im::sobel_magnitude(GrayImage(2, 2)), Error);
    try {
        im::sobel_magnitude(GrayImage(2, 2));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ImageTooSmall);
    }
}

TEST_CASE("inverse-distance interpolation") {
    GrayImage g(6, 6);
    for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 6; ++x) g.at(x, y) = x * 10 + y;
    }
    CHECK(im::interpolate_inverse_distance(g, 3, 4) == g.at(3, 4));

    GrayImage two(2, 1, 100.0);
    CHECK(im::interpolate_inverse_distance(two, 0.5, 0.0) == doctest::Approx(100.0));

    GrayImage quad(2, 2);
    quad.at(0, 0) = 0;
    quad.at(1, 0) = 0;
    quad.at(0, 1) = 255;
    quad.at(1, 1) = 255;
    CHECK(im::interpolate_inverse_distance(quad, 0.5, 0.5) == doctest::Approx(127.5).epsilon(1e-12));

    CHECK_THROWS_AS(im::interpolate_inverse_distance(quad, 1.5, 0.0), Error);
    CHECK_THROWS_AS(im::interpolate_inverse_distance(quad, -0.1, 0.0), Error);

    std::mt19937 rng(5);
    const GrayImage r = random_gray(rng, 7, 5);
    std::uniform_real_distribution<double> ux(0.0, 6.0), uy(0.0, 4.0);
    for (int i = 0; i < 500; ++i) {
        const double x = ux(rng), y = uy(rng);
        CHECK(im::interpolate_inverse_distance(r, x, y) == doctest::Approx(oracle::inverse_distance(r, x, y)).epsilon(1e-12));
    }
}

TEST_CASE("upscale") {
    std::mt19937 rng(9);
    const GrayImage g = random_gray(rng, 5, 4);
    CHECK(im::upscale(g, 1.0) == g);

    GrayImage checker(2, 2);
    checker.at(0, 0) = 255;
    checker.at(1, 1) = 255;
    const GrayImage big = im::upscale(checker, 2.0);
    REQUIRE(big.width() == 4);
    REQUIRE(big.height() == 4);
    CHECK(big.at(0, 0) == 255);
    CHECK(big.at(3, 0) == 0);
    CHECK(big.at(0, 3) == 0);
    CHECK(big.at(3, 3) == 255);

    GrayImage bar(2, 1);
    bar.at(1, 0) = 255;
    const GrayImage wide = im::upscale(bar, 2.0);
    REQUIRE(wide.width() == 4);
    // Output column x maps to source x/3; weights 1/d to each neighbour.
    CHECK(wide.at(0, 0) == 0.0);
    CHECK(wide.at(1, 0) == doctest::Approx(255.0 * (1.0 / (2.0 / 3.0)) / (3.0 + 1.5)));
    CHECK(wide.at(2, 0) == doctest::Approx(255.0 * 3.0 / 4.5));
    CHECK(wide.at(3, 0) == 255.0);

    CHECK_THROWS_AS(im::upscale(g, 0.5), Error);
}

TEST_CASE("resize_nearest matches the double loop") {
    std::mt19937 rng(3);
    const GrayImage g = random_gray(rng, 6, 5);
    CHECK(im::resize_nearest(g, 6, 5) == g);

    GrayImage four(4, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) four.at(x, y) = y * 4 + x;
    }
    const GrayImage half = im::resize_nearest(four, 2, 2);
    CHECK(half.at(0, 0) == four.at(0, 0));
    CHECK(half.at(1, 0) == four.at(2, 0));
    CHECK(half.at(0, 1) == four.at(0, 2));
    CHECK(half.at(1, 1) == four.at(2, 2));

    const GrayImage one(1, 1, 42.0);
    const GrayImage spread = im::resize_nearest(one, 7, 3);
    for (double p : spread.pixels()) CHECK(p == 42.0);

    std::uniform_int_distribution<int> dim(1, 30);
    for (int t = 0; t < 50; ++t) {
        const GrayImage src = random_gray(rng, dim(rng), dim(rng));
        const int M = dim(rng), N = dim(rng);
        CHECK(im::resize_nearest(src, M, N) == oracle::resize_loop(src, M, N));
    }
    CHECK_THROWS_AS(im::resize_nearest(g, 0, 3), Error);
}

TEST_CASE("projections") {
    BinaryImage empty(5, 4);
    for (int v : im::horizontal_projection(empty)) CHECK(v == 0);
    for (int v : im::vertical_projection(empty)) CHECK(v == 0);

    BinaryImage row(5, 4);
    for (int x = 0; x < 5; ++x) row.at(x, 2) = 1;
    CHECK(im::horizontal_projection(row) == std::vector<int>{0, 0, 5, 0});

    BinaryImage col(5, 4);
    for (int y = 0; y < 4; ++y) col.at(1, y) = 1;
    CHECK(im::vertical_projection(col) == std::vector<int>{0, 4, 0, 0, 0});

    std::mt19937 rng(17);
    for (int t = 0; t < 20; ++t) {
        const BinaryImage b = random_binary(rng, 8, 8);
        std::vector<int> rows(8, 0), cols(8, 0);
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) {
                rows[y] += b.at(x, y);
                cols[x] += b.at(x, y);
            }
        }
        CHECK(im::horizontal_projection(b) == rows);
        CHECK(im::vertical_projection(b) == cols);
    }
}

TEST_CASE("connected components") {
    CHECK(im::connected_components(BinaryImage(4, 4)).empty());

    BinaryImage dots(5, 5);
    dots.at(0, 0) = 1;
    dots.at(4, 4) = 1;
    const auto two = im::connected_components(dots);
    REQUIRE(two.size() == 2);
    CHECK(two[0].pixel_count() == 1);
    CHECK(two[1].pixel_count() == 1);

    BinaryImage diag(5, 5);
    for (int i = 0; i < 5; ++i) diag.at(i, i) = 1;
    const auto one = im::connected_components(diag);
    REQUIRE(one.size() == 1);
    CHECK(one[0].bbox == Box{0, 0, 4, 4});

    std::mt19937 rng(23);
    for (int t = 0; t < 30; ++t) {
        const BinaryImage b = random_binary(rng, 12, 9, 0.35);
        const auto got = im::connected_components(b);
        const auto want = oracle::components(b);
        REQUIRE(got.size() == want.size());
        int total = 0;
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].pixel_count() == static_cast<int>(want[i].size()));
            CHECK(got[i].pixels.front() == want[i].front());
            total += got[i].pixel_count();
        }
        CHECK(total == im::ink_count(b));
    }
}

TEST_CASE("crop, clamp, ink box") {
    BinaryImage b(6, 6);
    b.at(2, 1) = 1;
    b.at(4, 3) = 1;
    CHECK(im::ink_bbox(b) == Box{2, 1, 4, 3});
    CHECK(im::ink_bbox(BinaryImage(3, 3)).empty());
    const BinaryImage c = im::crop(b, Box{2, 1, 4, 3});
    CHECK(c.width() == 3);
    CHECK(c.at(0, 0) == 1);
    CHECK(c.at(2, 2) == 1);
    CHECK_THROWS_AS(im::crop(b, Box{4, 4, 7, 7}), Error);
    CHECK(im::clamp_box(Box{-3, -1, 10, 2}, 6, 6) == Box{0, 0, 5, 2});
}

TEST_CASE("png round trip") {
    const std::filesystem::path dir = std::filesystem::path(SAVO_TEST_TMP) / "imaging";
    std::filesystem::create_directories(dir);

    ColorImage c(3, 2);
    c.at(0, 0) = Rgb{10, 20, 30};
    c.at(2, 1) = Rgb{250, 0, 128};
    io::write_png(dir / "c.png", c);
    CHECK(io::read_color_png(dir / "c.png") == c);

    BinaryImage b(4, 3);
    b.at(1, 1) = 1;
    b.at(3, 0) = 1;
    io::write_png(dir / "b.png", b);
    CHECK(io::read_binary_png(dir / "b.png") == b);

    GrayImage g(2, 2);
    g.at(0, 0) = 12.4;
    g.at(1, 1) = 300.0;
    io::write_png(dir / "g.png", g);
    const GrayImage back = io::read_gray_png(dir / "g.png");
    CHECK(back.at(0, 0) == 12.0);
    CHECK(back.at(1, 1) == 255.0);

    CHECK_THROWS_AS(io::read_color_png(dir / "missing.png"), Error);
}

TEST_CASE("utf8 codec") {
    const std::string text = "\xd8\xb3\xd9\x84\xd8\xa7\xd9\x85";  // salam
    const std::u32string cps = utf8::decode(text);
    CHECK(cps == U"سلام");
    CHECK(utf8::encode(cps) == text);
    CHECK_THROWS_AS(utf8::decode("\xd8"), Error);
    CHECK_THROWS_AS(utf8::decode("\xff\x41"), Error);
}
