#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "polypdet/error.hpp"
#include "polypdet/image_io.hpp"

using namespace polypdet;

namespace {

RgbImage gradient_image(int rows, int cols) {
    RgbImage img{Frame(rows, cols), Frame(rows, cols), Frame(rows, cols)};
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            img.red(r, c) = (r * 7 + c) % 256;
            img.green(r, c) = (c * 5) % 256;
            img.blue(r, c) = 255 - (r % 256);
        }
    return img;
}

}  // namespace

TEST_CASE("png round trip is lossless for integer samples") {
    const RgbImage img = gradient_image(20, 33);
    const auto bytes = encode_png(img);
    const RgbImage back = decode_image(bytes);
    CHECK(back.red == img.red);
    CHECK(back.green == img.green);
    CHECK(back.blue == img.blue);
}

TEST_CASE("write and read through files, gray and color") {
    const auto dir = std::filesystem::temp_directory_path() / "polypdet_io_test";
    std::filesystem::create_directories(dir);
    const RgbImage img = gradient_image(16, 16);
    write_image(dir / "c.png", img);
    CHECK(read_image(dir / "c.png").green == img.green);

    Frame g(12, 14);
    for (int r = 0; r < 12; ++r)
        for (int c = 0; c < 14; ++c) g(r, c) = r * 10 + c;
    write_image(dir / "g.pgm", g);
    const RgbImage back = read_image(dir / "g.pgm");
    CHECK(back.red == g);
    CHECK(back.blue == g);
    CHECK(to_grayscale(back)(3, 4) == doctest::Approx(g(3, 4)));

    // Values are rounded and clamped on write.
    Frame h(8, 8, 300.0);
    h(0, 0) = -5.0;
    h(1, 1) = 10.4;
    write_image(dir / "h.png", h);
    const RgbImage hb = read_image(dir / "h.png");
    CHECK(hb.red(0, 0) == 0.0);
    CHECK(hb.red(1, 1) == 10.0);
    CHECK(hb.red(2, 2) == 255.0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("decode failures are input errors") {
    CHECK_THROWS_AS(read_image("/nonexistent/frame.png"), InputError);
    const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(decode_image(junk), InputError);
    CHECK_THROWS_AS(write_image("/nonexistent/dir/x.png", Frame(8, 8)), IoError);
}
