#pragma once

// 8-bit PNG / PGM / PPM decode and encode. Decoded samples map onto the
// [0,255] real scale without rescaling.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "polypdet/frame.hpp"

namespace polypdet {

/// Three-channel image; grayscale sources decode into three equal channels.
struct RgbImage {
    Frame red;
    Frame green;
    Frame blue;

    int rows() const noexcept { return red.rows(); }
    int cols() const noexcept { return red.cols(); }

    static RgbImage from_gray(const Frame& gray) { return {gray, gray, gray}; }
};

Frame to_grayscale(const RgbImage& rgb);

/// Throws InputError when the file is missing or not a decodable image.
RgbImage read_image(const std::filesystem::path& path);
RgbImage decode_image(std::span<const std::uint8_t> bytes);

/// Values are rounded and clamped to [0,255]. The format follows the
/// extension (.png, .pgm, .ppm). Throws IoError on failure.
void write_image(const std::filesystem::path& path, const RgbImage& img);
void write_image(const std::filesystem::path& path, const Frame& gray);

std::vector<std::uint8_t> encode_png(const RgbImage& img);

}  // namespace polypdet
