#pragma once

#include <filesystem>

#include "scatterkit/image.hpp"

namespace scatterkit {

/// Decodes any format OpenCV reads into RGB planes scaled to [0, 1].
/// Grayscale files are expanded to three equal planes. Throws IoError.
PlanarImage load_image(const std::filesystem::path& path);

/// Writes 1- or 3-plane images whose values are already in [0, 255]; values
/// are rounded and clamped. Written to a temporary file, then renamed.
void save_image(const PlanarImage& image, const std::filesystem::path& path);

/// Shorter side resized to fit, then centre-cropped to rows x cols.
PlanarImage resize_and_crop(const PlanarImage& image, std::size_t rows, std::size_t cols);

}  // namespace scatterkit
