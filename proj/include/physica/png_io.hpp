#pragma once

#include "physica/image.hpp"

#include <string>
#include <utility>
#include <vector>

namespace physica {

/// 8-bit RGB, no interlacing. text_chunks become tEXt chunks in the given
/// order, before the image data. Output bytes are a pure function of the
/// inputs, so identical rasters produce identical files.
std::vector<std::uint8_t> encode_png(const ImageRgb8& image,
                                     const std::vector<std::pair<std::string, std::string>>&
                                         text_chunks = {});

/// Decodes the subset written by encode_png (8-bit RGB, non-interlaced; all
/// five scanline filters accepted). Throws IoError on anything else.
ImageRgb8 decode_png(const std::vector<std::uint8_t>& bytes);

void write_png_file(const std::string& path, const ImageRgb8& image,
                    const std::vector<std::pair<std::string, std::string>>& text_chunks = {});

ImageRgb8 read_png_file(const std::string& path);

}  // namespace physica
