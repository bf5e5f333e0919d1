/* Copyright 2026 The drivenet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

#pragma once

#include <png.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "drivenet/dataio/frame.hpp"

namespace drivenet {

// libpng's simplified API; always reads/writes 8-bit RGB.

inline Frame read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw Error("cannot read image " + path.string() + ": " + image.message);
  image.format = PNG_FORMAT_RGB;
  Frame f(static_cast<int>(image.height), static_cast<int>(image.width));
  if (!png_image_finish_read(&image, nullptr, f.pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error("cannot decode image " + path.string() + ": " + image.message);
  }
  return f;
}

inline void write_png(const std::filesystem::path& path, const Frame& f) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(f.width);
  image.height = static_cast<png_uint_32>(f.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, f.pixels.data(), 0, nullptr))
    throw Error("cannot write image " + path.string() + ": " + image.message);
}

}  // namespace drivenet
