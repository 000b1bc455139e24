// Copyright (c) 2026, The dscomp Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dscomp/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "dscomp/error.hpp"

namespace dscomp {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'C', 'T', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in, const char* field) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw FormatError(field, "truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

void write_header(std::ostream& out, std::span<const std::uint32_t> dims) {
  out.write(kMagic.data(), kMagic.size());
  out.put(static_cast<char>(dims.size()));
  for (std::uint32_t d : dims) put_u32(out, d);
  out.put(static_cast<char>(kDtypeF32));
}

void write_pixels(std::ostream& out, const RasterImage& image) {
  for (float v : image.pixels()) put_f32(out, v);
}

void check_dim(std::uint32_t d, const std::string& name) {
  if (d == 0) throw FormatError("dims", name + " is zero");
}

RasterImage read_image_payload(std::istream& in, std::uint32_t h, std::uint32_t w,
                               std::uint32_t c) {
  const std::size_t count = static_cast<std::size_t>(h) * w * c;
  std::vector<float> pixels(count);
  std::vector<unsigned char> raw(count * 4);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw FormatError("payload", "truncated pixel data");
  }
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* b = &raw[i * 4];
    const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                               (static_cast<std::uint32_t>(b[1]) << 8) |
                               (static_cast<std::uint32_t>(b[2]) << 16) |
                               (static_cast<std::uint32_t>(b[3]) << 24);
    const float v = std::bit_cast<float>(bits);
    if (!(v >= 0.0f && v <= 1.0f)) throw FormatError("payload", "pixel value outside [0,1]");
    pixels[i] = v;
  }
  return RasterImage(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c),
                     std::move(pixels));
}

}  // namespace

void write_tensor_container(std::ostream& out, const RasterImage& image) {
  const std::array<std::uint32_t, 3> dims{static_cast<std::uint32_t>(image.height()),
                                          static_cast<std::uint32_t>(image.width()),
                                          static_cast<std::uint32_t>(image.channels())};
  write_header(out, dims);
  write_pixels(out, image);
}

void write_tensor_container(std::ostream& out, std::span<const RasterImage> batch) {
  if (batch.empty()) throw InvalidArgument("cannot write an empty batch");
  const RasterImage& first = batch.front();
  for (const RasterImage& img : batch) {
    if (!img.same_shape(first)) throw InvalidArgument("batch images differ in shape");
  }
  const std::array<std::uint32_t, 4> dims{static_cast<std::uint32_t>(batch.size()),
                                          static_cast<std::uint32_t>(first.height()),
                                          static_cast<std::uint32_t>(first.width()),
                                          static_cast<std::uint32_t>(first.channels())};
  write_header(out, dims);
  for (const RasterImage& img : batch) write_pixels(out, img);
}

TensorContents read_tensor_container(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4)) throw FormatError("magic", "truncated");
  if (magic != kMagic) {
    throw FormatError("magic", "expected \"DCT1\", got \"" + std::string(magic.data(), 4) + "\"");
  }
  const int rank = in.get();
  if (rank == std::char_traits<char>::eof()) throw FormatError("rank", "truncated");
  if (rank != 3 && rank != 4) {
    throw FormatError("rank", "expected 3 or 4, got " + std::to_string(rank));
  }
  std::vector<std::uint32_t> dims(rank);
  for (auto& d : dims) d = get_u32(in, "dims");
  const int dtype = in.get();
  if (dtype == std::char_traits<char>::eof()) throw FormatError("dtype", "truncated");
  if (dtype != kDtypeF32) throw FormatError("dtype", "unsupported code " + std::to_string(dtype));

  const std::size_t o = (rank == 4) ? 1 : 0;
  check_dim(dims[o], "height");
  check_dim(dims[o + 1], "width");
  if (dims[o + 2] != 1 && dims[o + 2] != 3) {
    throw FormatError("dims", "channels must be 1 or 3, got " + std::to_string(dims[o + 2]));
  }

  TensorContents result;
  if (rank == 3) {
    result = read_image_payload(in, dims[0], dims[1], dims[2]);
  } else {
    check_dim(dims[0], "batch size");
    ImageBatch batch;
    batch.reserve(dims[0]);
    for (std::uint32_t i = 0; i < dims[0]; ++i) {
      batch.push_back(read_image_payload(in, dims[1], dims[2], dims[3]));
    }
    result = std::move(batch);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("payload", "trailing bytes after declared payload");
  }
  return result;
}

void save_tensor_container(const RasterImage& image, const std::filesystem::path& path) {
  image.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  write_tensor_container(out, image);
  if (!out) throw Error("write failed: " + path.string());
}

void save_tensor_container(std::span<const RasterImage> batch,
                           const std::filesystem::path& path) {
  for (const auto& img : batch) img.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  write_tensor_container(out, batch);
  if (!out) throw Error("write failed: " + path.string());
}

TensorContents load_tensor_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path.string());
  return read_tensor_container(in);
}

RasterImage load_image(const std::filesystem::path& path) {
  auto contents = load_tensor_container(path);
  if (auto* img = std::get_if<RasterImage>(&contents)) return std::move(*img);
  throw FormatError("rank", "expected a single image (rank 3) in " + path.string());
}

ImageBatch load_batch(const std::filesystem::path& path) {
  auto contents = load_tensor_container(path);
  if (auto* batch = std::get_if<ImageBatch>(&contents)) return std::move(*batch);
  ImageBatch one;
  one.push_back(std::move(std::get<RasterImage>(contents)));
  return one;
}

void write_ppm(const RasterImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        const float v = image.at(y, x, image.channels() == 3 ? c : 0);
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f))));
      }
    }
  }
}

}  // namespace dscomp
