// Copyright 2026 The cosup Authors
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

#include "cosup/data/loaders.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <spdlog/spdlog.h>

#include "cosup/util/errors.hpp"

namespace cosup::data {
namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct GzCloser {
  void operator()(gzFile_s* f) const { gzclose(f); }
};
using GzFile = std::unique_ptr<gzFile_s, GzCloser>;

// gzread reads plain files transparently, so .gz is optional.
GzFile open_idx(const std::filesystem::path& path) {
  GzFile file(gzopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());
  return file;
}

void read_exact(gzFile_s* file, void* dst, std::size_t bytes,
                const std::filesystem::path& path) {
  auto* out = static_cast<unsigned char*>(dst);
  while (bytes > 0) {
    const unsigned chunk =
        static_cast<unsigned>(std::min<std::size_t>(bytes, 1u << 30));
    const int got = gzread(file, out, chunk);
    if (got <= 0) throw FormatError(path.string() + ": unexpected end of file");
    out += got;
    bytes -= static_cast<std::size_t>(got);
  }
}

std::uint32_t read_be32(gzFile_s* file, const std::filesystem::path& path) {
  std::array<unsigned char, 4> b{};
  read_exact(file, b.data(), b.size(), path);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", v);
  return buf;
}

// Writes one 8-bit image (H, W, C interleaved as OpenCV stores it) into the
// (C, S, S) float slot, resizing and replicating channels as needed.
void store_image(const cv::Mat& src, std::size_t size, std::size_t channels,
                 float* dst) {
  cv::Mat resized = src;
  if (src.rows != static_cast<int>(size) || src.cols != static_cast<int>(size)) {
    const bool shrink = src.rows > static_cast<int>(size) ||
                        src.cols > static_cast<int>(size);
    cv::resize(src, resized, cv::Size(static_cast<int>(size), static_cast<int>(size)),
               0, 0, shrink ? cv::INTER_AREA : cv::INTER_LINEAR);
  }
  const int src_channels = resized.channels();
  const std::size_t plane = size * size;
  for (std::size_t y = 0; y < size; ++y) {
    const auto* row = resized.ptr<unsigned char>(static_cast<int>(y));
    for (std::size_t x = 0; x < size; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        const int from = src_channels == 1 ? 0 : static_cast<int>(c);
        dst[c * plane + y * size + x] =
            static_cast<float>(row[x * static_cast<std::size_t>(src_channels) +
                                   static_cast<std::size_t>(from)]) /
            255.0f;
      }
    }
  }
}

bool is_image_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path,
                 const LoadOptions& options) {
  if (options.channels != 1 && options.channels != 3) {
    throw ArgumentError("IDX images load as 1 or 3 channels");
  }
  auto image_file = open_idx(images_path);
  if (const auto magic = read_be32(image_file.get(), images_path);
      magic != kIdxImageMagic) {
    throw FormatError(images_path.string() + ": bad IDX image magic " + hex(magic) +
                      " (expected " + hex(kIdxImageMagic) + ")");
  }
  const std::size_t n = read_be32(image_file.get(), images_path);
  const std::size_t rows = read_be32(image_file.get(), images_path);
  const std::size_t cols = read_be32(image_file.get(), images_path);

  auto label_file = open_idx(labels_path);
  if (const auto magic = read_be32(label_file.get(), labels_path);
      magic != kIdxLabelMagic) {
    throw FormatError(labels_path.string() + ": bad IDX label magic " + hex(magic) +
                      " (expected " + hex(kIdxLabelMagic) + ")");
  }
  const std::size_t n_labels = read_be32(label_file.get(), labels_path);
  if (n_labels != n) {
    throw ConsistencyError("IDX record count mismatch: " + std::to_string(n) +
                           " images vs " + std::to_string(n_labels) + " labels");
  }
  if (n == 0) throw ArgumentError("IDX files contain zero records");

  std::vector<unsigned char> raw_labels(n);
  read_exact(label_file.get(), raw_labels.data(), n, labels_path);

  const std::size_t s = options.image_size;
  Dataset d;
  d.images = Tensor<float>({n, options.channels, s, s});
  d.num_classes = options.num_classes;
  std::vector<unsigned char> pixels(rows * cols);
  for (std::size_t i = 0; i < n; ++i) {
    read_exact(image_file.get(), pixels.data(), pixels.size(), images_path);
    const cv::Mat img(static_cast<int>(rows), static_cast<int>(cols), CV_8UC1,
                      pixels.data());
    store_image(img, s, options.channels, d.images.slice(i).data());
  }
  d.labels.assign(raw_labels.begin(), raw_labels.end());
  d.class_counts = count_classes(d.labels, d.num_classes);
  return d;
}

FolderLoadResult load_image_folder(const std::filesystem::path& root,
                                   const LoadOptions& options) {
  namespace fs = std::filesystem;
  if (options.channels != 1 && options.channels != 3) {
    throw ArgumentError("folder images load as 1 or 3 channels");
  }
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  if (class_dirs.empty()) {
    throw ArgumentError("no class subdirectories under " + root.string());
  }

  FolderLoadResult result;
  const std::size_t s = options.image_size;
  const std::size_t per_image = options.channels * s * s;
  std::vector<float> pixels;
  std::vector<int> labels;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < class_dirs.size(); ++c) {
    names.push_back(class_dirs[c].filename().string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dirs[c])) {
      if (entry.is_regular_file() && is_image_file(entry.path())) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      result.warnings.push_back("class '" + names.back() + "' has no images");
      spdlog::warn("{}", result.warnings.back());
      continue;
    }
    for (const auto& file : files) {
      const cv::Mat img = cv::imread(
          file.string(),
          options.channels == 1 ? cv::IMREAD_GRAYSCALE : cv::IMREAD_COLOR);
      if (img.empty()) {
        result.errors.push_back(file.string() + ": cannot decode image");
        continue;
      }
      cv::Mat rgb = img;
      if (img.channels() == 3) cv::cvtColor(img, rgb, cv::COLOR_BGR2RGB);
      pixels.resize(pixels.size() + per_image);
      store_image(rgb, s, options.channels,
                  pixels.data() + pixels.size() - per_image);
      labels.push_back(static_cast<int>(c));
    }
  }
  for (const auto& e : result.errors) spdlog::error("{}", e);
  if (labels.empty()) {
    throw ArgumentError("no decodable images under " + root.string());
  }

  Dataset& d = result.dataset;
  d.images = Tensor<float>({labels.size(), options.channels, s, s}, std::move(pixels));
  d.labels = std::move(labels);
  d.num_classes = static_cast<int>(class_dirs.size());
  d.class_counts = count_classes(d.labels, d.num_classes);
  d.class_names = std::move(names);
  return result;
}

}  // namespace cosup::data
