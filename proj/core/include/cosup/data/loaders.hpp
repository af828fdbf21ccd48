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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cosup/data/dataset.hpp"

namespace cosup::data {

// Reads an IDX image file (magic 0x00000803, unsigned bytes, N x H x W) and
// its IDX label file (magic 0x00000801). Either may be gzip-compressed.
// Images are resized to options.image_size when their native size differs,
// and grayscale is replicated to options.channels.
//
// Throws FormatError on a bad magic number or short read, ConsistencyError
// when the record counts disagree or a label is >= num_classes, and
// ArgumentError when the files hold zero records.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path,
                 const LoadOptions& options);

struct FolderLoadResult {
  Dataset dataset;
  std::vector<std::string> errors;    // one per file that failed to decode
  std::vector<std::string> warnings;  // e.g. empty class directories
};

// Loads `root/<class>/*.{png,jpg,jpeg}`. Class indices follow the sorted
// subdirectory names. Undecodable files are skipped and reported in
// `errors`; an empty class directory keeps its index with count 0.
// Throws IoError if root is missing and ArgumentError if no image loads.
FolderLoadResult load_image_folder(const std::filesystem::path& root,
                                   const LoadOptions& options);

}  // namespace cosup::data
