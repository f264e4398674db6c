// Copyright 2026 The uqnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/**
 * @file
 * NPY arrays and NPZ archives (ZIP containers of .npy members, stored or
 * deflated, with or without zip64 records).
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace uqnn {

/// Malformed input. `offset` is the byte position the problem was found at.
class FormatError : public std::runtime_error {
  public:
    FormatError(const std::string &what, uint64_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), detail_(what), offset_(offset) {}

    uint64_t offset() const { return offset_; }
    const std::string &detail() const { return detail_; }

  private:
    std::string detail_;
    uint64_t offset_;
};

/// An array in C order. `descr` is the NPY type string, e.g. "|u1" or "<f8".
struct NpyArray {
    std::string descr;
    std::vector<size_t> shape;
    std::vector<uint8_t> data;

    size_t element_count() const;
    size_t item_size() const;
};

/// Parses a complete .npy image. Fortran-ordered arrays are reordered to C
/// order on load.
NpyArray parse_npy(const std::vector<uint8_t> &bytes);
std::vector<uint8_t> serialize_npy(const NpyArray &array);

/// Member name -> raw bytes.
std::map<std::string, std::vector<uint8_t>> read_zip(const std::vector<uint8_t> &bytes);
/// Stored (uncompressed) archive.
std::vector<uint8_t> write_zip(const std::map<std::string, std::vector<uint8_t>> &members);

/// Keys without the ".npy" suffix.
std::map<std::string, NpyArray> read_npz(const std::filesystem::path &path);
void write_npz(const std::filesystem::path &path, const std::map<std::string, NpyArray> &arrays);

std::vector<uint8_t> read_file_bytes(const std::filesystem::path &path);
void write_file_bytes(const std::filesystem::path &path, const std::vector<uint8_t> &bytes);

}  // namespace uqnn
