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


#include "uqnn/npz.hpp"

#include <zlib.h>

#include <cctype>
#include <fstream>
#include <iterator>
#include <numeric>

namespace uqnn {

namespace {

uint32_t le16(const std::vector<uint8_t> &b, uint64_t at) {
    if (at + 2 > b.size()) {
        throw FormatError("truncated data", b.size());
    }
    return static_cast<uint32_t>(b[at]) | static_cast<uint32_t>(b[at + 1]) << 8;
}

uint32_t le32(const std::vector<uint8_t> &b, uint64_t at) {
    if (at + 4 > b.size()) {
        throw FormatError("truncated data", b.size());
    }
    return le16(b, at) | le16(b, at + 2) << 16;
}

uint64_t le64(const std::vector<uint8_t> &b, uint64_t at) {
    return static_cast<uint64_t>(le32(b, at)) | static_cast<uint64_t>(le32(b, at + 4)) << 32;
}

void put16(std::vector<uint8_t> &b, uint32_t v) {
    b.push_back(static_cast<uint8_t>(v));
    b.push_back(static_cast<uint8_t>(v >> 8));
}

void put32(std::vector<uint8_t> &b, uint32_t v) {
    put16(b, v & 0xffff);
    put16(b, v >> 16);
}

/// Cursor over the NPY header dictionary literal.
class HeaderParser {
  public:
    HeaderParser(const std::string &text, uint64_t base) : s_(text), base_(base) {}

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    void expect(char c) {
        if (!peek(c)) {
            fail(std::string("expected '") + c + "' in header");
        }
        ++pos_;
    }

    std::string quoted() {
        skip_ws();
        if (pos_ >= s_.size() || (s_[pos_] != '\'' && s_[pos_] != '"')) {
            fail("expected a quoted string in header");
        }
        const char q = s_[pos_++];
        const size_t end = s_.find(q, pos_);
        if (end == std::string::npos) {
            fail("unterminated string in header");
        }
        std::string out = s_.substr(pos_, end - pos_);
        pos_ = end + 1;
        return out;
    }

    bool boolean() {
        skip_ws();
        if (s_.compare(pos_, 4, "True") == 0) {
            pos_ += 4;
            return true;
        }
        if (s_.compare(pos_, 5, "False") == 0) {
            pos_ += 5;
            return false;
        }
        fail("expected True or False in header");
    }

    std::vector<size_t> shape() {
        expect('(');
        std::vector<size_t> dims;
        while (!peek(')')) {
            skip_ws();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            }
            if (start == pos_) {
                fail("expected an integer dimension in header");
            }
            dims.push_back(std::stoull(s_.substr(start, pos_ - start)));
            skip_ws();
            if (peek(',')) {
                ++pos_;
            } else if (!peek(')')) {
                fail("expected ',' or ')' in shape");
            }
        }
        ++pos_;
        return dims;
    }

    [[noreturn]] void fail(const std::string &what) const { throw FormatError("npy: " + what, base_ + pos_); }

  private:
    const std::string &s_;
    uint64_t base_;
    size_t pos_ = 0;
};

void reorder_fortran(NpyArray &a) {
    const size_t item = a.item_size();
    const size_t count = a.element_count();
    const size_t rank = a.shape.size();
    if (rank < 2) {
        return;
    }
    std::vector<uint8_t> out(a.data.size());
    std::vector<size_t> idx(rank, 0);
    for (size_t c = 0; c < count; ++c) {
        size_t f = 0;
        for (size_t d = rank; d-- > 0;) {
            f = f * a.shape[d] + idx[d];
        }
        std::copy_n(a.data.begin() + static_cast<std::ptrdiff_t>(f * item), item,
                    out.begin() + static_cast<std::ptrdiff_t>(c * item));
        for (size_t d = rank; d-- > 0;) {
            if (++idx[d] < a.shape[d]) {
                break;
            }
            idx[d] = 0;
        }
    }
    a.data = std::move(out);
}

}  // namespace

size_t NpyArray::element_count() const {
    return std::accumulate(shape.begin(), shape.end(), size_t{1}, std::multiplies<>());
}

size_t NpyArray::item_size() const {
    if (descr.size() < 3) {
        throw std::invalid_argument("npy: malformed dtype '" + descr + "'");
    }
    return std::stoul(descr.substr(2));
}

NpyArray parse_npy(const std::vector<uint8_t> &bytes) {
    static const uint8_t magic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
    if (bytes.size() < 10) {
        throw FormatError("npy: file shorter than the fixed preamble", bytes.size());
    }
    for (size_t i = 0; i < 6; ++i) {
        if (bytes[i] != magic[i]) {
            throw FormatError("npy: bad magic string", i);
        }
    }
    const uint8_t major = bytes[6];
    uint64_t header_len = 0;
    uint64_t header_start = 0;
    if (major == 1) {
        header_len = le16(bytes, 8);
        header_start = 10;
    } else if (major == 2 || major == 3) {
        header_len = le32(bytes, 8);
        header_start = 12;
    } else {
        throw FormatError("npy: unsupported format version " + std::to_string(major), 6);
    }
    if (header_start + header_len > bytes.size()) {
        throw FormatError("npy: header runs past end of file", bytes.size());
    }
    const std::string text(bytes.begin() + static_cast<std::ptrdiff_t>(header_start),
                           bytes.begin() + static_cast<std::ptrdiff_t>(header_start + header_len));

    NpyArray a;
    bool fortran = false;
    bool have_descr = false, have_order = false, have_shape = false;
    HeaderParser p(text, header_start);
    p.expect('{');
    while (!p.peek('}')) {
        const std::string key = p.quoted();
        p.expect(':');
        if (key == "descr") {
            a.descr = p.quoted();
            have_descr = true;
        } else if (key == "fortran_order") {
            fortran = p.boolean();
            have_order = true;
        } else if (key == "shape") {
            a.shape = p.shape();
            have_shape = true;
        } else {
            p.fail("unknown header key '" + key + "'");
        }
        if (p.peek(',')) {
            p.expect(',');
        } else if (!p.peek('}')) {
            p.fail("expected ',' or '}' in header");
        }
    }
    if (!have_descr || !have_order || !have_shape) {
        throw FormatError("npy: header lacks descr, fortran_order or shape", header_start);
    }
    const char order = a.descr.empty() ? '?' : a.descr[0];
    if (order == '>' && a.item_size() > 1) {
        throw FormatError("npy: big-endian data is not supported", header_start);
    }
    const uint64_t data_start = header_start + header_len;
    const uint64_t need = static_cast<uint64_t>(a.element_count()) * a.item_size();
    if (bytes.size() - data_start < need) {
        throw FormatError("npy: array data truncated (need " + std::to_string(need) + " bytes)", bytes.size());
    }
    a.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data_start),
                  bytes.begin() + static_cast<std::ptrdiff_t>(data_start + need));
    if (fortran) {
        reorder_fortran(a);
    }
    return a;
}

std::vector<uint8_t> serialize_npy(const NpyArray &array) {
    if (array.data.size() != array.element_count() * array.item_size()) {
        throw std::invalid_argument("npy: data size does not match shape and dtype");
    }
    std::string shape = "(";
    for (size_t i = 0; i < array.shape.size(); ++i) {
        shape += std::to_string(array.shape[i]) + (array.shape.size() == 1 ? "," : (i + 1 < array.shape.size() ? ", " : ""));
    }
    shape += ")";
    std::string header = "{'descr': '" + array.descr + "', 'fortran_order': False, 'shape': " + shape + ", }";
    while ((10 + header.size() + 1) % 64 != 0) {
        header += ' ';
    }
    header += '\n';
    std::vector<uint8_t> out = {0x93, 'N', 'U', 'M', 'P', 'Y', 1, 0};
    put16(out, static_cast<uint32_t>(header.size()));
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), array.data.begin(), array.data.end());
    return out;
}

std::map<std::string, std::vector<uint8_t>> read_zip(const std::vector<uint8_t> &bytes) {
    constexpr uint32_t kEocd = 0x06054b50, kZip64Locator = 0x07064b50, kZip64Eocd = 0x06064b50;
    constexpr uint32_t kCentral = 0x02014b50, kLocal = 0x04034b50;
    if (bytes.size() < 22) {
        throw FormatError("zip: file too short for an end-of-central-directory record", bytes.size());
    }
    uint64_t eocd = bytes.size() - 22;
    const uint64_t floor = bytes.size() > 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
    while (le32(bytes, eocd) != kEocd) {
        if (eocd == floor) {
            throw FormatError("zip: end-of-central-directory record not found", bytes.size());
        }
        --eocd;
    }
    uint64_t entries = le16(bytes, eocd + 10);
    uint64_t cd_offset = le32(bytes, eocd + 16);
    if (eocd >= 20 && le32(bytes, eocd - 20) == kZip64Locator) {
        const uint64_t z64 = le64(bytes, eocd - 20 + 8);
        if (le32(bytes, z64) != kZip64Eocd) {
            throw FormatError("zip: bad zip64 end-of-central-directory record", z64);
        }
        entries = le64(bytes, z64 + 32);
        cd_offset = le64(bytes, z64 + 48);
    }

    std::map<std::string, std::vector<uint8_t>> members;
    uint64_t at = cd_offset;
    for (uint64_t e = 0; e < entries; ++e) {
        if (le32(bytes, at) != kCentral) {
            throw FormatError("zip: bad central directory entry", at);
        }
        const uint32_t method = le16(bytes, at + 10);
        const uint32_t crc = le32(bytes, at + 16);
        uint64_t csize = le32(bytes, at + 20);
        uint64_t usize = le32(bytes, at + 24);
        const uint32_t name_len = le16(bytes, at + 28);
        const uint32_t extra_len = le16(bytes, at + 30);
        const uint32_t comment_len = le16(bytes, at + 32);
        uint64_t local = le32(bytes, at + 42);
        if (at + 46 + name_len > bytes.size()) {
            throw FormatError("zip: central directory name truncated", bytes.size());
        }
        const std::string name(bytes.begin() + static_cast<std::ptrdiff_t>(at + 46),
                               bytes.begin() + static_cast<std::ptrdiff_t>(at + 46 + name_len));
        for (uint64_t x = at + 46 + name_len; x + 4 <= at + 46 + name_len + extra_len;) {
            const uint32_t id = le16(bytes, x);
            const uint32_t len = le16(bytes, x + 2);
            if (id == 0x0001) {
                uint64_t f = x + 4;
                if (usize == 0xffffffffu) {
                    usize = le64(bytes, f);
                    f += 8;
                }
                if (csize == 0xffffffffu) {
                    csize = le64(bytes, f);
                    f += 8;
                }
                if (local == 0xffffffffu) {
                    local = le64(bytes, f);
                }
            }
            x += 4 + len;
        }
        at += 46 + name_len + extra_len + comment_len;

        if (le32(bytes, local) != kLocal) {
            throw FormatError("zip: bad local header for '" + name + "'", local);
        }
        const uint64_t data = local + 30 + le16(bytes, local + 26) + le16(bytes, local + 28);
        if (data + csize > bytes.size()) {
            throw FormatError("zip: member '" + name + "' truncated", bytes.size());
        }
        std::vector<uint8_t> out;
        if (method == 0) {
            out.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data),
                       bytes.begin() + static_cast<std::ptrdiff_t>(data + csize));
        } else if (method == 8) {
            out.resize(usize);
            z_stream zs{};
            if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
                throw FormatError("zip: cannot initialise inflate", data);
            }
            zs.next_in = const_cast<Bytef *>(bytes.data() + data);
            zs.avail_in = static_cast<uInt>(csize);
            zs.next_out = out.data();
            zs.avail_out = static_cast<uInt>(usize);
            const int rc = inflate(&zs, Z_FINISH);
            const uint64_t produced = zs.total_out;
            inflateEnd(&zs);
            if (rc != Z_STREAM_END || produced != usize) {
                throw FormatError("zip: corrupt deflate stream in '" + name + "'", data);
            }
        } else {
            throw FormatError("zip: unsupported compression method " + std::to_string(method), local);
        }
        if (crc32(0L, out.data(), static_cast<uInt>(out.size())) != crc) {
            throw FormatError("zip: CRC mismatch in '" + name + "'", data);
        }
        members.emplace(name, std::move(out));
    }
    return members;
}

std::vector<uint8_t> write_zip(const std::map<std::string, std::vector<uint8_t>> &members) {
    std::vector<uint8_t> out;
    std::vector<uint8_t> central;
    for (const auto &[name, data] : members) {
        if (data.size() >= 0xffffffffu || out.size() >= 0xffffffffu) {
            throw std::invalid_argument("zip: members over 4 GiB are not supported by the writer");
        }
        const uint32_t crc = static_cast<uint32_t>(crc32(0L, data.data(), static_cast<uInt>(data.size())));
        const uint32_t offset = static_cast<uint32_t>(out.size());
        put32(out, 0x04034b50);
        put16(out, 20);
        put16(out, 0);
        put16(out, 0);
        put16(out, 0);
        put16(out, 0x21);
        put32(out, crc);
        put32(out, static_cast<uint32_t>(data.size()));
        put32(out, static_cast<uint32_t>(data.size()));
        put16(out, static_cast<uint32_t>(name.size()));
        put16(out, 0);
        out.insert(out.end(), name.begin(), name.end());
        out.insert(out.end(), data.begin(), data.end());

        put32(central, 0x02014b50);
        put16(central, 20);
        put16(central, 20);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0x21);
        put32(central, crc);
        put32(central, static_cast<uint32_t>(data.size()));
        put32(central, static_cast<uint32_t>(data.size()));
        put16(central, static_cast<uint32_t>(name.size()));
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, 0);
        put32(central, offset);
        central.insert(central.end(), name.begin(), name.end());
    }
    const uint32_t cd_offset = static_cast<uint32_t>(out.size());
    out.insert(out.end(), central.begin(), central.end());
    put32(out, 0x06054b50);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<uint32_t>(members.size()));
    put16(out, static_cast<uint32_t>(members.size()));
    put32(out, static_cast<uint32_t>(central.size()));
    put32(out, cd_offset);
    put16(out, 0);
    return out;
}

std::vector<uint8_t> read_file_bytes(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path &path, const std::vector<uint8_t> &bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

std::map<std::string, NpyArray> read_npz(const std::filesystem::path &path) {
    std::map<std::string, NpyArray> arrays;
    for (auto &[name, bytes] : read_zip(read_file_bytes(path))) {
        std::string key = name;
        if (key.size() > 4 && key.ends_with(".npy")) {
            key.resize(key.size() - 4);
        }
        try {
            arrays.emplace(key, parse_npy(bytes));
        } catch (const FormatError &e) {
            throw FormatError("member '" + name + "': " + e.detail(), e.offset());
        }
    }
    return arrays;
}

void write_npz(const std::filesystem::path &path, const std::map<std::string, NpyArray> &arrays) {
    std::map<std::string, std::vector<uint8_t>> members;
    for (const auto &[key, array] : arrays) {
        members.emplace(key + ".npy", serialize_npy(array));
    }
    write_file_bytes(path, write_zip(members));
}

}  // namespace uqnn
