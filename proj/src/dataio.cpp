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


#include "uqnn/dataio.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "uqnn/npz.hpp"
#include "uqnn/rng.hpp"

namespace uqnn {

namespace fs = std::filesystem;

std::string split_name(SplitName s) {
    switch (s) {
        case SplitName::Train:
            return "train";
        case SplitName::Test:
            return "test";
        case SplitName::Val:
            return "val";
    }
    return "?";
}

uint64_t fnv1a(const void *data, size_t len, uint64_t h) {
    const auto *p = static_cast<const uint8_t *>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(uint64_t v) {
    static const char *digits = "0123456789abcdef";
    std::string out(16, '0');
    for (size_t i = 16; i-- > 0; v >>= 4) {
        out[i] = digits[v & 0xf];
    }
    return out;
}

namespace {

uint64_t raw_digest(const RawDataset &raw) {
    uint64_t h = fnv1a(raw.images.data(), raw.images.size());
    return fnv1a(raw.labels.data(), raw.labels.size(), h);
}

void require_u8(const NpyArray &a, const std::string &key) {
    if (a.descr != "|u1" && a.descr != "<u1" && a.descr != ">u1") {
        throw std::runtime_error("read_medmnist: '" + key + "' has dtype " + a.descr + ", expected unsigned 8-bit");
    }
}

RawDataset split_from_arrays(const std::map<std::string, NpyArray> &arrays, SplitName split) {
    const std::string prefix = split_name(split);
    const auto img = arrays.find(prefix + "_images");
    const auto lab = arrays.find(prefix + "_labels");
    if (img == arrays.end() || lab == arrays.end()) {
        throw std::runtime_error("read_medmnist: missing key " +
                                 (img == arrays.end() ? prefix + "_images" : prefix + "_labels"));
    }
    require_u8(img->second, img->first);
    require_u8(lab->second, lab->first);
    const auto &is = img->second.shape;
    if (is.size() != 3 || is[1] != kImageSide || is[2] != kImageSide) {
        throw std::runtime_error("read_medmnist: " + img->first + " must have shape (N, 28, 28)");
    }
    const auto &ls = lab->second.shape;
    const bool label_shape_ok = (ls.size() == 1 || (ls.size() == 2 && ls[1] == 1)) && ls[0] == is[0];
    if (!label_shape_ok) {
        throw std::runtime_error("read_medmnist: " + lab->first + " must have shape (N,) or (N, 1) matching images");
    }
    return {split, is[0], img->second.data, lab->second.data};
}

bool is_number(const std::string &s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

RawDataset read_csv_split(const fs::path &file, SplitName split) {
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot open " + file.string());
    }
    RawDataset raw;
    raw.split = split;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            fields.push_back(f);
        }
        if (line_no == 1 && !fields.empty() && !is_number(fields[0])) {
            continue;  // header
        }
        if (fields.size() != kImagePixels + 1) {
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) + ": expected 785 fields, got " +
                                     std::to_string(fields.size()));
        }
        for (size_t i = 0; i < fields.size(); ++i) {
            if (!is_number(fields[i]) || fields[i].size() > 3 || std::stoi(fields[i]) > 255) {
                throw std::runtime_error(file.string() + ":" + std::to_string(line_no) + ": field " +
                                         std::to_string(i + 1) + " is not an integer in 0..255");
            }
            const auto v = static_cast<uint8_t>(std::stoi(fields[i]));
            if (i == 0) {
                raw.labels.push_back(v);
            } else {
                raw.images.push_back(v);
            }
        }
        ++raw.n;
    }
    if (raw.n == 0) {
        throw std::runtime_error(file.string() + ": no data rows");
    }
    return raw;
}

void write_csv_split(const fs::path &file, const RawDataset &raw, bool header) {
    std::ofstream out(file);
    if (header) {
        out << "label";
        for (size_t p = 0; p < kImagePixels; ++p) {
            out << ",p" << p;
        }
        out << '\n';
    }
    for (size_t r = 0; r < raw.n; ++r) {
        out << static_cast<int>(raw.labels[r]);
        for (size_t p = 0; p < kImagePixels; ++p) {
            out << ',' << static_cast<int>(raw.images[r * kImagePixels + p]);
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("cannot write " + file.string());
    }
}

}  // namespace

MedmnistArchive read_medmnist(const fs::path &path) {
    if (fs::is_directory(path)) {
        MedmnistArchive a{read_csv_split(path / "train.csv", SplitName::Train),
                          read_csv_split(path / "test.csv", SplitName::Test), std::nullopt};
        if (fs::exists(path / "val.csv")) {
            a.val = read_csv_split(path / "val.csv", SplitName::Val);
        }
        return a;
    }
    const auto arrays = read_npz(path);
    MedmnistArchive a{split_from_arrays(arrays, SplitName::Train), split_from_arrays(arrays, SplitName::Test),
                      std::nullopt};
    if (arrays.count("val_images") != 0) {
        a.val = split_from_arrays(arrays, SplitName::Val);
    }
    return a;
}

void write_medmnist_npz(const fs::path &path, const MedmnistArchive &archive) {
    std::map<std::string, NpyArray> arrays;
    auto put = [&](const RawDataset &raw) {
        const std::string prefix = split_name(raw.split);
        arrays[prefix + "_images"] = {"|u1", {raw.n, kImageSide, kImageSide}, raw.images};
        arrays[prefix + "_labels"] = {"|u1", {raw.n, 1}, raw.labels};
    };
    put(archive.train);
    put(archive.test);
    if (archive.val) {
        put(*archive.val);
    }
    write_npz(path, arrays);
}

void write_medmnist_csv(const fs::path &dir, const MedmnistArchive &archive, bool header) {
    fs::create_directories(dir);
    write_csv_split(dir / "train.csv", archive.train, header);
    write_csv_split(dir / "test.csv", archive.test, header);
    if (archive.val) {
        write_csv_split(dir / "val.csv", *archive.val, header);
    }
}

void convert_csv(const fs::path &in, const fs::path &out) {
    const MedmnistArchive archive = read_medmnist(in);
    if (fs::is_directory(in)) {
        write_medmnist_npz(out, archive);
    } else {
        write_medmnist_csv(out, archive);
    }
}

std::optional<fs::path> locate_dataset(const std::string &name) {
    const char *dir = std::getenv("MEDMNIST_DIR");
    if (dir == nullptr || *dir == '\0') {
        return std::nullopt;
    }
    const fs::path base(dir);
    for (const fs::path &p : {base / (name + "mnist.npz"), base / (name + "mnist")}) {
        if (fs::exists(p)) {
            return p;
        }
    }
    return std::nullopt;
}

Task task_for_dataset(const std::string &name) {
    if (name == "pneumonia") {
        return Task::Pneumonia;
    }
    if (name == "retina") {
        return Task::RetinaZeroVsRest;
    }
    throw std::invalid_argument("unknown dataset '" + name + "' (expected pneumonia or retina)");
}

std::string task_name(Task t) { return t == Task::Pneumonia ? "pneumonia" : "retina_0_vs_rest"; }

std::vector<int> binarize(const RawDataset &raw, Task task) {
    std::vector<int> out;
    out.reserve(raw.n);
    const int max_label = task == Task::Pneumonia ? 1 : 4;
    for (size_t i = 0; i < raw.labels.size(); ++i) {
        const int v = raw.labels[i];
        if (v > max_label) {
            throw std::invalid_argument("binarize: unexpected label " + std::to_string(v) + " at row " +
                                        std::to_string(i) + " for task " + task_name(task));
        }
        out.push_back(v == 0 ? 0 : 1);
    }
    return out;
}

namespace {

Eigen::MatrixXd scaled_pixels(const RawDataset &raw) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(raw.n), static_cast<Eigen::Index>(kImagePixels));
    for (size_t r = 0; r < raw.n; ++r) {
        for (size_t p = 0; p < kImagePixels; ++p) {
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p)) =
                raw.images[r * kImagePixels + p] / kPixelScale;
        }
    }
    return x;
}

}  // namespace

PcaModel fit_pca(const RawDataset &train, size_t k) {
    if (k == 0 || k > kImagePixels) {
        throw std::invalid_argument("fit_pca: k must be in 1..784");
    }
    if (train.n < 2) {
        throw std::invalid_argument("fit_pca: need at least two images");
    }
    Eigen::MatrixXd x = scaled_pixels(train);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(train.n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("fit_pca: eigendecomposition failed");
    }
    const Eigen::VectorXd &values = eig.eigenvalues();
    const Eigen::Index d = values.size();
    const double largest = values[d - 1];
    size_t rank = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        rank += values[i] > 1e-10 * largest ? 1 : 0;
    }
    if (largest <= 0.0 || k > rank) {
        throw std::invalid_argument("fit_pca: k = " + std::to_string(k) + " exceeds the numerical rank " +
                                    std::to_string(rank) + " of the training data");
    }

    PcaModel m;
    m.mean.assign(mean.data(), mean.data() + mean.size());
    m.components = Matrix(k, kImagePixels);
    for (size_t c = 0; c < k; ++c) {
        const Eigen::Index col = d - 1 - static_cast<Eigen::Index>(c);
        Eigen::VectorXd v = eig.eigenvectors().col(col);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0.0) {
            v = -v;
        }
        std::copy(v.data(), v.data() + v.size(), m.components.row(c).begin());
        m.explained_variance.push_back(values[col]);
    }
    m.fit_rows = train.n;
    m.fit_digest = raw_digest(train);
    return m;
}

Matrix pca_transform(const PcaModel &model, const RawDataset &images) {
    Matrix out(images.n, model.k());
    std::vector<double> centered(kImagePixels);
    for (size_t r = 0; r < images.n; ++r) {
        for (size_t p = 0; p < kImagePixels; ++p) {
            centered[p] = images.images[r * kImagePixels + p] / kPixelScale - model.mean[p];
        }
        for (size_t c = 0; c < model.k(); ++c) {
            out(r, c) = dot(model.components.row(c), centered);
        }
    }
    return out;
}

PreparedDataset prepare(const RawDataset &raw, Task task, const PcaModel *pca, bool normalize) {
    PreparedDataset ds;
    ds.labels = binarize(raw, task);
    if (pca != nullptr) {
        ds.features = pca_transform(*pca, raw);
    } else {
        ds.features = Matrix(raw.n, kImagePixels);
        for (size_t i = 0; i < raw.images.size(); ++i) {
            ds.features.data()[i] = raw.images[i] / kPixelScale;
        }
    }
    for (size_t r = 0; r < raw.n; ++r) {
        auto row = ds.features.row(r);
        const double norm = norm2(row);
        if (norm == 0.0) {
            throw std::invalid_argument("prepare: feature row " + std::to_string(r) + " of the " +
                                        split_name(raw.split) + " split is all zero");
        }
        ds.norms.push_back(norm);
        if (normalize) {
            for (double &v : row) {
                v /= norm;
            }
        }
    }
    const std::string tag = task_name(task) + "|" + split_name(raw.split) + "|k=" +
                            std::to_string(pca != nullptr ? pca->k() : 0) + "|norm=" + (normalize ? "1" : "0") +
                            "|pca=" + hex64(pca != nullptr ? pca->fit_digest : 0) + "|raw=" + hex64(raw_digest(raw));
    ds.provenance = hex64(fnv1a(tag.data(), tag.size()));
    return ds;
}

PreparedSplits prepare_splits(const MedmnistArchive &archive, Task task, size_t k, bool normalize) {
    PreparedSplits out;
    if (k > 0) {
        out.pca = fit_pca(archive.train, k);
    }
    const PcaModel *model = out.pca ? &*out.pca : nullptr;
    out.train = prepare(archive.train, task, model, normalize);
    out.test = prepare(archive.test, task, model, normalize);
    return out;
}

PreparedDataset subsample_balanced(const PreparedDataset &ds, size_t per_class, uint64_t seed) {
    if (per_class == 0) {
        throw std::invalid_argument("subsample_balanced: per_class must be positive");
    }
    std::vector<size_t> keep;
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<size_t> idx;
        for (size_t i = 0; i < ds.size(); ++i) {
            if (ds.labels[i] == cls) {
                idx.push_back(i);
            }
        }
        if (idx.size() < per_class) {
            throw std::invalid_argument("subsample_balanced: class " + std::to_string(cls) + " has only " +
                                        std::to_string(idx.size()) + " samples, " + std::to_string(per_class) +
                                        " requested");
        }
        Rng rng(derive_seed(seed, {static_cast<uint64_t>(cls)}));
        rng.shuffle(std::span<size_t>(idx));
        keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(per_class));
    }
    std::sort(keep.begin(), keep.end());
    PreparedDataset out;
    out.features = Matrix(keep.size(), ds.features.cols());
    for (size_t r = 0; r < keep.size(); ++r) {
        auto src = ds.features.row(keep[r]);
        std::copy(src.begin(), src.end(), out.features.row(r).begin());
        out.norms.push_back(ds.norms[keep[r]]);
        out.labels.push_back(ds.labels[keep[r]]);
    }
    const std::string tag = ds.provenance + "|balanced=" + std::to_string(per_class) + "|seed=" + std::to_string(seed);
    out.provenance = hex64(fnv1a(tag.data(), tag.size()));
    return out;
}

MedmnistArchive synthetic_archive(size_t n_train, size_t n_test, Task task, uint64_t seed) {
    const int n_labels = task == Task::Pneumonia ? 2 : 5;
    auto make = [&](SplitName split, size_t n, uint64_t stream) {
        Rng rng(derive_seed(seed, {stream}));
        RawDataset raw{split, n, std::vector<uint8_t>(n * kImagePixels), std::vector<uint8_t>(n)};
        for (size_t r = 0; r < n; ++r) {
            const int label = static_cast<int>(rng.below(static_cast<uint64_t>(n_labels)));
            raw.labels[r] = static_cast<uint8_t>(label);
            const int cls = label == 0 ? 0 : 1;
            // Jittered centres overlap so the classes are not separable.
            const double cy = (cls == 0 ? 12.0 : 16.0) + rng.uniform(-5.0, 5.0);
            const double cx = 8.0 + 2.5 * label + rng.uniform(-4.0, 4.0);
            const double amp = 60.0 + 140.0 * rng.uniform();
            for (size_t y = 0; y < kImageSide; ++y) {
                for (size_t x = 0; x < kImageSide; ++x) {
                    const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
                    const double v = 40.0 * rng.uniform() + amp * std::exp(-d2 / 30.0) + 30.0;
                    raw.images[r * kImagePixels + y * kImageSide + x] =
                        static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
                }
            }
        }
        return raw;
    };
    return {make(SplitName::Train, n_train, 1), make(SplitName::Test, n_test, 2), std::nullopt};
}

}  // namespace uqnn
