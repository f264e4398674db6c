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
 * MedMNIST ingestion and preprocessing: archive reading (NPZ or the CSV
 * layout below), label binarization, PCA fitted on the training split,
 * per-sample normalization and balanced subsampling.
 *
 * CSV layout: a directory holding train.csv, test.csv and optionally
 * val.csv. Each row is `label,p0,...,p783` with integer values in 0..255.
 * An optional header row is detected by a non-numeric first field.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uqnn/labeled.hpp"
#include "uqnn/linalg.hpp"

namespace uqnn {

constexpr size_t kImageSide = 28;
constexpr size_t kImagePixels = kImageSide * kImageSide;
/// Pixels are divided by this before PCA.
constexpr double kPixelScale = 255.0;

enum class SplitName { Train, Test, Val };
std::string split_name(SplitName s);

struct RawDataset {
    SplitName split = SplitName::Train;
    size_t n = 0;
    std::vector<uint8_t> images;  ///< n x 784, row-major
    std::vector<uint8_t> labels;  ///< n

    bool operator==(const RawDataset &) const = default;
};

struct MedmnistArchive {
    RawDataset train;
    RawDataset test;
    std::optional<RawDataset> val;

    bool operator==(const MedmnistArchive &) const = default;
};

/// Reads an .npz archive, or a directory in the CSV layout.
MedmnistArchive read_medmnist(const std::filesystem::path &path);
void write_medmnist_npz(const std::filesystem::path &path, const MedmnistArchive &archive);
void write_medmnist_csv(const std::filesystem::path &dir, const MedmnistArchive &archive, bool header = true);

/// Converts between the two layouts; the direction follows the input
/// (file -> CSV directory, directory -> .npz file).
void convert_csv(const std::filesystem::path &in, const std::filesystem::path &out);

/// `<MEDMNIST_DIR>/<name>mnist.npz` or a `<name>mnist` CSV directory;
/// nullopt when neither exists or the variable is unset.
std::optional<std::filesystem::path> locate_dataset(const std::string &name);

enum class Task { Pneumonia, RetinaZeroVsRest };
Task task_for_dataset(const std::string &name);
std::string task_name(Task t);

/// Pneumonia passes 0/1 through; retina maps 0 -> 0 and 1..4 -> 1.
std::vector<int> binarize(const RawDataset &raw, Task task);

struct PcaModel {
    std::vector<double> mean;           ///< 784
    Matrix components;                  ///< k x 784, orthonormal rows
    std::vector<double> explained_variance;
    size_t fit_rows = 0;
    uint64_t fit_digest = 0;            ///< digest of the images the model was fitted on

    size_t k() const { return components.rows(); }
};

/// Top-k covariance eigenvectors of images / 255. Each component's entry of
/// largest magnitude is made positive. Throws if k exceeds the numerical
/// rank (eigenvalues above 1e-10 of the largest).
PcaModel fit_pca(const RawDataset &train, size_t k);
Matrix pca_transform(const PcaModel &model, const RawDataset &images);

struct PreparedDataset {
    Matrix features;
    std::vector<double> norms;
    std::vector<int> labels;
    std::string provenance;

    size_t size() const { return labels.size(); }
    LabeledSet labeled() const { return {features, labels}; }
};

/// Binarize, project (pca == nullptr keeps the 784 scaled pixels) and
/// optionally scale each row to unit norm. Norms are always recorded; an
/// all-zero row is rejected.
PreparedDataset prepare(const RawDataset &raw, Task task, const PcaModel *pca, bool normalize);

struct PreparedSplits {
    PreparedDataset train;
    PreparedDataset test;
    std::optional<PcaModel> pca;
};

/// PCA fitted on the training split only (k == 0: raw pixels).
PreparedSplits prepare_splits(const MedmnistArchive &archive, Task task, size_t k, bool normalize);

/// Seeded draw of `per_class` rows from each class, without replacement,
/// returned in original order.
PreparedDataset subsample_balanced(const PreparedDataset &ds, size_t per_class, uint64_t seed);

/// FNV-1a 64 over bytes.
uint64_t fnv1a(const void *data, size_t len, uint64_t h = 0xcbf29ce484222325ull);
std::string hex64(uint64_t v);

/// Stand-in images: each class brightens a jittered blob whose centre
/// depends on the class, with overlap between classes. Labels follow the
/// task's label set (retina uses 0..4).
MedmnistArchive synthetic_archive(size_t n_train, size_t n_test, Task task, uint64_t seed);

}  // namespace uqnn
