// Copyright 2026 The qsearch Authors.
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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsearch/qsim.hpp"

namespace qsearch::data {

// Sample-major feature matrix with integer class labels.
struct Dataset {
  std::string name;
  std::size_t n_features = 0;
  std::vector<double> features;  // size() * n_features, row-major
  std::vector<int> labels;
  int n_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * n_features, n_features}; }
  std::span<double> row(std::size_t i) { return {features.data() + i * n_features, n_features}; }

  /// Rows in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Same labels, new feature matrix.
  Dataset with_features(std::vector<double> new_features, std::size_t width) const;
  std::vector<std::size_t> class_counts() const;

  void validate() const;
};

/// Big-endian IDX image/label pair (magics 0x803 / 0x801). Gzip-compressed
/// files are detected by their header and inflated transparently.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

/// Uncompressed IDX writer; images are stored as unsigned bytes (values are
/// rounded and clamped to [0, 255]).
void write_idx(const Dataset& d, std::size_t rows, std::size_t cols, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path);

/// Four numeric columns plus a class string; an optional header row is
/// skipped. Classes are numbered in first-seen order, at most three.
Dataset load_iris_csv(const std::filesystem::path& path);

struct MinMaxScaler {
  std::vector<double> min;
  std::vector<double> max;

  static MinMaxScaler fit(const Dataset& d);
  Dataset transform(const Dataset& d) const;
};

/// Fits on `d` itself and rescales each feature into [0,1]. Constant features map to 0.
Dataset minmax_scale(const Dataset& d);

struct PcaModel {
  std::vector<double> mean;
  std::vector<double> components;  // n_components x dim, row-major, orthonormal rows
  std::vector<double> explained_variance;
  std::size_t n_components = 0;
  std::size_t dim = 0;

  std::span<const double> component(std::size_t k) const { return {components.data() + k * dim, dim}; }
  /// The leading k components of this model.
  PcaModel truncated(std::size_t k) const;
};

PcaModel pca_fit(const Dataset& train, std::size_t n_components);
Dataset pca_transform(const PcaModel& model, const Dataset& d);

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  static Standardizer fit(const Dataset& d);
  /// Zero-variance features map to 0.
  Dataset transform(const Dataset& d) const;
};

/// Angle embeddings: standardize with `stats`, then wrap into [0, 2pi).
/// Amplitude: returned unchanged (normalization happens at embedding time).
Dataset encode_for_embedding(const Dataset& d, qsim::Embedding embedding, const Standardizer& stats);

/// Seeded stratified split. Per-class validation counts follow a
/// largest-remainder allocation of round(size * val_fraction).
std::pair<Dataset, Dataset> split(const Dataset& d, double val_fraction, std::uint64_t seed);

/// Stratified sample of exactly `count` rows.
Dataset stratified_subset(const Dataset& d, std::size_t count, std::uint64_t seed);

}  // namespace qsearch::data
