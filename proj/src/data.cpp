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

#include "qsearch/data.hpp"

#include <zlib.h>

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qsearch/errors.hpp"
#include "qsearch/rng.hpp"

namespace qsearch::data {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

// Reads plain or gzip files alike.
class ByteReader {
 public:
  explicit ByteReader(const std::filesystem::path& path) : path_(path.string()) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path_);
    file_ = gzopen(path_.c_str(), "rb");
    if (file_ == nullptr) throw IoError("cannot open " + path_);
  }
  ~ByteReader() { gzclose(file_); }
  ByteReader(const ByteReader&) = delete;
  ByteReader& operator=(const ByteReader&) = delete;

  std::uint32_t read_be32(const char* field) {
    unsigned char b[4];
    read_exact(b, 4, field);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
  }

  void read_exact(unsigned char* dst, std::size_t n, const char* field) {
    std::size_t done = 0;
    while (done < n) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(n - done, 1U << 30));
      const int got = gzread(file_, dst + done, chunk);
      if (got <= 0) throw DataError(path_ + ": truncated while reading " + field);
      done += static_cast<std::size_t>(got);
    }
  }

 private:
  std::string path_;
  gzFile file_ = nullptr;
};

void put_be32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                     static_cast<char>(v)};
  out.write(b, 4);
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

// Per-class allocation of `total` picks proportional to class size; the
// shortfall after flooring goes to the largest fractional parts.
std::vector<std::size_t> allocate(const std::vector<std::size_t>& counts, std::size_t total) {
  const auto n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::vector<std::size_t> alloc(counts.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double exact = static_cast<double>(counts[c]) * static_cast<double>(total) / static_cast<double>(n);
    alloc[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += alloc[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i, ++assigned) ++alloc[remainders[i].second];
  return alloc;
}

// Shuffled per-class index lists.
std::vector<std::vector<std::size_t>> shuffled_by_class(const Dataset& d, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(d.n_classes));
  for (std::size_t i = 0; i < d.size(); ++i) by_class[static_cast<std::size_t>(d.labels[i])].push_back(i);
  Rng rng(seed);
  for (auto& idx : by_class) {
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  }
  return by_class;
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.name = name;
  out.n_features = n_features;
  out.n_classes = n_classes;
  out.features.reserve(indices.size() * n_features);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

Dataset Dataset::with_features(std::vector<double> new_features, std::size_t width) const {
  Dataset out;
  out.name = name;
  out.n_features = width;
  out.features = std::move(new_features);
  out.labels = labels;
  out.n_classes = n_classes;
  out.validate();
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

void Dataset::validate() const {
  if (features.size() != labels.size() * n_features) throw DataError("feature matrix does not match label count");
  for (int l : labels) {
    if (l < 0 || l >= n_classes) throw DataError("label " + std::to_string(l) + " outside class range");
  }
}

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  ByteReader images(images_path);
  if (const auto magic = images.read_be32("image magic"); magic != kImageMagic) {
    throw DataError(images_path.string() + ": bad image magic " + std::to_string(magic));
  }
  const std::uint32_t count = images.read_be32("image count");
  const std::uint32_t rows = images.read_be32("row count");
  const std::uint32_t cols = images.read_be32("column count");

  ByteReader labels(labels_path);
  if (const auto magic = labels.read_be32("label magic"); magic != kLabelMagic) {
    throw DataError(labels_path.string() + ": bad label magic " + std::to_string(magic));
  }
  const std::uint32_t label_count = labels.read_be32("label count");
  if (label_count != count) {
    throw DataError("image count " + std::to_string(count) + " does not match label count " +
                    std::to_string(label_count));
  }

  Dataset d;
  d.name = images_path.filename().string();
  d.n_features = std::size_t{rows} * cols;
  std::vector<unsigned char> pixels(std::size_t{count} * d.n_features);
  images.read_exact(pixels.data(), pixels.size(), "pixel data");
  std::vector<unsigned char> raw_labels(count);
  labels.read_exact(raw_labels.data(), raw_labels.size(), "label data");

  d.features.assign(pixels.begin(), pixels.end());
  d.labels.assign(raw_labels.begin(), raw_labels.end());
  d.n_classes = d.labels.empty() ? 0 : *std::max_element(d.labels.begin(), d.labels.end()) + 1;
  return d;
}

void write_idx(const Dataset& d, std::size_t rows, std::size_t cols, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path) {
  if (rows * cols != d.n_features) throw StructuralError("rows * cols must equal the feature width");
  std::ofstream img(images_path, std::ios::binary);
  std::ofstream lab(labels_path, std::ios::binary);
  if (!img || !lab) throw IoError("cannot open IDX output files");
  put_be32(img, kImageMagic);
  put_be32(img, static_cast<std::uint32_t>(d.size()));
  put_be32(img, static_cast<std::uint32_t>(rows));
  put_be32(img, static_cast<std::uint32_t>(cols));
  for (double v : d.features) img.put(static_cast<char>(static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L))));
  put_be32(lab, kLabelMagic);
  put_be32(lab, static_cast<std::uint32_t>(d.size()));
  for (int l : d.labels) lab.put(static_cast<char>(static_cast<unsigned char>(l)));
  if (!img || !lab) throw IoError("failed writing IDX files");
}

Dataset load_iris_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Dataset d;
  d.name = "iris";
  d.n_features = 4;
  std::map<std::string, int> classes;
  std::string line;
  std::size_t line_no = 0;
  bool first_data_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(trim(cell));
    if (cells.size() != 5) {
      throw DataError(path.string() + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " columns, expected 5");
    }
    double values[4];
    bool numeric = true;
    for (int j = 0; j < 4; ++j) numeric = numeric && parse_double(cells[j], values[j]);
    if (!numeric) {
      if (first_data_row) {  // header
        first_data_row = false;
        continue;
      }
      throw DataError(path.string() + ": non-numeric feature cell in row " + std::to_string(line_no));
    }
    first_data_row = false;
    auto [it, inserted] = classes.try_emplace(cells[4], static_cast<int>(classes.size()));
    if (inserted && classes.size() > 3) {
      throw DataError(path.string() + ": unexpected fourth class '" + cells[4] + "' in row " +
                      std::to_string(line_no));
    }
    d.features.insert(d.features.end(), values, values + 4);
    d.labels.push_back(it->second);
  }
  d.n_classes = static_cast<int>(classes.size());
  if (d.labels.empty()) throw DataError(path.string() + ": no samples");
  return d;
}

MinMaxScaler MinMaxScaler::fit(const Dataset& d) {
  MinMaxScaler s;
  s.min.assign(d.n_features, 0.0);
  s.max.assign(d.n_features, 0.0);
  for (std::size_t j = 0; j < d.n_features; ++j) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < d.size(); ++i) {
      lo = std::min(lo, d.row(i)[j]);
      hi = std::max(hi, d.row(i)[j]);
    }
    s.min[j] = d.size() ? lo : 0.0;
    s.max[j] = d.size() ? hi : 0.0;
  }
  return s;
}

Dataset MinMaxScaler::transform(const Dataset& d) const {
  if (d.n_features != min.size()) throw StructuralError("min-max scaler width mismatch");
  Dataset out = d;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double range = max[j] - min[j];
      r[j] = range > 0 ? (r[j] - min[j]) / range : 0.0;
    }
  }
  return out;
}

Dataset minmax_scale(const Dataset& d) { return MinMaxScaler::fit(d).transform(d); }

PcaModel PcaModel::truncated(std::size_t k) const {
  if (k > n_components) throw ConfigError("cannot truncate PCA to more components than fitted");
  PcaModel out;
  out.mean = mean;
  out.dim = dim;
  out.n_components = k;
  out.components.assign(components.begin(), components.begin() + static_cast<std::ptrdiff_t>(k * dim));
  out.explained_variance.assign(explained_variance.begin(), explained_variance.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

PcaModel pca_fit(const Dataset& train, std::size_t n_components) {
  const std::size_t dim = train.n_features;
  if (n_components == 0 || n_components > dim) {
    throw ConfigError("PCA components " + std::to_string(n_components) + " not in [1, " + std::to_string(dim) + "]");
  }
  if (train.size() < 2) throw DataError("PCA needs at least two samples");
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMatrix> x(train.features.data(), static_cast<Eigen::Index>(train.size()),
                                static_cast<Eigen::Index>(dim));
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(train.size() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");

  PcaModel model;
  model.dim = dim;
  model.n_components = n_components;
  model.mean.assign(mean.data(), mean.data() + dim);
  const auto& vecs = solver.eigenvectors();
  const auto& vals = solver.eigenvalues();  // ascending
  for (std::size_t k = 0; k < n_components; ++k) {
    const auto col = static_cast<Eigen::Index>(dim - 1 - k);
    Eigen::VectorXd v = vecs.col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.components.insert(model.components.end(), v.data(), v.data() + dim);
    model.explained_variance.push_back(std::max(0.0, vals(col)));
  }
  return model;
}

Dataset pca_transform(const PcaModel& model, const Dataset& d) {
  if (d.n_features != model.dim) throw StructuralError("PCA input width mismatch");
  std::vector<double> out(d.size() * model.n_components);
  std::vector<double> centered(model.dim);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = d.row(i);
    for (std::size_t j = 0; j < model.dim; ++j) centered[j] = r[j] - model.mean[j];
    for (std::size_t k = 0; k < model.n_components; ++k) {
      const auto c = model.component(k);
      out[i * model.n_components + k] = std::inner_product(c.begin(), c.end(), centered.begin(), 0.0);
    }
  }
  return d.with_features(std::move(out), model.n_components);
}

Standardizer Standardizer::fit(const Dataset& d) {
  Standardizer s;
  s.mean.assign(d.n_features, 0.0);
  s.stddev.assign(d.n_features, 0.0);
  if (d.size() == 0) return s;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.n_features; ++j) s.mean[j] += d.row(i)[j];
  }
  for (auto& m : s.mean) m /= static_cast<double>(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.n_features; ++j) {
      const double dev = d.row(i)[j] - s.mean[j];
      s.stddev[j] += dev * dev;
    }
  }
  for (auto& v : s.stddev) v = std::sqrt(v / static_cast<double>(d.size()));
  return s;
}

Dataset Standardizer::transform(const Dataset& d) const {
  if (d.n_features != mean.size()) throw StructuralError("standardizer width mismatch");
  Dataset out = d;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = stddev[j] > 0 ? (r[j] - mean[j]) / stddev[j] : 0.0;
  }
  return out;
}

Dataset encode_for_embedding(const Dataset& d, qsim::Embedding embedding, const Standardizer& stats) {
  if (embedding == qsim::Embedding::Amplitude) return d;
  Dataset out = stats.transform(d);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (auto& v : out.features) {
    double w = std::fmod(v, kTwoPi);
    if (w < 0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;  // fmod of a tiny negative can round up to 2pi
    v = w;
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("validation fraction must lie in (0, 1)");
  const auto counts = d.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0 && counts[c] < 2) {
      throw DataError("class " + std::to_string(c) + " has fewer than 2 samples; cannot stratify");
    }
  }
  const auto total = static_cast<std::size_t>(std::llround(static_cast<double>(d.size()) * val_fraction));
  const auto alloc = allocate(counts, total);
  const auto by_class = shuffled_by_class(d, seed);
  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    for (std::size_t i = 0; i < by_class[c].size(); ++i) (i < alloc[c] ? val_idx : train_idx).push_back(by_class[c][i]);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  return {d.subset(train_idx), d.subset(val_idx)};
}

Dataset stratified_subset(const Dataset& d, std::size_t count, std::uint64_t seed) {
  if (count == 0 || count > d.size()) throw ConfigError("subset size must be in [1, dataset size]");
  const auto alloc = allocate(d.class_counts(), count);
  const auto by_class = shuffled_by_class(d, seed);
  std::vector<std::size_t> idx;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    idx.insert(idx.end(), by_class[c].begin(), by_class[c].begin() + static_cast<std::ptrdiff_t>(alloc[c]));
  }
  std::sort(idx.begin(), idx.end());
  return d.subset(idx);
}

}  // namespace qsearch::data
