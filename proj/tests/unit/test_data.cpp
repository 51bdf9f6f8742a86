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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <zlib.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "oracles.hpp"
#include "qsearch/data.hpp"
#include "qsearch/errors.hpp"

using namespace qsearch;
using namespace qsearch::data;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "qsearch_test_data";
  fs::create_directories(dir);
  return dir / name;
}

Dataset matrix(std::size_t rows, std::size_t cols, const std::vector<double>& values, std::vector<int> labels = {}) {
  Dataset d;
  d.n_features = cols;
  d.features = values;
  if (labels.empty()) labels.assign(rows, 0);
  d.labels = std::move(labels);
  d.n_classes = 1 + *std::max_element(d.labels.begin(), d.labels.end());
  return d;
}

Dataset random_dataset(Rng& rng, std::size_t rows, std::size_t cols, int classes) {
  Dataset d;
  d.n_features = cols;
  d.features = oracle::random_vector(rng, rows * cols, -3.0, 3.0);
  for (std::size_t i = 0; i < rows; ++i) d.labels.push_back(static_cast<int>(i % static_cast<std::size_t>(classes)));
  d.n_classes = classes;
  return d;
}

void gzip_file(const fs::path& src, const fs::path& dst) {
  std::ifstream in(src, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  gzFile out = gzopen(dst.string().c_str(), "wb");
  REQUIRE(out != nullptr);
  gzwrite(out, bytes.data(), static_cast<unsigned>(bytes.size()));
  gzclose(out);
}

}  // namespace

TEST_CASE("IDX round trip, plain and gzip") {
  Rng rng(1);
  Dataset d;
  d.n_features = 6;
  for (int i = 0; i < 7; ++i) {
    for (int k = 0; k < 6; ++k) d.features.push_back(static_cast<double>(rng.below(256)));
    d.labels.push_back(static_cast<int>(rng.below(10)));
  }
  d.n_classes = 10;
  const auto img = scratch("img.idx"), lab = scratch("lab.idx");
  write_idx(d, 2, 3, img, lab);
  const auto back = load_idx(img, lab);
  CHECK(back.features == d.features);
  CHECK(back.labels == d.labels);
  CHECK(back.n_features == 6);

  gzip_file(img, scratch("img.idx.gz"));
  gzip_file(lab, scratch("lab.idx.gz"));
  const auto gz = load_idx(scratch("img.idx.gz"), scratch("lab.idx.gz"));
  CHECK(gz.features == d.features);
  CHECK(gz.labels == d.labels);
}

TEST_CASE("IDX header checks are big-endian") {
  const auto img = scratch("bad.idx"), lab = scratch("bad_lab.idx");
  {
    std::ofstream out(img, std::ios::binary);
    const unsigned char header[] = {0x00, 0x00, 0x08, 0x01, 0, 0, 0, 1};  // label magic in the image slot
    out.write(reinterpret_cast<const char*>(header), sizeof header);
  }
  {
    std::ofstream out(lab, std::ios::binary);
    const unsigned char header[] = {0x00, 0x00, 0x08, 0x01, 0, 0, 0, 1, 3};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
  }
  CHECK_THROWS_AS(load_idx(img, lab), DataError);
  {
    std::ofstream out(img, std::ios::binary);
    const unsigned char header[] = {0x00, 0x00, 0x08, 0x03, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 9};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
  }
  CHECK_THROWS_AS(load_idx(img, lab), DataError);  // truncated pixels
  CHECK_THROWS_AS(load_idx(scratch("missing.idx"), lab), IoError);
}

TEST_CASE("Iris CSV") {
  const auto path = scratch("iris_small.csv");
  {
    std::ofstream out(path);
    out << "sepal_length,sepal_width,petal_length,petal_width,species\n"
        << "5.1,3.5,1.4,0.2,Iris-setosa\n"
        << "7.0,3.2,4.7,1.4,Iris-versicolor\n"
        << "6.3,3.3,6.0,2.5,Iris-virginica\n"
        << "4.9,3.0,1.4,0.2,Iris-setosa\n";
  }
  const auto d = load_iris_csv(path);
  CHECK(d.size() == 4);
  CHECK(d.n_features == 4);
  CHECK(d.labels == std::vector<int>{0, 1, 2, 0});
  CHECK(d.row(1)[2] == doctest::Approx(4.7));
  {
    std::ofstream out(path, std::ios::app);
    out << "1,2,3,4,Iris-unknown\n";
  }
  CHECK_THROWS_AS(load_iris_csv(path), DataError);
}

TEST_CASE("canonical Iris file") {
  const fs::path path = fs::path(QSEARCH_DATA_DIR) / "iris.csv";
  if (!fs::exists(path)) return;
  const auto d = load_iris_csv(path);
  CHECK(d.size() == 150);
  CHECK(d.n_features == 4);
  CHECK(d.class_counts() == std::vector<std::size_t>{50, 50, 50});
}

TEST_CASE("min-max scaling") {
  const auto d = matrix(3, 2, {0, 7, 5, 7, 10, 7});
  const auto s = minmax_scale(d);
  CHECK(s.features == std::vector<double>{0, 0, 0.5, 0, 1, 0});
  CHECK(minmax_scale(s).features == s.features);
}

TEST_CASE("PCA matches a Jacobi eigensolver") {
  Rng rng(2);
  const auto d = random_dataset(rng, 50, 20, 2);
  const auto model = pca_fit(d, 8);

  std::vector<double> mean(20, 0.0), cov(400, 0.0);
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t k = 0; k < 20; ++k) mean[k] += d.row(i)[k] / 50.0;
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t a = 0; a < 20; ++a)
      for (std::size_t b = 0; b < 20; ++b) cov[a * 20 + b] += (d.row(i)[a] - mean[a]) * (d.row(i)[b] - mean[b]) / 49.0;
  std::vector<double> vals, vecs;
  oracle::jacobi_eigen(cov, 20, vals, vecs);
  std::vector<std::size_t> order(20);
  for (std::size_t i = 0; i < 20; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] > vals[b]; });

  const auto projected = pca_transform(model, d);
  for (std::size_t k = 0; k < 8; ++k) {
    const std::size_t col = order[k];
    CHECK(model.explained_variance[k] == doctest::Approx(vals[col]).epsilon(1e-9));
    // Projection of every sample onto the oracle eigenvector, compared up to sign.
    std::vector<double> ref(50, 0.0);
    for (std::size_t i = 0; i < 50; ++i)
      for (std::size_t a = 0; a < 20; ++a) ref[i] += (d.row(i)[a] - mean[a]) * vecs[a * 20 + col];
    const double sign = ref[0] * projected.row(0)[k] >= 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < 50; ++i) CHECK(std::abs(projected.row(i)[k] - sign * ref[i]) < 1e-6);
  }
}

TEST_CASE("PCA structure") {
  Rng rng(3);
  const auto d = random_dataset(rng, 40, 6, 2);
  const auto full = pca_fit(d, 6);
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      double dot = 0;
      for (std::size_t k = 0; k < 6; ++k) dot += full.component(a)[k] * full.component(b)[k];
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-10);
    }
    if (a > 0) CHECK(full.explained_variance[a] <= full.explained_variance[a - 1] + 1e-12);
    double largest = 0;
    for (double v : full.component(a)) largest = std::abs(v) > std::abs(largest) ? v : largest;
    CHECK(largest > 0);
  }
  // Reconstruction from all components recovers the input.
  const auto z = pca_transform(full, d);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t k = 0; k < 6; ++k) {
      double x = full.mean[k];
      for (std::size_t c = 0; c < 6; ++c) x += z.row(i)[c] * full.component(c)[k];
      CHECK(std::abs(x - d.row(i)[k]) < 1e-8);
    }
  }
  const auto head = full.truncated(2);
  CHECK(head.n_components == 2);
  CHECK(pca_transform(head, d).row(3)[1] == doctest::Approx(z.row(3)[1]));
  CHECK_THROWS_AS(pca_fit(d, 7), ConfigError);

  const auto axis = matrix(3, 2, {-1, 0, 0, 0, 1, 0});
  const auto m = pca_fit(axis, 1);
  CHECK(m.component(0)[0] == doctest::Approx(1.0));
  CHECK(m.component(0)[1] == doctest::Approx(0.0));
}

TEST_CASE("standardization and angle wrap") {
  const auto d = matrix(2, 2, {1, 4, 5, 4});
  const auto stats = Standardizer::fit(d);
  CHECK(stats.mean[0] == 3.0);
  CHECK(stats.stddev[0] == 2.0);
  const auto s = stats.transform(d);
  CHECK(s.row(1)[0] == 1.0);
  CHECK(s.row(0)[1] == 0.0);  // zero-variance feature

  Rng rng(4);
  const auto r = random_dataset(rng, 100, 3, 2);
  const auto rs = Standardizer::fit(r);
  const auto wrapped = encode_for_embedding(r, Embedding::AngleY, rs);
  for (double x : wrapped.features) {
    CHECK(x >= 0.0);
    CHECK(x < 2 * std::numbers::pi);
  }
  CHECK(encode_for_embedding(r, Embedding::Amplitude, rs).features == r.features);
}

TEST_CASE("stratified split") {
  const fs::path path = fs::path(QSEARCH_DATA_DIR) / "iris.csv";
  if (fs::exists(path)) {
    const auto iris = load_iris_csv(path);
    const auto [train, val] = split(iris, 0.2, 7);
    CHECK(train.size() == 120);
    CHECK(val.size() == 30);
    CHECK(val.class_counts() == std::vector<std::size_t>{10, 10, 10});
  }
  Rng rng(5);
  const auto d = random_dataset(rng, 103, 2, 4);
  const auto [a_train, a_val] = split(d, 0.3, 11);
  const auto [b_train, b_val] = split(d, 0.3, 11);
  CHECK(a_val.features == b_val.features);
  CHECK(a_train.labels == b_train.labels);
  CHECK(a_val.size() == 31);
  const auto counts = d.class_counts(), val_counts = a_val.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) CHECK(std::abs(0.3 * counts[c] - val_counts[c]) <= 1.0);

  auto lonely = matrix(3, 1, {1, 2, 3}, {0, 0, 1});
  CHECK_THROWS_AS(split(lonely, 0.5, 1), DataError);
  CHECK_THROWS_AS(split(d, 1.0, 1), ConfigError);
}

TEST_CASE("statistics are fitted on the training split only") {
  Rng rng(6);
  const auto train = random_dataset(rng, 30, 3, 2);
  auto val = random_dataset(rng, 10, 3, 2);
  const auto scaler = MinMaxScaler::fit(train);
  const auto first = scaler.transform(val);
  for (auto& x : val.features) x *= 5.0;
  const auto refit = MinMaxScaler::fit(val).transform(val);
  const auto again = scaler.transform(val);
  CHECK(again.features != refit.features);
  for (std::size_t i = 0; i < first.features.size(); ++i) {
    const double raw = val.features[i] / 5.0;
    const std::size_t k = i % 3;
    CHECK(first.features[i] == doctest::Approx((raw - scaler.min[k]) / (scaler.max[k] - scaler.min[k])));
  }
}

TEST_CASE("stratified subset") {
  Rng rng(7);
  const auto d = random_dataset(rng, 1000, 2, 10);
  const auto s = stratified_subset(d, 250, 3);
  CHECK(s.size() == 250);
  for (auto c : s.class_counts()) CHECK(c == 25);
  CHECK(stratified_subset(d, 250, 3).features == s.features);
  CHECK_THROWS_AS(stratified_subset(d, 0, 3), ConfigError);
}
