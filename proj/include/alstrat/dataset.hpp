// Copyright 2026 The alstrat Authors. All rights reserved.
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

#ifndef ALSTRAT_DATASET_HPP_
#define ALSTRAT_DATASET_HPP_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace alstrat {

// Malformed or unusable input data. Messages carry file/row/column context.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary classification data: one row per point, labels in {0, 1}.
struct Dataset {
  std::string name;
  Eigen::MatrixXd features;
  std::vector<int> labels;
  // Raw label strings for class 0 and class 1 (sorted-order mapping).
  std::array<std::string, 2> label_values{"0", "1"};

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dims() const { return features.cols(); }
  std::array<int, 2> ClassCounts() const;
  // Throws DataError unless n >= 2, d >= 1, both classes are present and all
  // features are finite.
  void Validate() const;
};

struct SplitSpec {
  double test_fraction = 0.5;
  std::uint64_t seed = 0;
};

// Sorted row indices of the pool (D) and test (D') parts.
struct SplitIndices {
  std::vector<int> pool;
  std::vector<int> test;
};

Dataset LoadCsv(const std::string& path, const std::string& label_column = "label",
                std::string name = "");
// Writes features as f0..f{d-1} followed by a "label" column of 0/1.
void WriteCsv(const Dataset& ds, const std::string& path);

// Standardizes each column (population variance), drops constant columns and
// appends a constant 1.0 column if any row would otherwise be all zero.
Dataset Normalize(const Dataset& ds);

// Stratified, seeded partition. Throws DataError when a class has fewer than
// two points or n * test_fraction < 2.
SplitIndices StratifiedSplit(const Dataset& ds, const SplitSpec& spec);
std::pair<Dataset, Dataset> Split(const Dataset& ds, const SplitSpec& spec);
Dataset Subset(const Dataset& ds, const std::vector<int>& rows);

enum class SyntheticKind { kTwoGaussians, kXorBlobs, kRing };

SyntheticKind ParseSyntheticKind(const std::string& kind);
std::string SyntheticKindName(SyntheticKind kind);

// two_gaussians: class means at -/+ separation/2 along a random unit vector,
// unit isotropic noise. xor_blobs: four unit blobs at (+-s/2, +-s/2) in the
// first two dims, label = quadrant parity. ring: class 0 ~ N(0, I), class 1
// is a shell of radius `separation` plus unit noise.
Dataset MakeSynthetic(SyntheticKind kind, int n, int d, double separation,
                      std::uint64_t seed, std::string name = "");

struct CollectionEntry {
  std::string name;
  std::string file;
  std::string label_column = "label";
};

// Reads DIR/manifest.json ({version, datasets: [{name, file, label_column}]})
// or, without a manifest, every *.csv in DIR with label column "label".
std::vector<CollectionEntry> ReadManifest(const std::string& dir);
// Loads and normalizes every dataset of the collection, in manifest order.
std::vector<Dataset> LoadCollection(const std::string& dir);
// Writes one CSV per dataset plus manifest.json.
void WriteCollection(const std::string& dir, const std::vector<Dataset>& datasets);

}  // namespace alstrat

#endif  // ALSTRAT_DATASET_HPP_
