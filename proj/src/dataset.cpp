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

#include "alstrat/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "alstrat/io.hpp"
#include "alstrat/rng.hpp"
#include <nlohmann/json.hpp>

namespace alstrat {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n\"");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n\"");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitCells(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(Trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool ParseReal(const std::string& s, double* out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno == ERANGE || end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

std::string Where(const std::string& path, std::size_t row, std::size_t col) {
  std::ostringstream ss;
  ss << path << ": row " << row << ", column " << col;
  return ss.str();
}

}  // namespace

std::array<int, 2> Dataset::ClassCounts() const {
  std::array<int, 2> counts{0, 0};
  for (int y : labels) ++counts[y == 0 ? 0 : 1];
  return counts;
}

void Dataset::Validate() const {
  if (static_cast<Eigen::Index>(labels.size()) != size()) {
    throw DataError(name + ": label count does not match row count");
  }
  if (size() < 2) throw DataError(name + ": need at least 2 points");
  if (dims() < 1) throw DataError(name + ": need at least 1 feature");
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError(name + ": labels must be 0 or 1");
  }
  const auto counts = ClassCounts();
  if (counts[0] == 0 || counts[1] == 0) {
    throw DataError(name + ": both classes must be present");
  }
  if (!features.allFinite()) throw DataError(name + ": non-finite feature value");
}

Dataset LoadCsv(const std::string& path, const std::string& label_column,
                std::string name) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": missing header row");
  const auto header = SplitCells(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw DataError(path + ": no label column '" + label_column + "'");
  }
  const std::size_t label_col = static_cast<std::size_t>(label_it - header.begin());
  const std::size_t d = header.size() - 1;

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (Trim(line).empty()) continue;
    const auto cells = SplitCells(line);
    if (cells.size() != header.size()) {
      std::ostringstream ss;
      ss << path << ": row " << row_no << " has " << cells.size()
         << " cells, expected " << header.size();
      throw DataError(ss.str());
    }
    std::vector<double> row;
    row.reserve(d);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_col) {
        if (cells[c].empty()) throw DataError(Where(path, row_no, c) + ": empty label");
        raw_labels.push_back(cells[c]);
        continue;
      }
      double v = 0.0;
      if (!ParseReal(cells[c], &v)) {
        throw DataError(Where(path, row_no, c) + ": non-numeric value '" +
                        cells[c] + "'");
      }
      if (!std::isfinite(v)) {
        throw DataError(Where(path, row_no, c) + ": NaN or infinite value");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }

  // Two distinct raw labels, mapped by sorted order (numeric if possible).
  std::vector<std::string> distinct(raw_labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw DataError(path + ": single-class data");
  if (distinct.size() > 2) throw DataError(path + ": more than two label values");
  double a = 0.0;
  double b = 0.0;
  if (ParseReal(distinct[0], &a) && ParseReal(distinct[1], &b) && b < a) {
    std::swap(distinct[0], distinct[1]);
  }

  Dataset ds;
  ds.name = name.empty() ? std::filesystem::path(path).stem().string() : std::move(name);
  ds.features.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) ds.features(r, c) = rows[r][c];
  }
  ds.labels.reserve(raw_labels.size());
  for (const auto& l : raw_labels) ds.labels.push_back(l == distinct[0] ? 0 : 1);
  ds.label_values = {distinct[0], distinct[1]};
  ds.Validate();
  return ds;
}

void WriteCsv(const Dataset& ds, const std::string& path) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index c = 0; c < ds.dims(); ++c) out << "f" << c << ",";
  out << "label\n";
  for (Eigen::Index r = 0; r < ds.size(); ++r) {
    for (Eigen::Index c = 0; c < ds.dims(); ++c) out << ds.features(r, c) << ",";
    out << ds.labels[r] << "\n";
  }
  WriteFileAtomic(path, out.str());
}

Dataset Normalize(const Dataset& ds) {
  const Eigen::Index n = ds.size();
  std::vector<Eigen::Index> kept;
  std::vector<double> means;
  std::vector<double> stds;
  for (Eigen::Index c = 0; c < ds.dims(); ++c) {
    const double mean = ds.features.col(c).mean();
    const double var = (ds.features.col(c).array() - mean).square().mean();
    const double scale = std::max(1.0, std::abs(mean));
    if (var <= 1e-24 * scale * scale) continue;
    kept.push_back(c);
    means.push_back(mean);
    stds.push_back(std::sqrt(var));
  }
  Dataset out;
  out.name = ds.name;
  out.labels = ds.labels;
  out.label_values = ds.label_values;
  out.features.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.features.col(k) = (ds.features.col(kept[k]).array() - means[k]) / stds[k];
  }
  bool zero_row = kept.empty();
  for (Eigen::Index r = 0; r < n && !zero_row; ++r) {
    zero_row = out.features.row(r).squaredNorm() == 0.0;
  }
  if (zero_row) {
    out.features.conservativeResize(n, out.features.cols() + 1);
    out.features.col(out.features.cols() - 1).setOnes();
  }
  return out;
}

SplitIndices StratifiedSplit(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw DataError("split: test_fraction must lie in (0, 1)");
  }
  if (static_cast<double>(ds.size()) * spec.test_fraction < 2.0) {
    throw DataError(ds.name + ": too few points for test_fraction");
  }
  Rng rng = MakeRng(spec.seed, 0x5b11);
  SplitIndices out;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(ds.labels.size()); ++i) {
      if (ds.labels[i] == cls) idx.push_back(i);
    }
    if (idx.size() < 2) {
      throw DataError(ds.name + ": class " + std::to_string(cls) +
                      " has fewer than 2 points to split");
    }
    Shuffle(idx.begin(), idx.end(), rng);
    auto n_test = static_cast<std::size_t>(
        std::lround(spec.test_fraction * static_cast<double>(idx.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
    out.test.insert(out.test.end(), idx.begin(), idx.begin() + n_test);
    out.pool.insert(out.pool.end(), idx.begin() + n_test, idx.end());
  }
  std::sort(out.pool.begin(), out.pool.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

Dataset Subset(const Dataset& ds, const std::vector<int>& rows) {
  Dataset out;
  out.name = ds.name;
  out.label_values = ds.label_values;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.dims());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(i) = ds.features.row(rows[i]);
    out.labels.push_back(ds.labels[rows[i]]);
  }
  return out;
}

std::pair<Dataset, Dataset> Split(const Dataset& ds, const SplitSpec& spec) {
  const auto idx = StratifiedSplit(ds, spec);
  return {Subset(ds, idx.pool), Subset(ds, idx.test)};
}

SyntheticKind ParseSyntheticKind(const std::string& kind) {
  if (kind == "two_gaussians") return SyntheticKind::kTwoGaussians;
  if (kind == "xor_blobs") return SyntheticKind::kXorBlobs;
  if (kind == "ring") return SyntheticKind::kRing;
  throw std::invalid_argument("unknown synthetic kind '" + kind + "'");
}

std::string SyntheticKindName(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kTwoGaussians: return "two_gaussians";
    case SyntheticKind::kXorBlobs: return "xor_blobs";
    case SyntheticKind::kRing: return "ring";
  }
  return "unknown";
}

Dataset MakeSynthetic(SyntheticKind kind, int n, int d, double separation,
                      std::uint64_t seed, std::string name) {
  if (n < 20) throw std::invalid_argument("MakeSynthetic: n must be >= 20");
  if (d < 1) throw std::invalid_argument("MakeSynthetic: d must be >= 1");
  if (kind == SyntheticKind::kXorBlobs && d < 2) {
    throw std::invalid_argument("MakeSynthetic: xor_blobs needs d >= 2");
  }
  if (!(separation >= 0.0)) {
    throw std::invalid_argument("MakeSynthetic: separation must be >= 0");
  }
  Rng rng = MakeRng(seed, 0x51);
  auto random_unit = [&] {
    Eigen::VectorXd u(d);
    do {
      for (int k = 0; k < d; ++k) u[k] = StandardNormal(rng);
    } while (u.norm() == 0.0);
    return Eigen::VectorXd(u / u.norm());
  };

  Dataset ds;
  ds.name = name.empty() ? SyntheticKindName(kind) : std::move(name);
  ds.features.resize(n, d);
  ds.labels.resize(n);
  const Eigen::VectorXd axis = random_unit();
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k) x[k] = StandardNormal(rng);
    int label = i % 2;
    switch (kind) {
      case SyntheticKind::kTwoGaussians:
        x += (label == 1 ? 0.5 : -0.5) * separation * axis;
        break;
      case SyntheticKind::kXorBlobs: {
        const int quadrant = i % 4;
        const double sx = (quadrant & 1) ? 1.0 : -1.0;
        const double sy = (quadrant & 2) ? 1.0 : -1.0;
        x[0] += 0.5 * separation * sx;
        x[1] += 0.5 * separation * sy;
        label = (sx > 0) != (sy > 0) ? 1 : 0;
        break;
      }
      case SyntheticKind::kRing:
        if (label == 1) x += separation * random_unit();
        break;
    }
    ds.features.row(i) = x.transpose();
    ds.labels[i] = label;
  }
  return ds;
}

std::vector<CollectionEntry> ReadManifest(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError(dir + ": not a directory");
  std::vector<CollectionEntry> entries;
  const fs::path manifest = fs::path(dir) / "manifest.json";
  if (fs::exists(manifest)) {
    const auto j = ReadJsonFile(manifest.string());
    for (const auto& e : j.at("datasets")) {
      CollectionEntry entry;
      entry.name = e.at("name").get<std::string>();
      entry.file = e.at("file").get<std::string>();
      entry.label_column = e.value("label_column", "label");
      entries.push_back(std::move(entry));
    }
    return entries;
  }
  for (const auto& f : fs::directory_iterator(dir)) {
    if (f.path().extension() == ".csv") {
      entries.push_back({f.path().stem().string(), f.path().filename().string(), "label"});
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  return entries;
}

std::vector<Dataset> LoadCollection(const std::string& dir) {
  std::vector<Dataset> out;
  for (const auto& e : ReadManifest(dir)) {
    const auto path = (std::filesystem::path(dir) / e.file).string();
    out.push_back(Normalize(LoadCsv(path, e.label_column, e.name)));
  }
  if (out.empty()) throw DataError(dir + ": collection contains no datasets");
  return out;
}

void WriteCollection(const std::string& dir, const std::vector<Dataset>& datasets) {
  std::filesystem::create_directories(dir);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& ds : datasets) {
    const std::string file = ds.name + ".csv";
    WriteCsv(ds, (std::filesystem::path(dir) / file).string());
    list.push_back({{"name", ds.name},
                    {"file", file},
                    {"label_column", "label"},
                    {"label_values", ds.label_values}});
  }
  WriteJsonFile((std::filesystem::path(dir) / "manifest.json").string(),
                {{"version", 1}, {"datasets", std::move(list)}});
}

}  // namespace alstrat
