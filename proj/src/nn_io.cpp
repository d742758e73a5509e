// Copyright 2026 The edgesched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "edgesched/nn.hpp"

namespace edgesched::nn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'E', 'D', 'G', 'E', 'N', 'N', '0', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ValidationError("truncated checkpoint");
  return value;
}

}  // namespace

void save_mlp(std::ostream& out, const Mlp<double>& net) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(net.layers().size()));
  for (const auto& l : net.layers()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(l.weights.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(l.weights.cols()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(l.activation));
  }
  for (const auto& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) put<double>(out, l.weights(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) put<double>(out, l.bias[r]);
  }
  if (!out) throw ValidationError("failed to write checkpoint");
}

Mlp<double> load_mlp(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError("not an edgesched network checkpoint");
  }
  const auto count = get<std::uint32_t>(in);
  if (count == 0 || count > 1024) throw ValidationError("bad layer count in checkpoint");
  std::vector<DenseLayer<double>> layers(count);
  for (auto& l : layers) {
    const auto rows = get<std::uint32_t>(in);
    const auto cols = get<std::uint32_t>(in);
    const auto act = get<std::uint32_t>(in);
    if (rows == 0 || cols == 0 || act > 2) throw ValidationError("bad layer header in checkpoint");
    l.weights.resize(rows, cols);
    l.bias.resize(rows);
    l.activation = static_cast<Activation>(act);
  }
  for (auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = get<double>(in);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = get<double>(in);
  }
  try {
    return Mlp<double>(std::move(layers));
  } catch (const ContractError& e) {
    throw ValidationError(std::string("inconsistent checkpoint: ") + e.what());
  }
}

void save_mlp(const std::string& path, const Mlp<double>& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  save_mlp(out, net);
}

Mlp<double> load_mlp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint " + path);
  return load_mlp(in);
}

}  // namespace edgesched::nn
