// Copyright 2026 The Lacuna Authors.
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


#include "lacuna/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace lacuna::model {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace fs = std::filesystem;

void write_checkpoint(const fs::path& path, nlohmann::json header, const std::vector<NamedTensor>& tensors) {
  if (!header.is_object()) throw std::invalid_argument("checkpoint header must be a JSON object");
  if (header.contains("tensors")) throw std::invalid_argument("checkpoint header may not define 'tensors'");
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& t : tensors) manifest.push_back({{"name", t.name}, {"shape", t.tensor->shape}});
  header["tensors"] = std::move(manifest);

  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp.string());
    out << kCheckpointMagic << '\n' << header.dump() << '\n';
    for (const auto& t : tensors) {
      out.write(reinterpret_cast<const char*>(t.tensor->data.data()),
                static_cast<std::streamsize>(t.tensor->data.size() * sizeof(float)));
    }
    out.flush();
    if (!out) throw CheckpointError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

nlohmann::json read_header(std::ifstream& in, const fs::path& path) {
  std::string magic, line;
  if (!std::getline(in, magic) || magic != kCheckpointMagic) {
    throw CheckpointError(path.string() + " is not a checkpoint (bad magic)");
  }
  if (!std::getline(in, line)) throw CheckpointError(path.string() + ": missing header");
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path.string() + ": malformed header: " + e.what());
  }
}

}  // namespace

nlohmann::json read_checkpoint_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  nlohmann::json header = read_header(in, path);
  header.erase("tensors");
  return header;
}

CheckpointContents read_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  CheckpointContents out;
  out.header = read_header(in, path);
  if (!out.header.contains("tensors") || !out.header["tensors"].is_array()) {
    throw CheckpointError(path.string() + ": header lacks a tensor manifest");
  }
  for (const auto& entry : out.header["tensors"]) {
    const auto name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<ad::Shape>();
    for (int d : shape) {
      if (d <= 0) throw CheckpointError(path.string() + ": tensor " + name + " has a non-positive dimension");
    }
    auto& p = out.tensors.add(name, shape);
    in.read(reinterpret_cast<char*>(p.value.data.data()),
            static_cast<std::streamsize>(p.value.data.size() * sizeof(float)));
    if (!in) throw CheckpointError(path.string() + ": truncated data for tensor " + name);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError(path.string() + ": trailing bytes");
  out.header.erase("tensors");
  return out;
}

void load_into(ad::ParameterStore<float>& store, const ad::ParameterStore<float>& source) {
  for (auto& p : store) {
    if (!source.contains(p.name)) throw CheckpointError("checkpoint lacks tensor " + p.name);
    const auto& src = source.get(p.name);
    if (src.value.shape != p.value.shape) {
      throw CheckpointError("tensor " + p.name + " has shape " + ad::shape_string(src.value.shape) + ", expected " +
                            ad::shape_string(p.value.shape));
    }
    p.value = src.value;
  }
}

}  // namespace lacuna::model
