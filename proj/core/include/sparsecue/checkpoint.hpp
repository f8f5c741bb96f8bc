// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "sparsecue/generator.hpp"

namespace sparsecue {

/// Base weights plus any number of adapters keyed by role ("3d-la", "3d-ga",
/// "2d-la", "3d-input-la"). `info` carries free-form run metadata.
///
/// On disk this is a JSON object:
///   format   "sparsecue.checkpoint", version 1
///   config   {width, blocks, max_frames, pose_dim}
///   info     string map
///   hashes   role -> weights_hash, with "base" for the base network
///   base     tensor name -> {shape: [rows, cols], data: row-major numbers}
///   adapters role -> {kind, tensors: same layout as base}
/// Numbers are written in shortest round-trip form, so reloading is exact.
struct Checkpoint {
  GeneratorParams base;
  std::map<std::string, AdapterParams> adapters;
  std::map<std::string, std::string> info;

  const AdapterParams& adapter(const std::string& role) const;
};

/// SHA-256 over tensor names, shapes and raw IEEE-754 values.
std::string weights_hash(const GeneratorParams& params);
std::string weights_hash(const AdapterParams& adapter);

std::string dump_checkpoint(const Checkpoint& ck);
/// Verifies shapes and stored hashes.
Checkpoint parse_checkpoint(std::string_view text);
void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sparsecue
