// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/checkpoint.hpp"

#include <cstring>
#include <span>

#include "json_util.hpp"
#include "sparsecue/hash.hpp"
#include "sparsecue/motion_io.hpp"

namespace sparsecue {
namespace {

using detail::json;

template <class P>
std::string hash_tensors(P& params, std::string_view tag) {
  Sha256 h;
  h.update(tag);
  for_each_tensor(params, [&](const std::string& name, const Matrix& m) {
    h.update(name);
    const std::int64_t shape[2] = {m.rows(), m.cols()};
    h.update(std::as_bytes(std::span<const std::int64_t>(shape)));
    // Row-major, matching the on-disk order.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    h.update(std::span<const double>(rm.data(), static_cast<std::size_t>(rm.size())));
  });
  return h.finish();
}

json tensor_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

template <class P>
json tensors_json(const P& params) {
  json out = json::object();
  for_each_tensor(params, [&](const std::string& name, const Matrix& m) { out[name] = tensor_json(m); });
  return out;
}

void read_tensor(const json& tensors, const std::string& name, Matrix& dst, const std::string& where) {
  const json& t = detail::require(tensors, name, where);
  const json& shape = detail::as_array(detail::require(t, "shape", where + "." + name), 2, where + "." + name);
  const json& data = detail::as_array(detail::require(t, "data", where + "." + name), 0, where + "." + name);
  const auto rows = shape[0].get<Eigen::Index>();
  const auto cols = shape[1].get<Eigen::Index>();
  if (rows != dst.rows() || cols != dst.cols() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ValidationError(where + "." + name + ": tensor shape does not match the config");
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      dst(r, c) = detail::as_number(data[static_cast<std::size_t>(r * cols + c)], where + "." + name);
    }
  }
}

template <class P>
void read_tensors(const json& tensors, P& params, const std::string& where) {
  for_each_tensor(params, [&](const std::string& name, Matrix& m) { read_tensor(tensors, name, m, where); });
}

}  // namespace

const AdapterParams& Checkpoint::adapter(const std::string& role) const {
  const auto it = adapters.find(role);
  if (it == adapters.end()) throw ValidationError("checkpoint has no '" + role + "' adapter");
  return it->second;
}

std::string weights_hash(const GeneratorParams& params) { return hash_tensors(params, "generator"); }

std::string weights_hash(const AdapterParams& adapter) {
  return hash_tensors(adapter, adapter_kind_name(adapter.kind));
}

std::string dump_checkpoint(const Checkpoint& ck) {
  validate(ck.base);
  const auto& c = ck.base.config;
  json j;
  j["format"] = "sparsecue.checkpoint";
  j["version"] = 1;
  j["config"] = {{"width", c.width}, {"blocks", c.blocks}, {"max_frames", c.max_frames}, {"pose_dim", c.pose_dim}};
  j["info"] = ck.info;
  j["hashes"]["base"] = weights_hash(ck.base);
  j["base"] = tensors_json(ck.base);
  j["adapters"] = json::object();
  for (const auto& [role, a] : ck.adapters) {
    validate(a, ck.base);
    j["hashes"][role] = weights_hash(a);
    j["adapters"][role] = {{"kind", adapter_kind_name(a.kind)}, {"tensors", tensors_json(a)}};
  }
  return j.dump() + "\n";
}

Checkpoint parse_checkpoint(std::string_view text) {
  const json j = detail::parse_json(text, "checkpoint");
  if (detail::require(j, "format", "checkpoint") != "sparsecue.checkpoint") {
    throw ParseError("checkpoint: unrecognized format tag");
  }
  if (detail::require(j, "version", "checkpoint") != 1) throw ParseError("checkpoint: unsupported version");
  const json& cj = detail::require(j, "config", "checkpoint");
  GeneratorConfig cfg;
  try {
    cfg.width = detail::require(cj, "width", "checkpoint.config").get<int>();
    cfg.blocks = detail::require(cj, "blocks", "checkpoint.config").get<int>();
    cfg.max_frames = detail::require(cj, "max_frames", "checkpoint.config").get<int>();
    cfg.pose_dim = detail::require(cj, "pose_dim", "checkpoint.config").get<int>();
  } catch (const json::type_error& e) {
    throw ParseError(std::string("checkpoint.config: ") + e.what());
  }

  Checkpoint ck;
  ck.base = init_generator(cfg, 0);
  read_tensors(detail::require(j, "base", "checkpoint"), ck.base, "checkpoint.base");
  validate(ck.base);
  const json& hashes = detail::require(j, "hashes", "checkpoint");
  if (detail::require(hashes, "base", "checkpoint.hashes") != weights_hash(ck.base)) {
    throw ValidationError("checkpoint: base weights do not match the stored hash");
  }
  if (const auto it = j.find("info"); it != j.end()) {
    if (!it->is_object()) throw ParseError("checkpoint.info: expected an object");
    for (const auto& [k, v] : it->items()) ck.info[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  for (const auto& [role, aj] : detail::require(j, "adapters", "checkpoint").items()) {
    const std::string where = "checkpoint.adapters." + role;
    const auto& kind_name = detail::require(aj, "kind", where);
    const auto kind = kind_name.is_string() ? parse_adapter_kind(kind_name.get<std::string>()) : std::nullopt;
    if (!kind) throw ParseError(where + ": unknown adapter kind");
    AdapterParams a = init_adapter(ck.base, *kind, 0);
    read_tensors(detail::require(aj, "tensors", where), a, where);
    validate(a, ck.base);
    if (detail::require(hashes, role, "checkpoint.hashes") != weights_hash(a)) {
      throw ValidationError(where + ": weights do not match the stored hash");
    }
    ck.adapters.emplace(role, std::move(a));
  }
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  write_text_file(path, dump_checkpoint(ck));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(read_text_file(path)); }

}  // namespace sparsecue
