#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "reactnet/binary_io.hpp"
#include "reactnet/error.hpp"
#include "reactnet/net.hpp"

// RANW checkpoint:
//   "RANW" | u32 version | NetConfig | u32 tensor count |
//   per tensor: u32 rank (=4) | u32 dims[4] | f32 values
// NetConfig: u32 stages | u32 first_filter | u32 channels | u8 skip |
//   u8 intermediate | u32 canonical | u8 upsampling | f64 stage_weights[stages]
// Tensors follow ReActNet::state_tensors() order.
namespace reactnet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

inline void write_checkpoint(std::ostream& out, ReActNet<float>& model) {
  const NetConfig& cfg = model.config();
  binio::write_magic(out, "RANW");
  binio::write_u32(out, kCheckpointVersion);
  binio::write_u32(out, static_cast<std::uint32_t>(cfg.stages));
  binio::write_u32(out, static_cast<std::uint32_t>(cfg.first_filter));
  binio::write_u32(out, static_cast<std::uint32_t>(cfg.channels));
  binio::write_u8(out, cfg.skip_connections ? 1 : 0);
  binio::write_u8(out, cfg.intermediate_supervision ? 1 : 0);
  binio::write_u32(out, static_cast<std::uint32_t>(cfg.canonical));
  binio::write_u8(out, cfg.upsampling == ops::Upsampling::kBilinear ? 1 : 0);
  for (double w : cfg.stage_weights) binio::write_f64(out, w);

  const auto tensors = model.state_tensors();
  binio::write_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto* p : tensors) {
    const auto& t = p->value;
    binio::write_u32(out, 4);
    for (int d : {t.n, t.c, t.h, t.w}) binio::write_u32(out, static_cast<std::uint32_t>(d));
    for (float v : t.data) binio::write_f32(out, v);
  }
}

inline void save_checkpoint(ReActNet<float>& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_checkpoint(out, model);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

inline ReActNet<float> read_checkpoint(std::istream& in) {
  if (!binio::read_magic(in, "RANW")) throw FormatError("bad RANW magic");
  const auto version = binio::read_u32(in, "RANW version");
  if (version != kCheckpointVersion) throw FormatError("unsupported RANW version " + std::to_string(version));
  NetConfig cfg;
  cfg.stages = static_cast<int>(binio::read_u32(in, "stages"));
  cfg.first_filter = static_cast<int>(binio::read_u32(in, "first_filter"));
  cfg.channels = static_cast<int>(binio::read_u32(in, "channels"));
  cfg.skip_connections = binio::read_u8(in, "skip flag") != 0;
  cfg.intermediate_supervision = binio::read_u8(in, "supervision flag") != 0;
  cfg.canonical = static_cast<int>(binio::read_u32(in, "canonical"));
  cfg.upsampling = binio::read_u8(in, "upsampling") ? ops::Upsampling::kBilinear : ops::Upsampling::kNearest;
  if (cfg.stages < 1 || cfg.stages > 64) throw FormatError("implausible stage count in checkpoint");
  cfg.stage_weights.clear();
  for (int k = 0; k < cfg.stages; ++k) cfg.stage_weights.push_back(binio::read_f64(in, "stage weight"));
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint holds an invalid configuration: ") + e.what());
  }

  ReActNet<float> model(cfg, 0);
  const auto tensors = model.state_tensors();
  const auto count = binio::read_u32(in, "tensor count");
  if (count != tensors.size())
    throw FormatError("checkpoint has " + std::to_string(count) + " tensors, architecture needs " + std::to_string(tensors.size()));
  for (auto* p : tensors) {
    auto& t = p->value;
    if (binio::read_u32(in, "tensor rank") != 4) throw FormatError("tensor '" + p->name + "' is not rank 4");
    for (int d : {t.n, t.c, t.h, t.w})
      if (binio::read_u32(in, "tensor dim") != static_cast<std::uint32_t>(d))
        throw FormatError("tensor '" + p->name + "' has the wrong shape");
    for (auto& v : t.data) v = binio::read_f32(in, "tensor values");
    if (!t.all_finite()) throw DataError("tensor '" + p->name + "' contains non-finite values");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw SizeMismatchError("trailing bytes after checkpoint tensors");
  return model;
}

inline ReActNet<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace reactnet
