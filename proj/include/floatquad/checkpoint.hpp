#pragma once

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "floatquad/normalizer.hpp"
#include "floatquad/policy.hpp"

namespace floatquad {

/// FNV-1a 64-bit hash, used to fingerprint the producing config.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Policy checkpoint, little-endian binary. Layout (version 1):
///   bytes 0..7   magic "FQCKPT01"
///   u32          version (1)
///   u32          obs_dim, act_dim, hidden_layers, hidden_size
///   u64          config_hash (FNV-1a of the resolved config)
///   mean net     per layer: i64 rows, i64 cols, rows*cols doubles
///                (column-major), i64 len, len doubles (bias)
///   value net    same encoding
///   log_std      i64 len, len doubles
///   normalizer   u8 present; if present: i64 dim, f64 count,
///                dim doubles (mean), dim doubles (sum of squared deviations)
struct Checkpoint {
  GaussianPolicy policy;
  RunningNormalizer normalizer;
  bool has_normalizer = false;
  std::uint64_t config_hash = 0;
};

namespace detail {

inline void write_mat(std::ostream& os, const MatX& m) {
  const std::int64_t r = m.rows(), c = m.cols();
  os.write(reinterpret_cast<const char*>(&r), sizeof(r));
  os.write(reinterpret_cast<const char*>(&c), sizeof(c));
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(double) * m.size()));
}

inline MatX read_mat(std::istream& is) {
  std::int64_t r = 0, c = 0;
  is.read(reinterpret_cast<char*>(&r), sizeof(r));
  is.read(reinterpret_cast<char*>(&c), sizeof(c));
  if (r < 0 || c < 0 || r > 1 << 24 || c > 1 << 24)
    throw std::runtime_error("checkpoint: corrupt matrix header");
  MatX m(r, c);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  return m;
}

inline void write_vec(std::ostream& os, const VecX& v) {
  const std::int64_t n = v.size();
  os.write(reinterpret_cast<const char*>(&n), sizeof(n));
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(sizeof(double) * v.size()));
}

inline VecX read_vec(std::istream& is) {
  std::int64_t n = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (n < 0 || n > 1 << 24) throw std::runtime_error("checkpoint: corrupt vector header");
  VecX v(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * v.size()));
  return v;
}

inline void write_net(std::ostream& os, const MlpNet& net) {
  for (int i = 0; i < net.num_layers(); ++i) {
    write_mat(os, net.weight(i));
    write_vec(os, net.bias(i));
  }
}

inline void read_net(std::istream& is, MlpNet& net) {
  for (int i = 0; i < net.num_layers(); ++i) {
    net.weight(i) = read_mat(is);
    net.bias(i) = read_vec(is);
  }
}

}  // namespace detail

inline constexpr char kCheckpointMagic[8] = {'F', 'Q', 'C', 'K', 'P', 'T', '0', '1'};

inline void save_checkpoint(std::ostream& os, const Checkpoint& ck) {
  os.write(kCheckpointMagic, 8);
  const std::uint32_t version = 1;
  const std::uint32_t obs = static_cast<std::uint32_t>(ck.policy.obs_dim());
  const std::uint32_t act = static_cast<std::uint32_t>(ck.policy.act_dim());
  const std::uint32_t nh = 3, hs = 128;
  os.write(reinterpret_cast<const char*>(&version), 4);
  os.write(reinterpret_cast<const char*>(&obs), 4);
  os.write(reinterpret_cast<const char*>(&act), 4);
  os.write(reinterpret_cast<const char*>(&nh), 4);
  os.write(reinterpret_cast<const char*>(&hs), 4);
  os.write(reinterpret_cast<const char*>(&ck.config_hash), 8);
  detail::write_net(os, ck.policy.mean_net());
  detail::write_net(os, ck.policy.value_net());
  detail::write_vec(os, ck.policy.log_std());
  const std::uint8_t present = ck.has_normalizer ? 1 : 0;
  os.write(reinterpret_cast<const char*>(&present), 1);
  if (present) {
    const std::int64_t dim = ck.normalizer.dim();
    const double count = ck.normalizer.count();
    os.write(reinterpret_cast<const char*>(&dim), 8);
    os.write(reinterpret_cast<const char*>(&count), 8);
    os.write(reinterpret_cast<const char*>(ck.normalizer.mean().data()),
             static_cast<std::streamsize>(8 * dim));
    os.write(reinterpret_cast<const char*>(ck.normalizer.m2().data()),
             static_cast<std::streamsize>(8 * dim));
  }
}

inline Checkpoint load_checkpoint(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  std::uint32_t version, obs, act, nh, hs;
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&obs), 4);
  is.read(reinterpret_cast<char*>(&act), 4);
  is.read(reinterpret_cast<char*>(&nh), 4);
  is.read(reinterpret_cast<char*>(&hs), 4);
  if (version != 1) throw std::runtime_error("checkpoint: unsupported version");
  Checkpoint ck;
  is.read(reinterpret_cast<char*>(&ck.config_hash), 8);
  Rng scratch(0);
  ck.policy = GaussianPolicy(static_cast<int>(obs), static_cast<int>(act), scratch,
                             static_cast<int>(hs));
  detail::read_net(is, ck.policy.mean_net());
  detail::read_net(is, ck.policy.value_net());
  ck.policy.log_std() = detail::read_vec(is);
  std::uint8_t present = 0;
  is.read(reinterpret_cast<char*>(&present), 1);
  if (present) {
    std::int64_t dim;
    double count;
    is.read(reinterpret_cast<char*>(&dim), 8);
    is.read(reinterpret_cast<char*>(&count), 8);
    VecX mean(dim), m2(dim);
    is.read(reinterpret_cast<char*>(mean.data()), static_cast<std::streamsize>(8 * dim));
    is.read(reinterpret_cast<char*>(m2.data()), static_cast<std::streamsize>(8 * dim));
    ck.normalizer = RunningNormalizer(static_cast<int>(dim));
    ck.normalizer.set_raw(mean, m2, count);
    ck.has_normalizer = true;
  }
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return ck;
}

inline void save_checkpoint_file(const std::string& path, const Checkpoint& ck) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open for write: " + path);
  save_checkpoint(f, ck);
  if (!f) throw std::runtime_error("checkpoint: write failed: " + path);
}

inline Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open: " + path);
  return load_checkpoint(f);
}

}  // namespace floatquad
