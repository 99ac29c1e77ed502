#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace npspect {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;

inline constexpr double kPi = 3.14159265358979323846;

enum class Errc {
  invalid_argument,
  config_parse,
  assembly,
  eigensolve,
  io,
  bad_format,
};

struct Error : std::runtime_error {
  Errc code;
  Error(Errc c, const std::string& what) : std::runtime_error(what), code(c) {}
};

[[noreturn]] inline void fail(Errc c, const std::string& what) { throw Error(c, what); }

inline void require(bool cond, Errc c, const std::string& what) {
  if (!cond) fail(c, what);
}

/// FNV-1a over raw bytes; used for grid/field/build hashes and cache checksums.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t seed = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t hash_str(const std::string& s,
                              std::uint64_t seed = 1469598103934665603ull) {
  return fnv1a64(s.data(), s.size(), seed);
}

}  // namespace npspect
