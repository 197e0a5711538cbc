#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace autoids {

// Streaming FNV-1a 64-bit hash. Used to fingerprint persisted artifacts and
// to pair models with the transform that produced their inputs.
class Fnv1a64 {
 public:
  void update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001B3ull;
    }
  }

  void update(std::string_view s) { update(s.data(), s.size()); }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xCBF29CE484222325ull;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  Fnv1a64 h;
  h.update(s);
  return h.digest();
}

}  // namespace autoids
