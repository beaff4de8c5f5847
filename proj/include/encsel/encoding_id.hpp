#pragma once

#include <array>
#include <compare>
#include <string>

#include "encsel/errors.hpp"

namespace encsel {

inline constexpr int kEncodingCount = 6;

// One of the six registered encodings, numbered 1..6.
class EncodingId {
 public:
  constexpr explicit EncodingId(int index) : index_(index) {
    if (index < 1 || index > kEncodingCount) throw ValidationError("encoding id out of range 1..6");
  }

  constexpr int value() const noexcept { return index_; }
  constexpr std::size_t slot() const noexcept { return static_cast<std::size_t>(index_ - 1); }

  friend constexpr auto operator<=>(const EncodingId&, const EncodingId&) = default;

 private:
  int index_;
};

inline std::string to_string(EncodingId id) { return "Encoding " + std::to_string(id.value()); }

inline std::array<EncodingId, kEncodingCount> all_encoding_ids() {
  return {EncodingId(1), EncodingId(2), EncodingId(3), EncodingId(4), EncodingId(5), EncodingId(6)};
}

}  // namespace encsel
