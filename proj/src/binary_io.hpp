// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "pedrad/error.hpp"

namespace pedrad::detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

inline std::uint32_t get_u32(std::string_view in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + static_cast<std::size_t>(i)])) << (8 * i);
  }
  return v;
}

inline float get_f32(std::string_view in, std::size_t offset) { return std::bit_cast<float>(get_u32(in, offset)); }

struct MatrixHeader {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t extra = 0;
};

inline std::string make_header(std::string_view magic, const MatrixHeader& h) {
  std::string out(magic);
  put_u32(out, h.rows);
  put_u32(out, h.cols);
  put_u32(out, h.extra);
  return out;
}

/// Validates magic and payload length; `floats_per_cell` is 2 for complex payloads.
inline MatrixHeader read_header(std::string_view data, std::string_view magic, std::size_t floats_per_cell,
                                const std::string& source) {
  if (data.size() < 16 || data.substr(0, 4) != magic) {
    throw FormatError(source + ": missing " + std::string(magic) + " header");
  }
  MatrixHeader h{get_u32(data, 4), get_u32(data, 8), get_u32(data, 12)};
  const std::size_t expected = 16 + static_cast<std::size_t>(h.rows) * h.cols * floats_per_cell * 4;
  if (data.size() != expected) {
    throw FormatError(source + ": payload is " + std::to_string(data.size() - 16) + " bytes, header implies " +
                      std::to_string(expected - 16));
  }
  return h;
}

}  // namespace pedrad::detail
