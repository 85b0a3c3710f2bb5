// SPDX-License-Identifier: Apache-2.0

#include "cptopk/common.hpp"

#include <limits>

namespace cptopk {

std::string_view to_string(OrderingKey key) noexcept {
  switch (key) {
    case OrderingKey::Max: return "max";
    case OrderingKey::Min: return "min";
    case OrderingKey::MaxAbs: return "maxabs";
    case OrderingKey::MaxReal: return "maxreal";
    case OrderingKey::MaxImag: return "maximag";
  }
  return "max";
}

OrderingKey parse_ordering_key(std::string_view name) {
  if (name == "max") return OrderingKey::Max;
  if (name == "min") return OrderingKey::Min;
  if (name == "maxabs") return OrderingKey::MaxAbs;
  if (name == "maxreal") return OrderingKey::MaxReal;
  if (name == "maximag") return OrderingKey::MaxImag;
  throw InvalidArgumentError("unknown ordering key '" + std::string(name) + "'");
}

std::size_t saturating_volume(const std::vector<std::size_t>& dims) noexcept {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t v = 1;
  for (std::size_t n : dims) {
    if (n != 0 && v > kMax / n) return kMax;
    v *= n;
  }
  return v;
}

std::size_t linear_index(const IndexTuple& idx, const std::vector<std::size_t>& dims) noexcept {
  std::size_t lin = 0;
  std::size_t stride = 1;
  for (std::size_t p = 0; p < dims.size(); ++p) {
    lin += idx[p] * stride;
    stride *= dims[p];
  }
  return lin;
}

IndexTuple multi_index(std::size_t linear, const std::vector<std::size_t>& dims) {
  IndexTuple idx(dims.size());
  for (std::size_t p = 0; p < dims.size(); ++p) {
    idx[p] = linear % dims[p];
    linear /= dims[p];
  }
  return idx;
}

std::string format_index(const IndexTuple& idx) {
  std::string s = "(";
  for (std::size_t p = 0; p < idx.size(); ++p) {
    if (p) s += ',';
    s += std::to_string(idx[p] + 1);
  }
  s += ')';
  return s;
}

}  // namespace cptopk
