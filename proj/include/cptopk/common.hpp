// SPDX-License-Identifier: Apache-2.0

#ifndef CPTOPK_COMMON_HPP
#define CPTOPK_COMMON_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace cptopk {

using Real = double;
using Complex = std::complex<double>;

/// Zero-based multi-index into an order-d tensor.
using IndexTuple = std::vector<std::size_t>;

template <class T>
inline constexpr bool is_complex_v = std::is_same_v<T, Complex>;

enum class ErrorCode {
  Bounds,
  Shape,
  Capacity,
  InfeasibleK,
  Degenerate,
  Exhaustion,
  Parse,
  Io,
  InvalidArgument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define CPTOPK_DEFINE_ERROR(Name, Code)                                   \
  struct Name : Error {                                                   \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  }

CPTOPK_DEFINE_ERROR(BoundsError, Bounds);
CPTOPK_DEFINE_ERROR(ShapeError, Shape);
CPTOPK_DEFINE_ERROR(CapacityError, Capacity);
CPTOPK_DEFINE_ERROR(InfeasibleKError, InfeasibleK);
CPTOPK_DEFINE_ERROR(DegenerateInputError, Degenerate);
CPTOPK_DEFINE_ERROR(ExhaustionError, Exhaustion);
CPTOPK_DEFINE_ERROR(ParseError, Parse);
CPTOPK_DEFINE_ERROR(IoError, Io);
CPTOPK_DEFINE_ERROR(InvalidArgumentError, InvalidArgument);

#undef CPTOPK_DEFINE_ERROR

/// Which elements count as "top". Max and Min are only meaningful for real
/// tensors; the remaining keys order complex entries through a real score.
enum class OrderingKey { Max, Min, MaxAbs, MaxReal, MaxImag };

/// Real score whose descending order is the key order.
inline double key_score(Real v, OrderingKey key) noexcept {
  switch (key) {
    case OrderingKey::Max:
    case OrderingKey::MaxReal: return v;
    case OrderingKey::Min: return -v;
    case OrderingKey::MaxAbs: return v < 0 ? -v : v;
    case OrderingKey::MaxImag: return 0.0;
  }
  return v;
}

inline double key_score(const Complex& v, OrderingKey key) noexcept {
  switch (key) {
    case OrderingKey::Max:
    case OrderingKey::MaxReal: return v.real();
    case OrderingKey::Min: return -v.real();
    case OrderingKey::MaxAbs: return std::abs(v);
    case OrderingKey::MaxImag: return v.imag();
  }
  return v.real();
}

/// Throws InvalidArgumentError when the key is not defined for the field.
template <class T>
void require_key_for_field(OrderingKey key) {
  if constexpr (is_complex_v<T>) {
    if (key == OrderingKey::Max || key == OrderingKey::Min)
      throw InvalidArgumentError("ordering keys max/min need a real tensor; use maxabs, maxreal or maximag");
  }
}

std::string_view to_string(OrderingKey key) noexcept;
OrderingKey parse_ordering_key(std::string_view name);

/// Number of entries of a tensor with the given dims, saturating at SIZE_MAX.
std::size_t saturating_volume(const std::vector<std::size_t>& dims) noexcept;

/// Mode-1-fastest linearization (first index varies fastest).
std::size_t linear_index(const IndexTuple& idx, const std::vector<std::size_t>& dims) noexcept;
IndexTuple multi_index(std::size_t linear, const std::vector<std::size_t>& dims);

/// "(i1,i2,...)" with one-based components.
std::string format_index(const IndexTuple& idx);

}  // namespace cptopk

#endif
