// SPDX-License-Identifier: Apache-2.0

#ifndef CPTOPK_CPT_IO_HPP
#define CPTOPK_CPT_IO_HPP

#include <string>
#include <string_view>
#include <variant>

#include "cptopk/cp_tensor.hpp"

namespace cptopk {

using AnyCpTensor = std::variant<CpTensor<Real>, CpTensor<Complex>>;

/// CPT text format: one JSON object
///   {"field": "real"|"complex", "dims": [n_1, ...], "rank": R,
///    "factors": [[...], ...]}
/// Factor p holds n_p * R numbers row-major; complex entries are [re, im].
/// Throws ParseError on malformed text or inconsistent sizes.
AnyCpTensor parse_cpt(std::string_view text);

/// Writes every number with 17 significant digits, so parsing round-trips exactly.
std::string format_cpt(const CpTensor<Real>& a);
std::string format_cpt(const CpTensor<Complex>& a);
std::string format_cpt(const AnyCpTensor& a);

/// File wrappers; IoError when the file cannot be read or written.
AnyCpTensor load_cpt(const std::string& path);
void save_cpt(const std::string& path, const AnyCpTensor& a);

}  // namespace cptopk

#endif
