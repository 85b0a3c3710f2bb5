// SPDX-License-Identifier: Apache-2.0

#include "cptopk/cpt_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cptopk {

namespace {

using json = nlohmann::json;

double number(const json& v, const char* what) {
  if (!v.is_number()) throw ParseError(std::string("expected a number in ") + what);
  return v.get<double>();
}

template <class T>
T entry(const json& v);

template <>
Real entry<Real>(const json& v) {
  return number(v, "real factor");
}

template <>
Complex entry<Complex>(const json& v) {
  if (!v.is_array() || v.size() != 2) throw ParseError("complex factor entries must be [re, im] pairs");
  return {number(v[0], "complex factor"), number(v[1], "complex factor")};
}

template <class T>
CpTensor<T> build(const std::vector<std::size_t>& dims, std::size_t rank, const json& factors) {
  std::vector<Matrix<T>> out;
  for (std::size_t p = 0; p < dims.size(); ++p) {
    const json& f = factors[p];
    if (!f.is_array() || f.size() != dims[p] * rank)
      throw ParseError("factor " + std::to_string(p + 1) + " must hold " + std::to_string(dims[p] * rank) +
                       " entries (n_p * rank)");
    Matrix<T> m(static_cast<Eigen::Index>(dims[p]), static_cast<Eigen::Index>(rank));
    for (std::size_t i = 0; i < dims[p]; ++i)
      for (std::size_t r = 0; r < rank; ++r)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = entry<T>(f[i * rank + r]);
    out.push_back(std::move(m));
  }
  try {
    return CpTensor<T>(std::move(out));
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

void put(std::string& s, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  s += buf;
}

void put(std::string& s, const Complex& v) {
  s += '[';
  put(s, v.real());
  s += ", ";
  put(s, v.imag());
  s += ']';
}

template <class T>
std::string format(const CpTensor<T>& a) {
  std::string s = "{\n  \"field\": \"";
  s += is_complex_v<T> ? "complex" : "real";
  s += "\",\n  \"dims\": [";
  for (std::size_t p = 0; p < a.order(); ++p) {
    if (p) s += ", ";
    s += std::to_string(a.dim(p));
  }
  s += "],\n  \"rank\": " + std::to_string(a.rank()) + ",\n  \"factors\": [";
  for (std::size_t p = 0; p < a.order(); ++p) {
    s += p ? ",\n    [" : "\n    [";
    const Matrix<T>& f = a.factor(p);
    for (Eigen::Index i = 0; i < f.rows(); ++i)
      for (Eigen::Index r = 0; r < f.cols(); ++r) {
        if (i || r) s += ", ";
        put(s, f(i, r));
      }
    s += ']';
  }
  s += "\n  ]\n}\n";
  return s;
}

}  // namespace

AnyCpTensor parse_cpt(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("CPT file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("CPT file must hold a single object");
  for (const char* key : {"field", "dims", "rank", "factors"})
    if (!doc.contains(key)) throw ParseError(std::string("CPT file is missing \"") + key + "\"");

  const json& field = doc["field"];
  if (!field.is_string() || (field != "real" && field != "complex"))
    throw ParseError("\"field\" must be \"real\" or \"complex\"");
  const json& jd = doc["dims"];
  if (!jd.is_array() || jd.empty()) throw ParseError("\"dims\" must be a non-empty array");
  std::vector<std::size_t> dims;
  for (const json& n : jd) {
    if (!n.is_number_integer() || n.get<long long>() < 1) throw ParseError("\"dims\" entries must be positive integers");
    dims.push_back(n.get<std::size_t>());
  }
  const json& jr = doc["rank"];
  if (!jr.is_number_integer() || jr.get<long long>() < 1) throw ParseError("\"rank\" must be a positive integer");
  const auto rank = jr.get<std::size_t>();
  const json& factors = doc["factors"];
  if (!factors.is_array() || factors.size() != dims.size())
    throw ParseError("\"factors\" must hold one array per mode");

  if (field == "real") return build<Real>(dims, rank, factors);
  return build<Complex>(dims, rank, factors);
}

std::string format_cpt(const CpTensor<Real>& a) { return format(a); }
std::string format_cpt(const CpTensor<Complex>& a) { return format(a); }
std::string format_cpt(const AnyCpTensor& a) {
  return std::visit([](const auto& t) { return format(t); }, a);
}

AnyCpTensor load_cpt(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return parse_cpt(buf.str());
}

void save_cpt(const std::string& path, const AnyCpTensor& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << format_cpt(a);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace cptopk
