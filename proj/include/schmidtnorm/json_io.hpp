#pragma once

// Shared file format for vectors and operators:
//
//   {"n": 2, "m": 2, "kind": "vector" | "operator", "data": [[re, im], ...]}
//
// Operators are row-major, (n*m)^2 entries.

#include "schmidtnorm/core.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <variant>

namespace schmidtnorm {

class FormatError : public InputError {
 public:
  explicit FormatError(const std::string& what) : InputError("malformed JSON: " + what) {}
};

/// Vector as read from disk; not yet validated as a unit state.
struct VectorPayload {
  Vector amplitudes;
  BipartiteDims dims;
};

using Payload = std::variant<VectorPayload, BipartiteOperator>;

namespace detail {

inline nlohmann::json complex_array(const Complex* data, Index count) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < count; ++i) arr.push_back({data[i].real(), data[i].imag()});
  return arr;
}

inline Complex read_complex(const nlohmann::json& entry, std::size_t pos) {
  if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
    throw FormatError("data[" + std::to_string(pos) + "] is not a [re, im] pair of numbers");
  }
  return {entry[0].get<double>(), entry[1].get<double>()};
}

inline int read_dim(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw FormatError(std::string("field \"") + key + "\" must be an integer");
  const auto value = v.get<std::int64_t>();
  if (value < 1 || value > (std::int64_t{1} << 20)) {
    throw FormatError(std::string("field \"") + key + "\" must be a positive dimension");
  }
  return static_cast<int>(value);
}

}  // namespace detail

inline nlohmann::json to_json(const Vector& amplitudes, BipartiteDims dims) {
  if (amplitudes.size() != dims.total()) throw DimensionError("vector length does not match n*m");
  return {{"n", dims.n}, {"m", dims.m}, {"kind", "vector"},
          {"data", detail::complex_array(amplitudes.data(), amplitudes.size())}};
}

inline nlohmann::json to_json(const PureState& v) { return to_json(v.amplitudes(), v.dims()); }

inline nlohmann::json to_json(const BipartiteOperator& x) {
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor rows = x.entries();
  return {{"n", x.dims().n}, {"m", x.dims().m}, {"kind", "operator"},
          {"data", detail::complex_array(rows.data(), rows.size())}};
}

inline Payload payload_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("top level must be an object");
  const BipartiteDims dims(detail::read_dim(j, "n"), detail::read_dim(j, "m"));
  if (!j.contains("kind") || !j.at("kind").is_string()) throw FormatError("missing string field \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  if (!j.contains("data") || !j.at("data").is_array()) throw FormatError("missing array field \"data\"");
  const auto& data = j.at("data");

  if (kind == "vector") {
    if (static_cast<Index>(data.size()) != dims.total()) {
      throw DimensionError("vector has " + std::to_string(data.size()) + " entries, expected n*m = " +
                           std::to_string(dims.total()));
    }
    Vector v(dims.total());
    for (std::size_t i = 0; i < data.size(); ++i) v(static_cast<Index>(i)) = detail::read_complex(data[i], i);
    return VectorPayload{std::move(v), dims};
  }
  if (kind == "operator") {
    const Index side = dims.total();
    if (static_cast<Index>(data.size()) != side * side) {
      throw DimensionError("operator has " + std::to_string(data.size()) + " entries, expected (n*m)^2 = " +
                           std::to_string(side * side));
    }
    Matrix x(side, side);
    for (Index r = 0; r < side; ++r)
      for (Index c = 0; c < side; ++c) {
        const auto pos = static_cast<std::size_t>(r * side + c);
        x(r, c) = detail::read_complex(data[pos], pos);
      }
    return BipartiteOperator(std::move(x), dims);
  }
  throw FormatError("unknown kind \"" + kind + "\" (expected \"vector\" or \"operator\")");
}

inline Payload parse_payload(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(e.what());
  }
  return payload_from_json(j);
}

inline Payload read_payload_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_payload(buf.str());
}

}  // namespace schmidtnorm
