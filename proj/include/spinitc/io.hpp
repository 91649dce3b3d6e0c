#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spinitc/control.hpp"
#include "spinitc/core.hpp"
#include "spinitc/model.hpp"

// Serialization surface: a deterministic JSON writer (insertion-ordered keys,
// every float printed as %.17g, non-finite values as null so reports stay
// valid JSON), exact-round-trip CSV matrices, and the network spec reader.

namespace spinitc {

// %.17g round-trips every double exactly; infinities print as "inf".
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class Json {
 public:
  enum class Kind { Null, Bool, Int, Real, Str, Array, Object };

  Json() = default;
  Json(bool v) : kind_(Kind::Bool), bool_(v) {}
  Json(int v) : kind_(Kind::Int), int_(v) {}
  Json(std::int64_t v) : kind_(Kind::Int), int_(v) {}
  Json(std::uint64_t v) : kind_(Kind::Int), int_(static_cast<std::int64_t>(v)) {}
  Json(double v) : kind_(Kind::Real), real_(v) {}
  Json(const char* v) : kind_(Kind::Str), str_(v) {}
  Json(std::string v) : kind_(Kind::Str), str_(std::move(v)) {}

  static Json array() {
    Json j;
    j.kind_ = Kind::Array;
    return j;
  }
  static Json object() {
    Json j;
    j.kind_ = Kind::Object;
    return j;
  }

  Json& push(Json v) {
    arr_.push_back(std::move(v));
    return *this;
  }

  // Insertion-ordered; setting an existing key overwrites in place.
  Json& set(const std::string& key, Json v) {
    for (auto& [k, existing] : obj_) {
      if (k == key) {
        existing = std::move(v);
        return *this;
      }
    }
    obj_.emplace_back(key, std::move(v));
    return *this;
  }

  std::string dump(int indent = 2) const {
    std::string out;
    write(out, indent, 0);
    out.push_back('\n');
    return out;
  }

 private:
  static void escape(std::string& out, const std::string& s) {
    out.push_back('"');
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
          } else {
            out.push_back(c);
          }
      }
    }
    out.push_back('"');
  }

  void write(std::string& out, int indent, int depth) const {
    const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
    switch (kind_) {
      case Kind::Null: out += "null"; break;
      case Kind::Bool: out += bool_ ? "true" : "false"; break;
      case Kind::Int: out += std::to_string(int_); break;
      case Kind::Real: out += std::isfinite(real_) ? fmt17(real_) : "null"; break;
      case Kind::Str: escape(out, str_); break;
      case Kind::Array:
        if (arr_.empty()) {
          out += "[]";
          break;
        }
        out += "[\n";
        for (std::size_t k = 0; k < arr_.size(); ++k) {
          out += pad;
          arr_[k].write(out, indent, depth + 1);
          if (k + 1 < arr_.size()) out.push_back(',');
          out.push_back('\n');
        }
        out += close_pad + "]";
        break;
      case Kind::Object:
        if (obj_.empty()) {
          out += "{}";
          break;
        }
        out += "{\n";
        for (std::size_t k = 0; k < obj_.size(); ++k) {
          out += pad;
          escape(out, obj_[k].first);
          out += ": ";
          obj_[k].second.write(out, indent, depth + 1);
          if (k + 1 < obj_.size()) out.push_back(',');
          out.push_back('\n');
        }
        out += close_pad + "}";
        break;
    }
  }

  Kind kind_ = Kind::Null;
  bool bool_ = false;
  std::int64_t int_ = 0;
  double real_ = 0.0;
  std::string str_;
  std::vector<Json> arr_;
  std::vector<std::pair<std::string, Json>> obj_;
};

// Matrices carry explicit dimensions alongside the row-major data.
inline Json matrix_json(const Matrix& m) {
  Json j = Json::object();
  j.set("rows", static_cast<std::int64_t>(m.rows()));
  j.set("cols", static_cast<std::int64_t>(m.cols()));
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push(m(r, c));
    rows.push(std::move(row));
  }
  j.set("data", std::move(rows));
  return j;
}

inline Json vector_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) j.push(v(k));
  return j;
}

// Node indices in serialized artifacts are 1-based, matching the CLI surface.
inline Json control_sequence_json(const ControlSequence& seq) {
  Json j = Json::object();
  j.set("site", seq.site >= 0 ? Json(static_cast<std::int64_t>(seq.site) + 1) : Json());
  j.set("strength", seq.strength);
  Json times = Json::array();
  for (double t : seq.switch_times) times.push(t);
  j.set("switch_times", std::move(times));
  j.set("final_time", seq.final_time);
  j.set("achieved_p", seq.achieved_p);
  j.set("seed", seq.seed);
  return j;
}

inline void csv_write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << fmt17(m(r, c));
    }
    out << '\n';
  }
}

inline Matrix csv_parse_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw invalid_input("CSV cell is not a number: '" + cell + "'");
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size())
        throw invalid_input("CSV cell is not a number: '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw invalid_input("CSV rows have inconsistent lengths");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows.front().size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

// Network spec document: kind ("xx" | "heisenberg") plus exactly one coupling
// source: uniform_j (with n), couplings (row-major n^2 array, with n), or
// positions (array of [x, y] pairs, optional exponent, default 3).
inline SpinNetwork parse_network_spec(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw invalid_input("spec must be a JSON object");

  if (!doc.contains("kind") || !doc["kind"].is_string())
    throw invalid_input("spec needs a string field 'kind' (\"xx\" or \"heisenberg\")");
  const std::string kind_name = doc["kind"].get<std::string>();
  CouplingKind kind;
  if (kind_name == "xx")
    kind = CouplingKind::XX;
  else if (kind_name == "heisenberg")
    kind = CouplingKind::Heisenberg;
  else
    throw invalid_input("unknown kind '" + kind_name + "' (expected \"xx\" or \"heisenberg\")");

  const int sources = (doc.contains("uniform_j") ? 1 : 0) + (doc.contains("couplings") ? 1 : 0) +
                      (doc.contains("positions") ? 1 : 0);
  if (sources != 1)
    throw invalid_input("spec must contain exactly one of uniform_j, couplings, positions");

  auto read_n = [&]() {
    if (!doc.contains("n") || !doc["n"].is_number_integer())
      throw invalid_input("spec needs an integer field 'n'");
    return doc["n"].get<int>();
  };

  if (doc.contains("uniform_j")) {
    if (doc.contains("exponent")) throw invalid_input("exponent requires positions");
    if (!doc["uniform_j"].is_number()) throw invalid_input("uniform_j must be a number");
    return build_chain(read_n(), kind, doc["uniform_j"].get<double>());
  }

  if (doc.contains("couplings")) {
    if (doc.contains("exponent")) throw invalid_input("exponent requires positions");
    const int n = read_n();
    const auto& data = doc["couplings"];
    if (!data.is_array() || static_cast<int>(data.size()) != n * n)
      throw invalid_input("couplings must be a row-major array of n*n numbers");
    SpinNetwork net;
    net.n = n;
    net.kind = kind;
    net.couplings = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const auto& cell = data[static_cast<std::size_t>(r * n + c)];
        if (!cell.is_number()) throw invalid_input("couplings entries must be numbers");
        net.couplings(r, c) = cell.get<double>();
      }
    }
    validate_network(net);
    return net;
  }

  const auto& pos = doc["positions"];
  if (!pos.is_array() || pos.size() < 2)
    throw invalid_input("positions must be an array of at least two [x, y] pairs");
  std::vector<std::array<double, 2>> points;
  points.reserve(pos.size());
  for (const auto& entry : pos) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number())
      throw invalid_input("each position must be an [x, y] pair of numbers");
    points.push_back({entry[0].get<double>(), entry[1].get<double>()});
  }
  if (doc.contains("n") && doc["n"].get<int>() != static_cast<int>(points.size()))
    throw invalid_input("n does not match the number of positions");
  double exponent = 3.0;
  if (doc.contains("exponent")) {
    if (!doc["exponent"].is_number()) throw invalid_input("exponent must be a number");
    exponent = doc["exponent"].get<double>();
  }
  return build_geometric_network(points, kind, exponent);
}

}  // namespace spinitc
