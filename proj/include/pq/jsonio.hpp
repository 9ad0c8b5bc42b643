#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "pq/quadric.hpp"

namespace pq {

using Json = nlohmann::ordered_json;

inline Json mat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Mat mat_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw Error(ErrorCode::malformed_input, "expected a 2d array of numbers");
  const int r = static_cast<int>(j.size());
  const int c = static_cast<int>(j[0].size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != c)
      throw Error(ErrorCode::malformed_input, "ragged matrix rows");
    for (int k = 0; k < c; ++k) {
      if (!j[i][k].is_number())
        throw Error(ErrorCode::malformed_input, "matrix entry is not a number");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

inline Json quadric_to_json(const Quadric& q) {
  return Json{{"dim", q.dim}, {"mat", mat_to_json(q.mat)}};
}

// Inputs must be symmetric up to the documented tolerance; we do not
// silently symmetrize anything farther away than that.
inline Mat symmetrized_checked(const Mat& m) {
  require_symmetric(m, "input");
  return symmetrized(m);
}

inline Quadric quadric_from_json(const Json& j) {
  Mat m;
  int dim = 0;
  if (j.is_array()) {
    m = mat_from_json(j);
    dim = static_cast<int>(m.rows());
  } else if (j.is_object() && j.contains("mat")) {
    m = mat_from_json(j.at("mat"));
    dim = j.value("dim", static_cast<int>(m.rows()));
  } else {
    throw Error(ErrorCode::malformed_input, "expected {dim, mat} or a 2d array");
  }
  Quadric q(dim, symmetrized_checked(m));
  q.require_ambient();
  return q;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::malformed_input, "cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::malformed_input, std::string("bad JSON in ") + path + ": " + e.what());
  }
  return j;
}

inline void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::malformed_input, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace pq
