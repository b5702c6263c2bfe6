#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rateq/dist.hpp"

namespace rateq {

using Json = nlohmann::json;

inline Json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("parse error in '" + path + "': " + e.what());
  }
  return j;
}

/// Renormalizes when the total is within `tol` of 1, rejects otherwise.
inline Eigen::VectorXd renormalizePmf(Eigen::VectorXd p, double tol = 1e-9) {
  KahanSum s;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) throw Error("pmf entry " + std::to_string(i) + " is negative");
    s.add(p[i]);
  }
  double total = s.value();
  if (std::abs(total - 1.0) > tol)
    throw Error("pmf sums to " + std::to_string(total) + ", outside the 1e-9 tolerance");
  return p / total;
}

inline Eigen::VectorXd toVector(const Json& arr, const std::string& what) {
  if (!arr.is_array()) throw Error(what + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

/// Source file: {"alphabets":{"x":..,"y":..,"z":..,"e":..}, "pmf":[...]} with
/// the flat array row-major in (x,y,z,e); or the two-part form
/// {"alphabets":..., "pxyz":[...], "e_given_y":[[...],...]} which composes
/// the eavesdropper observation through P(e|y). |E| = 1 means no eavesdropper.
inline JointDist loadSource(const std::string& path) {
  Json j = readJsonFile(path);
  if (!j.contains("alphabets")) throw Error("'" + path + "': missing \"alphabets\"");
  const Json& al = j["alphabets"];
  for (const char* k : {"x", "y", "z", "e"})
    if (!al.contains(k)) throw Error("'" + path + "': alphabets must name x,y,z,e");
  AxisVec axes{{"x", al["x"].get<Eigen::Index>()},
               {"y", al["y"].get<Eigen::Index>()},
               {"z", al["z"].get<Eigen::Index>()},
               {"e", al["e"].get<Eigen::Index>()}};

  if (j.contains("pmf")) {
    Eigen::VectorXd p = toVector(j["pmf"], "pmf");
    if (p.size() != stateCount(axes))
      throw Error("'" + path + "': pmf length " + std::to_string(p.size()) +
                  " does not match alphabets");
    return makeJoint(axes, renormalizePmf(std::move(p)));
  }
  if (j.contains("pxyz") && j.contains("e_given_y")) {
    AxisVec xyz{axes[0], axes[1], axes[2]};
    Eigen::VectorXd p = toVector(j["pxyz"], "pxyz");
    if (p.size() != stateCount(xyz)) throw Error("'" + path + "': pxyz length mismatch");
    JointDist pxyz = makeJoint(xyz, renormalizePmf(std::move(p)));
    const Json& rows = j["e_given_y"];
    if (!rows.is_array() || rows.size() != static_cast<size_t>(axes[1].size))
      throw Error("'" + path + "': e_given_y needs one row per y symbol");
    Eigen::MatrixXd m(axes[1].size, axes[3].size);
    for (Eigen::Index y = 0; y < axes[1].size; ++y) {
      Eigen::VectorXd row = toVector(rows[static_cast<size_t>(y)], "e_given_y row");
      if (row.size() != axes[3].size) throw Error("'" + path + "': e_given_y row length mismatch");
      m.row(y) = row.transpose();
    }
    Channel ch = makeChannel({axes[1]}, axes[3], normalizeRows(std::move(m)));
    return composeMarkov(pxyz, ch);
  }
  throw Error("'" + path + "': need either \"pmf\" or \"pxyz\"+\"e_given_y\"");
}

/// Channel file: {"from":["y"], "to":"u", "size":K, "rows":[[...],...]} with
/// rows indexed row-major over the from axes.
inline Channel loadChannel(const std::string& path, const JointDist& src) {
  Json j = readJsonFile(path);
  for (const char* k : {"from", "to", "size", "rows"})
    if (!j.contains(k)) throw Error("'" + path + "': channel file missing \"" + k + "\"");
  AxisVec from;
  for (const auto& nm : j["from"]) {
    std::string name = nm.get<std::string>();
    from.push_back(src.axes[findAxis(src.axes, name)]);
  }
  Axis to{j["to"].get<std::string>(), j["size"].get<Eigen::Index>()};
  const Json& rows = j["rows"];
  Eigen::Index nr = stateCount(from);
  if (!rows.is_array() || rows.size() != static_cast<size_t>(nr))
    throw Error("'" + path + "': expected " + std::to_string(nr) + " rows");
  Eigen::MatrixXd m(nr, to.size);
  for (Eigen::Index r = 0; r < nr; ++r) {
    Eigen::VectorXd row = toVector(rows[static_cast<size_t>(r)], "channel row");
    if (row.size() != to.size) throw Error("'" + path + "': row length mismatch");
    m.row(r) = row.transpose();
  }
  return makeChannel(std::move(from), to, normalizeRows(std::move(m)));
}

inline Json channelToJson(const Channel& ch) {
  Json j;
  Json from = Json::array();
  for (const Axis& a : ch.from) from.push_back(a.name);
  j["from"] = from;
  j["to"] = ch.to.name;
  j["size"] = ch.to.size;
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < ch.rows.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < ch.rows.cols(); ++c) row.push_back(ch.rows(r, c));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

using CsvCell = std::variant<std::string, double, std::int64_t>;
using CsvRow = std::vector<CsvCell>;

/// Nine significant digits, '.' decimal separator, locale independent.
inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::string csvEscape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// RFC-4180-style CSV with a header row. I/O failures surface the path.
inline void emitCsv(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<CsvRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << csvEscape(header[i]);
  }
  out << '\n';
  for (const CsvRow& row : rows) {
    if (row.size() != header.size()) throw Error("csv row does not match schema");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (const auto* s = std::get_if<std::string>(&row[i]))
        out << csvEscape(*s);
      else if (const auto* d = std::get_if<double>(&row[i]))
        out << fmt9(*d);
      else
        out << std::get<std::int64_t>(row[i]);
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw Error("write failure on '" + path + "'");
}

}  // namespace rateq
