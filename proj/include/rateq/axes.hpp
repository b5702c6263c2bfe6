#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace rateq {

/// One named coordinate of a joint distribution, e.g. {"y", 2}.
struct Axis {
  std::string name;
  Eigen::Index size = 0;
};

inline bool operator==(const Axis& a, const Axis& b) {
  return a.name == b.name && a.size == b.size;
}

using AxisVec = std::vector<Axis>;
using NameVec = std::vector<std::string>;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline Eigen::Index findAxis(const AxisVec& axes, const std::string& name) {
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(axes.size()); ++i)
    if (axes[i].name == name) return i;
  throw Error("unknown axis '" + name + "'");
}

inline bool hasAxis(const AxisVec& axes, const std::string& name) {
  return std::any_of(axes.begin(), axes.end(),
                     [&](const Axis& a) { return a.name == name; });
}

/// Total state count, guarded against overflow.
inline Eigen::Index stateCount(const AxisVec& axes) {
  Eigen::Index n = 1;
  for (const Axis& a : axes) {
    if (a.size < 1) throw Error("axis '" + a.name + "' has size < 1");
    if (n > (std::numeric_limits<Eigen::Index>::max)() / a.size)
      throw Error("state count overflow");
    n *= a.size;
  }
  return n;
}

/// Row-major strides: the last axis varies fastest.
inline std::vector<Eigen::Index> rowMajorStrides(const AxisVec& axes) {
  std::vector<Eigen::Index> s(axes.size(), 1);
  for (Eigen::Index i = static_cast<Eigen::Index>(axes.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * axes[i + 1].size;
  return s;
}

inline void unravel(Eigen::Index flat, const AxisVec& axes,
                    std::vector<Eigen::Index>& coords) {
  coords.resize(axes.size());
  for (Eigen::Index i = static_cast<Eigen::Index>(axes.size()) - 1; i >= 0; --i) {
    coords[i] = flat % axes[i].size;
    flat /= axes[i].size;
  }
}

inline Eigen::Index ravel(const std::vector<Eigen::Index>& coords,
                          const std::vector<Eigen::Index>& strides) {
  Eigen::Index flat = 0;
  for (size_t i = 0; i < coords.size(); ++i) flat += coords[i] * strides[i];
  return flat;
}

/// Indices of `names` within `axes`, rejecting duplicates.
inline std::vector<Eigen::Index> axisIndices(const AxisVec& axes, const NameVec& names) {
  std::vector<Eigen::Index> out;
  out.reserve(names.size());
  for (const std::string& n : names) {
    Eigen::Index i = findAxis(axes, n);
    if (std::find(out.begin(), out.end(), i) != out.end())
      throw Error("duplicate axis '" + n + "'");
    out.push_back(i);
  }
  return out;
}

inline bool disjointNames(const NameVec& a, const NameVec& b) {
  for (const std::string& x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return false;
  return true;
}

inline NameVec unionNames(const NameVec& a, const NameVec& b) {
  NameVec out = a;
  for (const std::string& x : b)
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  return out;
}

}  // namespace rateq
