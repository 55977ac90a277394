#pragma once

#include <charconv>
#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vnle {

/// Symbolic identity of an eigenvalue: the level where it is born, the value
/// it is born with, and the inverse branch taken at every later level.
struct BranchPath {
  int birth_level = 1;
  int seed = 0;
  std::vector<int> branches;  // each in {1, 2, 3}

  /// Level of the graph the path ends on.
  int level() const { return birth_level + static_cast<int>(branches.size()); }

  /// True when the running value stays 0 through the first `upto` branches.
  bool zero_through(std::size_t upto) const {
    if (seed != 0) return false;
    for (std::size_t i = 0; i < upto && i < branches.size(); ++i) {
      if (branches[i] != 1) return false;
    }
    return true;
  }

  bool is_constant() const { return zero_through(branches.size()); }

  /// Same path continued by one more branch.
  BranchPath then(int branch) const {
    BranchPath p = *this;
    p.branches.push_back(branch);
    return p;
  }

  /// Path continued by phi_1 up to `target` level.
  BranchPath continued_to(int target) const {
    BranchPath p = *this;
    while (p.level() < target) p.branches.push_back(1);
    return p;
  }

  void validate() const {
    if (birth_level < 1) throw std::invalid_argument("birth level must be >= 1");
    if (birth_level == 1) {
      if (seed != 0 && seed != 1 && seed != 3 && seed != 5) {
        throw std::invalid_argument("level-1 seed must be one of 0, 1, 3, 5");
      }
    } else if (seed != 1 && seed != 3) {
      throw std::invalid_argument("seed born above level 1 must be 1 or 3");
    }
    for (std::size_t i = 0; i < branches.size(); ++i) {
      const int b = branches[i];
      if (b < 1 || b > 3) throw std::invalid_argument("branch index must be 1, 2 or 3");
      if (b == 2 && zero_through(i)) {
        throw std::invalid_argument("eigenvalue 0 only extends by branches 1 and 3");
      }
    }
  }

  /// `seed@birth:i,i,i`; the branch list may be empty.
  std::string to_string() const {
    std::string s = std::to_string(seed) + "@" + std::to_string(birth_level) + ":";
    for (std::size_t i = 0; i < branches.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(branches[i]);
    }
    return s;
  }

  std::string branch_string() const {
    std::string s;
    for (std::size_t i = 0; i < branches.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(branches[i]);
    }
    return s;
  }

  friend bool operator==(const BranchPath&, const BranchPath&) = default;
  friend auto operator<=>(const BranchPath& a, const BranchPath& b) {
    if (auto c = a.birth_level <=> b.birth_level; c != 0) return c;
    if (auto c = a.seed <=> b.seed; c != 0) return c;
    return a.branches <=> b.branches;
  }
};

namespace detail {
inline int parse_int(std::string_view text, std::string_view what) {
  int v = 0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || p != end || text.empty()) {
    throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}
}  // namespace detail

inline BranchPath parse_branch_path(std::string_view text) {
  const auto at = text.find('@');
  if (at == std::string_view::npos) {
    throw std::invalid_argument("branch path needs the form seed@birth:i,i,...");
  }
  BranchPath p;
  p.seed = detail::parse_int(text.substr(0, at), "seed");
  auto rest = text.substr(at + 1);
  const auto colon = rest.find(':');
  p.birth_level = detail::parse_int(rest.substr(0, colon), "birth level");
  if (colon != std::string_view::npos) {
    auto list = rest.substr(colon + 1);
    while (!list.empty()) {
      const auto comma = list.find(',');
      p.branches.push_back(detail::parse_int(list.substr(0, comma), "branch"));
      if (comma == std::string_view::npos) break;
      list = list.substr(comma + 1);
      if (list.empty()) throw std::invalid_argument("trailing comma in branch list");
    }
  }
  p.validate();
  return p;
}

}  // namespace vnle
