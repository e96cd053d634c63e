#include "percolate/core.hpp"

#include <algorithm>

namespace percolate {

std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

UserId::UserId(std::string_view value) : value_(trim(value)) {
  if (value_.empty()) throw ParseError("user id must be non-empty");
}

MemberSet make_member_set(std::vector<UserId> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return members;
}

std::size_t intersection_size(std::span<const UserId> a, std::span<const UserId> b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

std::size_t union_size(std::span<const UserId> a, std::span<const UserId> b) {
  return a.size() + b.size() - intersection_size(a, b);
}

bool is_subset(std::span<const UserId> sub, std::span<const UserId> super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

}  // namespace percolate
