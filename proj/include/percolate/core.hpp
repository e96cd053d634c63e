#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace percolate {

/// Invalid configuration or CLI parameters. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function was called outside its mathematical domain (empty set, singleton group, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input record or file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs that cannot be meaningfully combined (e.g. comparing reports of different corpora).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Opaque, case-sensitive user identifier. Surrounding whitespace is trimmed on
// construction and the trimmed value must be non-empty.
class UserId {
 public:
  explicit UserId(std::string_view value);

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const UserId&, const UserId&) = default;
  friend std::strong_ordering operator<=>(const UserId& a, const UserId& b) {
    return a.value_.compare(b.value_) <=> 0;
  }

 private:
  std::string value_;
};

/// Sorted, duplicate-free member list. All set operations below assume this form.
using MemberSet = std::vector<UserId>;

MemberSet make_member_set(std::vector<UserId> members);

std::size_t intersection_size(std::span<const UserId> a, std::span<const UserId> b);
std::size_t union_size(std::span<const UserId> a, std::span<const UserId> b);
bool is_subset(std::span<const UserId> sub, std::span<const UserId> super);

std::string_view trim(std::string_view s) noexcept;

}  // namespace percolate

template <>
struct std::hash<percolate::UserId> {
  std::size_t operator()(const percolate::UserId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
