#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace reduct {

// A finite set of natural numbers, viewed as a bit string. The length of the
// string is 1 plus the largest element, or 0 for the empty set, so the top
// bit of any nonempty value is always 1. Stored as a bit vector trimmed of
// trailing zeros; bit(t) is total and returns false beyond the length.
class StringValue {
 public:
  StringValue() = default;

  static StringValue from_elements(const std::vector<uint64_t>& elems);
  // Interprets v[i] as membership of i; trailing zeros are trimmed.
  static StringValue from_bits(std::vector<bool> v);
  // Parses a string of '0'/'1' characters, character i giving bit i.
  static StringValue parse01(std::string_view s);

  uint64_t length() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool bit(uint64_t t) const { return t < bits_.size() && bits_[t]; }

  void insert(uint64_t e);
  void erase(uint64_t e);
  // Membership toggle, re-trimming if the top element is removed.
  void flip(uint64_t e);

  const std::vector<bool>& bits() const { return bits_; }
  std::vector<uint64_t> elements() const;
  std::string to01() const;

  bool operator==(const StringValue& o) const { return bits_ == o.bits_; }
  bool operator!=(const StringValue& o) const { return bits_ != o.bits_; }

 private:
  std::vector<bool> bits_;
  void trim();
};

}  // namespace reduct
