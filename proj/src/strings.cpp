#include "reduct/strings.hpp"

#include "reduct/errors.hpp"

namespace reduct {

void StringValue::trim() {
  while (!bits_.empty() && !bits_.back()) bits_.pop_back();
}

StringValue StringValue::from_elements(const std::vector<uint64_t>& elems) {
  StringValue s;
  for (uint64_t e : elems) s.insert(e);
  return s;
}

StringValue StringValue::from_bits(std::vector<bool> v) {
  StringValue s;
  s.bits_ = std::move(v);
  s.trim();
  return s;
}

StringValue StringValue::parse01(std::string_view str) {
  std::vector<bool> v;
  v.reserve(str.size());
  for (size_t i = 0; i < str.size(); ++i) {
    char c = str[i];
    if (c == '0')
      v.push_back(false);
    else if (c == '1')
      v.push_back(true);
    else
      throw ParseError("expected '0' or '1' in bit string", i);
  }
  return from_bits(std::move(v));
}

void StringValue::insert(uint64_t e) {
  if (e >= bits_.size()) bits_.resize(e + 1, false);
  bits_[e] = true;
}

void StringValue::erase(uint64_t e) {
  if (e < bits_.size()) {
    bits_[e] = false;
    trim();
  }
}

void StringValue::flip(uint64_t e) {
  if (bit(e))
    erase(e);
  else
    insert(e);
}

std::vector<uint64_t> StringValue::elements() const {
  std::vector<uint64_t> out;
  for (uint64_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

std::string StringValue::to01() const {
  std::string s;
  s.reserve(bits_.size());
  for (bool b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace reduct
