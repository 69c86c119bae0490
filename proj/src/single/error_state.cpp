#include "sdv/single/error_state.hpp"

#include <algorithm>

#include "sdv/core/errors.hpp"

namespace sdv {

std::string Triple::to_string() const {
  return std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k);
}

ErrorStateVector::ErrorStateVector(std::size_t reference, std::vector<bool> bits)
    : reference_(reference), bits_(std::move(bits)) {
  if (reference < 2) throw DomainError("error state needs a reference index >= 2");
  if (bits_.size() != length_for(reference))
    throw DomainError("error state length " + std::to_string(bits_.size()) +
                      " does not match reference " + std::to_string(reference));
}

std::vector<Triple> ErrorStateVector::triples(std::size_t reference) {
  std::vector<Triple> out;
  for (std::size_t i = 0; i < reference; ++i) {
    for (std::size_t j = i + 1; j < reference; ++j) out.push_back({i, j, reference});
  }
  return out;
}

std::size_t ErrorStateVector::position(std::size_t i, std::size_t j, std::size_t reference) {
  if (!(i < j && j < reference)) throw DomainError("invalid sensor pair for error state");
  // Pairs before row i: sum_{r<i} (reference - 1 - r).
  return i * (2 * reference - i - 1) / 2 + (j - i - 1);
}

bool ErrorStateVector::pair(std::size_t a, std::size_t b) const {
  return bits_[position(std::min(a, b), std::max(a, b), reference_)];
}

bool ErrorStateVector::all_zero() const noexcept {
  return std::none_of(bits_.begin(), bits_.end(), [](bool b) { return b; });
}

bool ErrorStateVector::all_one() const noexcept {
  return std::all_of(bits_.begin(), bits_.end(), [](bool b) { return b; });
}

std::string ErrorStateVector::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (i) s += ',';
    s += bits_[i] ? '1' : '0';
  }
  return s + "]";
}

ErrorStateVector predict_error_state(const SensorStateVector& s) {
  if (s.size() < 3) throw DomainError("error state prediction needs at least three sensors");
  const std::size_t n = s.size() - 1;
  std::vector<bool> bits;
  bits.reserve(ErrorStateVector::length_for(n));
  for (const Triple& t : ErrorStateVector::triples(n)) bits.push_back(s[t.i] || s[t.j] || s[n]);
  return ErrorStateVector(n, std::move(bits));
}

}  // namespace sdv
