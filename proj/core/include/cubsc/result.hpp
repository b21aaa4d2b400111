#pragma once

#include <string>
#include <variant>

namespace cubsc {

/// Structured operation failure; `kind` is a stable machine-readable tag.
struct Error {
  std::string kind;
  std::string detail;
};

template <class T>
using Result = std::variant<T, Error>;

template <class T>
bool ok(const Result<T>& r) {
  return r.index() == 0;
}
template <class T>
const T& value(const Result<T>& r) {
  return std::get<0>(r);
}
template <class T>
T& value(Result<T>& r) {
  return std::get<0>(r);
}
template <class T>
const Error& error(const Result<T>& r) {
  return std::get<1>(r);
}

}  // namespace cubsc
