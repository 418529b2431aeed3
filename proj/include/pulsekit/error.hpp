#pragma once

#include <stdexcept>
#include <string>

namespace pulsekit {

// Error categories map onto CLI exit codes: usage 2, data 3, schema 4.
enum class ErrorKind { usage, data, schema };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) {
  return Error(ErrorKind::usage, what);
}
inline Error data_error(const std::string& what) {
  return Error(ErrorKind::data, what);
}
inline Error schema_error(const std::string& what) {
  return Error(ErrorKind::schema, what);
}

}  // namespace pulsekit
