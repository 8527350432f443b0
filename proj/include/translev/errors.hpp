#ifndef TRANSLEV_ERRORS_HPP
#define TRANSLEV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace translev {

// Aligned with the translev_status codes of the C API.
enum class ErrorCode {
  tolerance = 1,
  config = 2,
  invalid_input = 3,
  numeric = 4,
  io = 5,
  unsupported = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorCode::invalid_input, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
  throw Error(ErrorCode::numeric, msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorCode::config, msg);
}
[[noreturn]] inline void throw_unsupported(const std::string& msg) {
  throw Error(ErrorCode::unsupported, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error(ErrorCode::io, msg);
}

}  // namespace translev

#endif
