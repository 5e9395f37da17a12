#pragma once

#include <stdexcept>
#include <string>

namespace affectlens {

// All recoverable failures carry a stable machine-parsable code next to the
// human-readable message. The CLI prints them as "CODE: message".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace affectlens
