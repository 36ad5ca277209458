#pragma once

#include <stdexcept>
#include <string>

namespace wqisa {

// Every library failure carries a stable kebab-case code that the CLI
// forwards verbatim into its JSON error object.
class error : public std::runtime_error {
 public:
  error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
  throw error(code, message);
}

}  // namespace wqisa
