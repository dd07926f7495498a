#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace stil {

/// Domain error carrying a stable machine-readable code (e.g. "no-encoding",
/// "self-intersection") plus free-form detail.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string code, std::string detail = {})
      : std::runtime_error(detail.empty() ? code : code + ": " + detail),
        code_(std::move(code)),
        detail_(std::move(detail)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string code_;
  std::string detail_;
};

}  // namespace stil
