#pragma once

#include <stdexcept>
#include <string>

namespace leccr {

// Category-tagged errors. The CLI maps categories to exit codes.
class error : public std::runtime_error {
public:
  error(std::string category, const std::string& msg)
      : std::runtime_error("error[" + category + "]: " + msg),
        category_(std::move(category)) {}
  const std::string& category() const { return category_; }

private:
  std::string category_;
};

struct shape_error : error {
  explicit shape_error(const std::string& msg) : error("shape", msg) {}
};

struct input_error : error {
  explicit input_error(const std::string& msg) : error("input", msg) {}
};

struct config_error : error {
  explicit config_error(const std::string& msg) : error("config", msg) {}
};

struct format_error : error {
  explicit format_error(const std::string& msg) : error("format", msg) {}
};

struct integrity_error : error {
  explicit integrity_error(const std::string& msg) : error("integrity", msg) {}
};

struct manifest_error : error {
  explicit manifest_error(const std::string& msg) : error("manifest", msg) {}
};

struct data_error : error {
  explicit data_error(const std::string& msg) : error("data", msg) {}
};

struct numeric_error : error {
  explicit numeric_error(const std::string& msg) : error("numeric", msg) {}
};

struct io_error : error {
  explicit io_error(const std::string& msg) : error("io", msg) {}
};

}  // namespace leccr
