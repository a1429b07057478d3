#ifndef KDSIM_ERRORS_HPP
#define KDSIM_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kdsim {

// One validation finding, addressed by a config path such as
// "beams[0].waist_nm".
struct Diagnostic {
  std::string path;
  std::string message;
};

inline std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "; ";
    out += d.path + ": " + d.message;
  }
  return out;
}

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<Diagnostic> diags)
      : std::runtime_error("invalid configuration: " + join_diagnostics(diags)),
        diagnostics(std::move(diags)) {}
  ConfigError(const std::string& path, const std::string& message)
      : ConfigError(std::vector<Diagnostic>{{path, message}}) {}
  std::vector<Diagnostic> diagnostics;
};

class NumericError : public std::runtime_error {
public:
  NumericError(const std::string& what, long step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step(step) {}
  long step;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace kdsim

#endif
