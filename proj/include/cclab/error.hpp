#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cclab {

/// Machine-readable failure categories. The string form is what the CLI
/// writes into its error JSON.
enum class ErrorCode {
  InvalidArgument,
  SingularMaterial,
  Resonance,
  Inadmissible,
  InadmissibleJump,
  IncompatibleData,
  Solver,
  DegeneratePower,
  DegenerateData,
  Calibration,
  Generation,
  Config,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::SingularMaterial: return "singular-material";
    case ErrorCode::Resonance: return "resonance";
    case ErrorCode::Inadmissible: return "inadmissible";
    case ErrorCode::InadmissibleJump: return "inadmissible-jump";
    case ErrorCode::IncompatibleData: return "incompatible-data";
    case ErrorCode::Solver: return "solver";
    case ErrorCode::DegeneratePower: return "degenerate-power";
    case ErrorCode::DegenerateData: return "degenerate-data";
    case ErrorCode::Calibration: return "calibration";
    case ErrorCode::Generation: return "generation";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view reason() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

}  // namespace cclab
