#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sepsell {

enum class ErrorKind {
  BadParams,
  NoDensity,
  ZeroDensity,
  Unreachable,
  UnsupportedRepresentation,
  Infinite,
  QOutOfRange,
  BadOrdering,
  DimMismatch,
  IterationLimit,
  Degenerate,
  Parse,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::NoDensity: return "NoDensity";
    case ErrorKind::ZeroDensity: return "ZeroDensity";
    case ErrorKind::Unreachable: return "Unreachable";
    case ErrorKind::UnsupportedRepresentation: return "UnsupportedRepresentation";
    case ErrorKind::Infinite: return "Infinite";
    case ErrorKind::QOutOfRange: return "QOutOfRange";
    case ErrorKind::BadOrdering: return "BadOrdering";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::IterationLimit: return "IterationLimit";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace sepsell
