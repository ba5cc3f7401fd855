#include "bandsel/error.hpp"

namespace bandsel {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::corrupt_file: return "corrupt-file";
    case ErrorCode::unsupported_format: return "unsupported-format";
    case ErrorCode::invalid_data: return "invalid-data";
    case ErrorCode::not_overcomplete: return "not-overcomplete";
    case ErrorCode::degenerate_input: return "degenerate-input";
    case ErrorCode::insufficient_class_samples: return "insufficient-class-samples";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace bandsel
