#pragma once

#include <stdexcept>
#include <string>

namespace bandsel {

enum class ErrorCode {
  invalid_argument,
  corrupt_file,
  unsupported_format,
  invalid_data,
  not_overcomplete,
  degenerate_input,
  insufficient_class_samples,
  io,
};

const char* to_string(ErrorCode code);

// Base of every error the library raises. Catch this to handle any module
// failure; catch a CodedError alias to handle one kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <ErrorCode C>
class CodedError : public Error {
 public:
  explicit CodedError(const std::string& what) : Error(C, what) {}
};

using InvalidArgument = CodedError<ErrorCode::invalid_argument>;
using CorruptFile = CodedError<ErrorCode::corrupt_file>;
using UnsupportedFormat = CodedError<ErrorCode::unsupported_format>;
using InvalidData = CodedError<ErrorCode::invalid_data>;
using NotOvercomplete = CodedError<ErrorCode::not_overcomplete>;
using DegenerateInput = CodedError<ErrorCode::degenerate_input>;
using IoError = CodedError<ErrorCode::io>;

class InsufficientClassSamples : public Error {
 public:
  InsufficientClassSamples(int label, const std::string& what)
      : Error(ErrorCode::insufficient_class_samples, what), label_(label) {}

  int label() const noexcept { return label_; }

 private:
  int label_;
};

}  // namespace bandsel
