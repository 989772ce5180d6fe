#pragma once

#include <stdexcept>
#include <string>

namespace mrhet {

// Two failure families. The CLI maps ValidationError to exit code 2 and
// NumericalError to exit code 3; what() always starts with the error name.
class ValidationError : public std::runtime_error {
public:
  ValidationError(const std::string& name, const std::string& detail)
      : std::runtime_error(name + ": " + detail), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& name, const std::string& detail)
      : std::runtime_error(name + ": " + detail), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

struct MissingColumn : ValidationError {
  explicit MissingColumn(const std::string& d) : ValidationError("MissingColumn", d) {}
};
struct NonPositiveSE : ValidationError {
  explicit NonPositiveSE(const std::string& d) : ValidationError("NonPositiveSE", d) {}
};
struct DuplicateSnp : ValidationError {
  explicit DuplicateSnp(const std::string& d) : ValidationError("DuplicateSnp", d) {}
};
struct TooFewSnps : ValidationError {
  explicit TooFewSnps(const std::string& d) : ValidationError("TooFewSnps", d) {}
};
struct UnknownSnp : ValidationError {
  explicit UnknownSnp(const std::string& d) : ValidationError("UnknownSnp", d) {}
};
struct ZeroExposureBeta : ValidationError {
  explicit ZeroExposureBeta(const std::string& d) : ValidationError("ZeroExposureBeta", d) {}
};
struct EmptyInput : ValidationError {
  explicit EmptyInput(const std::string& d) : ValidationError("EmptyInput", d) {}
};
struct InvalidDf : ValidationError {
  explicit InvalidDf(const std::string& d) : ValidationError("InvalidDf", d) {}
};
struct InvalidP : ValidationError {
  explicit InvalidP(const std::string& d) : ValidationError("InvalidP", d) {}
};
struct InvalidArgument : ValidationError {
  explicit InvalidArgument(const std::string& d) : ValidationError("InvalidArgument", d) {}
};
struct ParseError : ValidationError {
  explicit ParseError(const std::string& d) : ValidationError("ParseError", d) {}
};

struct RankDeficient : NumericalError {
  explicit RankDeficient(const std::string& d) : NumericalError("RankDeficient", d) {}
};

}  // namespace mrhet
