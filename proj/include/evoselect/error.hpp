#pragma once

#include <stdexcept>
#include <string>

namespace evoselect {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DataError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class TrainingError : public Error {
  public:
    using Error::Error;
};

/// A population evaluation failed; carries the offending member.
class EvaluationError : public Error {
  public:
    EvaluationError(std::size_t member_index, const std::string& what)
        : Error("member " + std::to_string(member_index) + ": " + what), member_index_(member_index),
          detail_(what) {}

    [[nodiscard]] std::size_t member_index() const noexcept { return member_index_; }
    /// Message without the member prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

  private:
    std::size_t member_index_;
    std::string detail_;
};

} // namespace evoselect
