#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace stiefel_kn {

/// Base class of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible with the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the set where the operation is defined
/// (non-orthonormal point, indefinite matrix, maps evaluated too far apart).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Thin QR met a column that is numerically dependent on the previous ones.
class RankDeficientError : public DomainError {
 public:
  RankDeficientError(const std::string& what, std::size_t column)
      : DomainError(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// A matrix failed the orthonormality check of a Stiefel point.
class NotOnManifoldError : public DomainError {
 public:
  NotOnManifoldError(const std::string& what, double defect)
      : DomainError(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// A domain violation raised inside the averaging loop; carries the
/// iteration and (when attributable) the sample that triggered it.
class AveragingDomainError : public DomainError {
 public:
  AveragingDomainError(const std::string& what, std::size_t iteration,
                       std::optional<std::size_t> sample)
      : DomainError(what), iteration_(iteration), sample_(sample) {}
  std::size_t iteration() const noexcept { return iteration_; }
  std::optional<std::size_t> sample() const noexcept { return sample_; }

 private:
  std::size_t iteration_;
  std::optional<std::size_t> sample_;
};

/// A retraction/lifting combination that is not supported.
class UnsupportedPairError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; line and column are 1-based.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace stiefel_kn
