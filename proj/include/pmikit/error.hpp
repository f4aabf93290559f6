#pragma once

#include <stdexcept>
#include <string>

namespace pmikit {

// Error buckets; the CLI maps them to exit codes (usage=2, data=3, io=4).
enum class ErrorKind { usage = 2, data = 3, io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Bad arguments, invalid configuration, dimension mismatches.
struct UsageError : Error {
  explicit UsageError(const std::string& m) : Error(ErrorKind::usage, m) {}
};

// A token or word id that is not part of the vocabulary.
struct VocabularyError : Error {
  explicit VocabularyError(const std::string& m) : Error(ErrorKind::data, m) {}
};

// A probability that must be positive is zero (undefined log).
struct PositivityError : Error {
  explicit PositivityError(const std::string& m) : Error(ErrorKind::data, m) {}
};

// A request exceeds a structural limit (set larger than the window,
// matrix larger than the memory budget).
struct CapacityError : Error {
  explicit CapacityError(const std::string& m) : Error(ErrorKind::usage, m) {}
};

struct EmptyCorpusError : Error {
  explicit EmptyCorpusError(const std::string& m) : Error(ErrorKind::data, m) {}
};

// Malformed UTF-8 in corpus input.
struct DecodeError : Error {
  explicit DecodeError(const std::string& m) : Error(ErrorKind::data, m) {}
};

struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorKind::io, m) {}
};

// Unrecognized or mismatched persisted-file format/version.
struct FormatError : Error {
  explicit FormatError(const std::string& m) : Error(ErrorKind::io, m) {}
};

// Rank-deficient context matrix in a least-squares projection.
struct SingularityError : Error {
  explicit SingularityError(const std::string& m) : Error(ErrorKind::data, m) {}
};

// Numerical routine failed to converge.
struct NumericalError : Error {
  explicit NumericalError(const std::string& m) : Error(ErrorKind::data, m) {}
};

struct TrainingError : Error {
  explicit TrainingError(const std::string& m) : Error(ErrorKind::data, m) {}
};

// A search yielded no admissible candidate.
struct SearchError : Error {
  explicit SearchError(const std::string& m) : Error(ErrorKind::data, m) {}
};

}  // namespace pmikit
