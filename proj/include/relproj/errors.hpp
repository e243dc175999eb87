#pragma once

#include <stdexcept>
#include <string>

namespace relproj {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File or record does not match one of the documented formats.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Query token absent from an embedding model's vocabulary. Kept distinct so
// the evaluation layer can count these separately instead of failing.
class OovError : public Error {
 public:
  explicit OovError(const std::string& token)
      : Error("token not in vocabulary: " + token), token_(token) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// Normal equations are singular and no ridge was requested.
class RankError : public Error {
 public:
  using Error::Error;
};

}  // namespace relproj
