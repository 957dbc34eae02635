// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qsynth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A record in an input file violates the dataset contract.
class DataError : public Error {
 public:
  DataError(std::size_t record, const std::string& reason)
      : Error("record " + std::to_string(record) + ": " + reason), record_(record), reason_(reason) {}

  std::size_t record() const noexcept { return record_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t record_;
  std::string reason_;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what) : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsynth
