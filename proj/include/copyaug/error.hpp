// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace copyaug {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (shape mismatch, bad extent, ...).
class ContractError : public Error {
public:
  using Error::Error;
};

/// Input bytes do not describe what they claim to (length mismatch, bad record).
class MalformedInput : public Error {
public:
  using Error::Error;
};

/// Well-formed input in a variant we deliberately do not support.
class UnsupportedFormat : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string &message) {
  if (!condition)
    throw ContractError(message);
}

} // namespace detail
} // namespace copyaug
