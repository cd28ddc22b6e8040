// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace pagezip
{

/// Base of every error thrown by the library.
class Error: public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Non-positive image dimensions, malformed preset, or other bad geometry.
class InvalidDimension: public Error
{
  public:
    using Error::Error;
};

/// A ratio whose denominator is zero (ICR/ECR with no visual tokens, zero baseline).
class UndefinedRatio: public Error
{
  public:
    using Error::Error;
};

/// An index or character interval outside its container.
class RangeError: public Error
{
  public:
    using Error::Error;
};

/// Bad user input: malformed JSONL/CSV, unknown preset, invalid sample.
class InputError: public Error
{
  public:
    using Error::Error;
};

/// A judge reply without a terminal [[YES]] / [[NO]] token.
class InvalidVerdict: public Error
{
  public:
    using Error::Error;
};

/// Transport or protocol failure talking to a model, judge or OCR endpoint.
class EndpointError: public Error
{
  public:
    EndpointError(std::string const& message, int httpStatus = 0):
        Error(message), _httpStatus(httpStatus)
    {
    }

    [[nodiscard]] int httpStatus() const noexcept { return _httpStatus; }
    [[nodiscard]] bool isAuthFailure() const noexcept { return _httpStatus == 401 || _httpStatus == 403; }

  private:
    int _httpStatus;
};

} // namespace pagezip
