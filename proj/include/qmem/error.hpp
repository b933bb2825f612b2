// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qmem {

//! Invalid or inconsistent model parameters, or a formula used outside its
//! regime of validity.
class DomainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Malformed scenario / tag file content or unknown configuration keys.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Filesystem failures (open, read, write).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw DomainError(what);
}
}  // namespace detail

}  // namespace qmem
