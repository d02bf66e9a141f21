/*
 * Copyright 2026 The bosonkey Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BOSONKEY_ERRORS_HPP
#define BOSONKEY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bosonkey {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An argument is outside the mathematical domain of the operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// The request is valid but exceeds a configured size or memory cap.
class ResourceError : public Error {
  public:
    using Error::Error;
};

/// A bound or formula is requested outside the regime where it is claimed.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// Not enough dit material to derive a key of the requested strength.
class InsufficientEntropyError : public Error {
  public:
    using Error::Error;
};

/// A protocol step references state that does not exist (e.g. a missing key index).
class ProtocolError : public Error {
  public:
    using Error::Error;
};

/// The key store has no live records left.
class StoreEmptyError : public Error {
  public:
    using Error::Error;
};

/// Socket-level failure talking to a remote endpoint.
class TransportError : public Error {
  public:
    using Error::Error;
};

} // namespace bosonkey

#endif
