// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sparsearch {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation (empty batch, d <= 0, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

// A tensor cannot carry the requested sparsity structure.
class StructureError : public Error {
public:
  using Error::Error;
};

class SequencingError : public Error {
public:
  using Error::Error;
};

class LookupError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

// Pearson correlation undefined because one series has zero variance.
class CorrelationError : public Error {
public:
  using Error::Error;
};

class ComparisonError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class NumericError : public Error {
public:
  using Error::Error;
};

}  // namespace sparsearch
