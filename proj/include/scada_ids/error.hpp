#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scada_ids {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value outside the domain of an operation (e.g. Normal has no category).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent dataset file. Carries the 1-based data row.
class LoadError : public Error {
public:
    LoadError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class ImputationError : public Error {
public:
    using Error::Error;
};

/// Splits or folds that do not form a partition, or a malformed model document.
class StructureError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

class PredictionError : public Error {
public:
    using Error::Error;
};

} // namespace scada_ids
