#pragma once

// Error types shared by every module. Each error carries a category that the
// CLI maps onto its exit code.

#include <stdexcept>
#include <string>

namespace esn_memory {

enum class ErrorCategory { config, numerical, io };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category)
    {
    }

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Shapes that do not fit together (non-square, length mismatch).
struct DimensionError : Error {
    explicit DimensionError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

/// Eigendecomposition failed its reconstruction check (defective matrix).
struct DecompositionError : Error {
    explicit DecompositionError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

struct SingularSystemError : Error {
    explicit SingularSystemError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

/// Spectral radius >= 1 or a state trajectory that left the finite range.
struct DivergenceError : Error {
    explicit DivergenceError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

struct AlignmentError : Error {
    explicit AlignmentError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

struct DegenerateError : Error {
    explicit DegenerateError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

/// Bad argument to an operation (out-of-range lambda, zero length, ...).
struct ParameterError : Error {
    explicit ParameterError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

/// Invalid experiment configuration; `field` names the offending entry.
struct ConfigError : Error {
    ConfigError(std::string field, const std::string& what)
      : Error(ErrorCategory::config, field + ": " + what), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct IoError : Error {
    IoError(std::string path, const std::string& what)
      : Error(ErrorCategory::io, path + ": " + what), path_(std::move(path))
    {
    }

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

inline int exit_code(ErrorCategory category) noexcept
{
    switch (category) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::numerical: return 3;
    case ErrorCategory::io: return 4;
    }
    return 1;
}

}  // namespace esn_memory
