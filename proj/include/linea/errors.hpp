#pragma once

#include <stdexcept>
#include <string>

namespace linea {

/// Base class for all numerical failure modes in this library. The `code()`
/// string is stable and machine-readable (used by the CLI error field).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct NonConvergence : Error {
    explicit NonConvergence(const std::string& what)
        : Error("NonConvergence", what) {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& what)
        : Error("BudgetExceeded", what) {}
};

struct PostcriticalQuery : Error {
    explicit PostcriticalQuery(const std::string& what)
        : Error("PostcriticalQuery", what) {}
};

struct NotRepelling : Error {
    explicit NotRepelling(const std::string& what)
        : Error("NotRepelling", what) {}
};

struct DegenerateRadius : Error {
    explicit DegenerateRadius(const std::string& what)
        : Error("DegenerateRadius", what) {}
};

struct OverflowEscape : Error {
    explicit OverflowEscape(const std::string& what)
        : Error("OverflowEscape", what) {}
};

struct InsufficientGrowth : Error {
    explicit InsufficientGrowth(const std::string& what)
        : Error("InsufficientGrowth", what) {}
};

struct SingularQuery : Error {
    explicit SingularQuery(const std::string& what)
        : Error("SingularQuery", what) {}
};

struct SiegelValidationFailed : Error {
    explicit SiegelValidationFailed(const std::string& what)
        : Error("SiegelValidationFailed", what) {}
};

struct PoleHit : Error {
    explicit PoleHit(const std::string& what) : Error("PoleHit", what) {}
};

struct ZeroSample : Error {
    explicit ZeroSample(const std::string& what) : Error("ZeroSample", what) {}
};

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t position)
        : Error("ParseError", what + " (at position " + std::to_string(position) + ")"),
          position(position) {}
    std::size_t position;
};

} // namespace linea
