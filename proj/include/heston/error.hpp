#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace heston {

// Machine-readable failure classes. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
    InvalidArgument,
    InfeasibleParams,
    EstimationSingular,
    Numerical,
    Domain,
    Io,
    Parse,
};

std::string_view category_name(ErrorCategory category);
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

}  // namespace heston
