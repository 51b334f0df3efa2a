#pragma once

#include <stdexcept>
#include <string>

namespace quenchlab {

// bad config / parameters / preconditions -> CLI exit 2
struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// solver non-convergence, integration failure -> CLI exit 3
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}
