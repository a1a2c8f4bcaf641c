#ifndef TSL0_ERRORS_HPP
#define TSL0_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsl0 {

/// Shape or mode-index mismatch between operands.
class dimension_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A Gram matrix turned out numerically singular (dictionary lacks full row rank).
class singular_gram_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Refusal to materialize a matrix above the configured element cap.
/// Carries the would-be element count so callers can report it.
class element_cap_error : public std::runtime_error {
public:
    element_cap_error(std::string what, std::string would_be_elements)
        : std::runtime_error(std::move(what)),
          would_be_elements_(std::move(would_be_elements)) {}

    /// Decimal element count of the refused matrix (string: may exceed 64 bits).
    const std::string& would_be_elements() const { return would_be_elements_; }

private:
    std::string would_be_elements_;
};

/// Malformed or unreadable tensor/matrix text file.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tsl0

#endif  // TSL0_ERRORS_HPP
