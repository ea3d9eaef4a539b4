#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rnforms/linalg.hpp"

namespace rnforms {

/// Mathematical evidence attached to a negative answer: a vector of the
/// underlying space (or algebra element, in basis coordinates) and/or a set
/// of atom indices.
struct Witness {
    std::string description;
    Vector vector;
    std::vector<std::size_t> atoms;
};

/**
 * @brief A computation whose preconditions fail for a mathematical reason
 * (e.g. the forms are not absolutely continuous). Always carries a witness.
 */
class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& what, Witness witness)
        : std::runtime_error(what), witness_(std::move(witness)) {}

    const Witness& witness() const { return witness_; }

private:
    Witness witness_;
};

}  // namespace rnforms
