#pragma once

#include <stdexcept>
#include <string>

namespace pmc {

// Error taxonomy matches the CLI exit codes: parse 2, precision 3,
// precondition 4, internal defect 5.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& m) : std::runtime_error(m) {}
};

struct precision_error : std::runtime_error {
    explicit precision_error(const std::string& m) : std::runtime_error(m) {}
};

struct precondition_error : std::runtime_error {
    explicit precondition_error(const std::string& m) : std::runtime_error(m) {}
};

struct internal_error : std::runtime_error {
    explicit internal_error(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace pmc
