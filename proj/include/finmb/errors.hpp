#pragma once

#include <stdexcept>
#include <string>

namespace finmb {

// Bad inputs: unreadable files, malformed headers, invalid flag/config values.
// The CLI maps these to exit code 2.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Failures inside a computation: domain violations, degenerate fits,
// overflow of a stabilized sum. The CLI maps these to exit code 1.
class computation_error : public std::runtime_error {
public:
    explicit computation_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace finmb
