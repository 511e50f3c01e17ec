#pragma once

#include <stdexcept>
#include <string>

namespace qgp {

// Error taxonomy shared by the library and the CLI exit-code mapping:
//   ValidationError -> exit 2, ResourceError -> exit 3, NumericalError -> exit 4.

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, std::uint64_t required_bytes = 0)
        : std::runtime_error(what), required_bytes_(required_bytes) {}
    std::uint64_t required_bytes() const { return required_bytes_; }

private:
    std::uint64_t required_bytes_ = 0;
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qgp
