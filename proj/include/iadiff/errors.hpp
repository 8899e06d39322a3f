#pragma once

#include <stdexcept>
#include <string>

namespace iadiff {

/// Unusable input data: malformed image files, mismatched dimensions,
/// undefined metrics (e.g. PSNR of identical images).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: non-finite values, violated time-step bound.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace iadiff
