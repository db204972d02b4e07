#ifndef CONVSDF_ERRORS_HPP
#define CONVSDF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace convsdf {

/// Bad input: out-of-bounds points, malformed files, inconsistent grids.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// The arithmetic backend lost the signal (phi underflowed or went
/// nonpositive). Raising the bigfloat precision or tau fixes it.
class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace convsdf

#endif  // CONVSDF_ERRORS_HPP
