#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace mcgeo {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Shared numeric contracts. Row-stochasticity and distribution mass are
// enforced at 1e-12 after construction; inputs within `normalize_tol` of a
// valid row are rescaled, anything worse is rejected.
struct tol {
  static constexpr double normalize = 1e-9;    // constructor rescue band
  static constexpr double stationary = 1e-10;  // pi P = pi checks
  static constexpr double reversible = 1e-10;  // detailed balance checks
  static constexpr double identity = 1e-10;    // inequality/identity slack
};

// Library error with a machine-readable kind ("reducible", "size_guard",
// "shape_mismatch", ...). The CLI maps these to exit code 1 and a JSON body.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(detail), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

inline void require(bool cond, const char* kind, const std::string& detail) {
  if (!cond) throw Error(kind, detail);
}

}  // namespace mcgeo
