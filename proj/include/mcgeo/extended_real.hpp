#pragma once

#include <limits>

#include "mcgeo/common.hpp"

namespace mcgeo {

// Tagged extended real: finite value or +infinity. Divergence sums propagate
// +inf explicitly instead of riding on IEEE arithmetic, and the weighted-add
// helper encodes the 0 * inf := 0 convention of f-divergences.
template <typename Scalar>
class ExtendedT {
 public:
  ExtendedT() : value_(0), inf_(false) {}
  /*implicit*/ ExtendedT(Scalar v) : value_(v), inf_(false) {}

  static ExtendedT infinity() {
    ExtendedT e;
    e.inf_ = true;
    return e;
  }

  bool is_infinite() const { return inf_; }

  // Finite payload; +inf collapses to the IEEE infinity for reporting.
  Scalar as_scalar() const {
    return inf_ ? std::numeric_limits<Scalar>::infinity() : value_;
  }

  ExtendedT& operator+=(const ExtendedT& o) {
    if (o.inf_) inf_ = true;
    if (!inf_) value_ += o.value_;
    return *this;
  }

  friend ExtendedT operator+(ExtendedT a, const ExtendedT& b) { return a += b; }

  // w * x with the convention 0 * inf = 0; w must be >= 0.
  friend ExtendedT weighted(Scalar w, const ExtendedT& x) {
    if (w == Scalar(0)) return ExtendedT(Scalar(0));
    if (x.inf_) return infinity();
    return ExtendedT(w * x.value_);
  }

  // Difference collapsed to a scalar for slack reporting; inf - inf is 0 by
  // convention (both sides of an inequality degenerate together).
  friend Scalar slack(const ExtendedT& lhs, const ExtendedT& rhs) {
    if (lhs.inf_ && rhs.inf_) return Scalar(0);
    if (lhs.inf_) return std::numeric_limits<Scalar>::infinity();
    if (rhs.inf_) return -std::numeric_limits<Scalar>::infinity();
    return lhs.value_ - rhs.value_;
  }

 private:
  Scalar value_;
  bool inf_;
};

using Extended = ExtendedT<double>;

}  // namespace mcgeo
