#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>
#include <string>

#include "laxhopf/errors.hpp"

namespace laxhopf {

/// A real number or +inf. There is no -inf; every operation that would
/// produce NaN throws EvaluationFault instead.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double v) : value_(v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v)) throw EvaluationFault("ExtReal: NaN");
    if (std::isinf(v)) {
      if (v < 0) throw EvaluationFault("ExtReal: -inf is not representable");
      value_ = 0.0;
      infinite_ = true;
    }
  }

  static ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    return r;
  }

  bool is_finite() const noexcept { return !infinite_; }
  bool is_infinite() const noexcept { return infinite_; }

  // Throws if infinite.
  double value() const {
    if (infinite_) throw MisuseError("ExtReal::value() on +inf");
    return value_;
  }

  // +inf maps to std::numeric_limits<double>::infinity(); for output only.
  double to_double() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return ExtReal(a.value_ + b.value_);
  }
  ExtReal& operator+=(ExtReal b) { return *this = *this + b; }

  // a - b is defined only for finite b; inf - finite = inf.
  friend ExtReal operator-(ExtReal a, double b) {
    if (std::isinf(b) || std::isnan(b)) throw EvaluationFault("ExtReal: subtracting a non-finite value");
    if (a.infinite_) return infinity();
    return ExtReal(a.value_ - b);
  }

  // Scaling by a real. 0 * inf and negative * inf are rejected.
  friend ExtReal operator*(double s, ExtReal a) {
    if (std::isnan(s)) throw EvaluationFault("ExtReal: NaN scale");
    if (a.infinite_) {
      if (s > 0) return infinity();
      throw EvaluationFault("ExtReal: non-positive scale of +inf");
    }
    return ExtReal(s * a.value_);
  }
  friend ExtReal operator*(ExtReal a, double s) { return s * a; }

  friend bool operator==(ExtReal a, ExtReal b) noexcept {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend std::partial_ordering operator<=>(ExtReal a, ExtReal b) noexcept {
    if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
    if (a.infinite_) return std::partial_ordering::greater;
    if (b.infinite_) return std::partial_ordering::less;
    return a.value_ <=> b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, ExtReal a) {
    if (a.infinite_) return os << "inf";
    return os << a.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

inline ExtReal min(ExtReal a, ExtReal b) { return b < a ? b : a; }
inline ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }

// Shortest round-trip decimal form; +inf serializes as "inf".
std::string to_string(ExtReal v);
std::string format_real(double v);

}  // namespace laxhopf
