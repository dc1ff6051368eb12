#include "laxhopf/extreal.hpp"

#include <fmt/format.h>

#include <stdexcept>

#include "laxhopf/vec.hpp"

namespace laxhopf {

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string to_string(ExtReal v) {
  return v.is_infinite() ? std::string("inf") : format_real(v.value());
}

Lattice::Lattice(std::vector<Axis> axes) : axes_(std::move(axes)) {
  size_ = axes_.empty() ? 0 : 1;
  for (const auto& a : axes_) {
    if (a.count == 0) throw MisuseError("Lattice: empty axis");
    if (!(a.step > 0.0)) throw MisuseError("Lattice: step must be positive");
    size_ *= a.count;
  }
}

Lattice::Axis Lattice::make_axis(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
    throw MisuseError("Lattice: invalid axis");
  const double span = (hi - lo) / step;
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  return Axis{lo, step, count};
}

Lattice Lattice::uniform(const Vec& lo, const Vec& hi, const Vec& step) {
  if (lo.size() != hi.size() || lo.size() != step.size())
    throw MisuseError("Lattice: dimension mismatch");
  std::vector<Axis> axes;
  for (std::size_t i = 0; i < lo.size(); ++i) axes.push_back(make_axis(lo[i], hi[i], step[i]));
  return Lattice(std::move(axes));
}

Vec Lattice::point(std::size_t flat) const {
  Vec p(axes_.size());
  point(flat, p);
  return p;
}

void Lattice::point(std::size_t flat, std::span<double> out) const {
  if (flat >= size_) throw std::out_of_range("Lattice::point");
  for (std::size_t i = axes_.size(); i-- > 0;) {
    const auto& a = axes_[i];
    out[i] = a.at(flat % a.count);
    flat /= a.count;
  }
}

}  // namespace laxhopf
