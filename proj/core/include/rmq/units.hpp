#pragma once

#include <cmath>
#include <compare>

namespace rmq::units {

/// Exponents of mass, length and time.
template <int M, int L, int T>
struct Dim {
  static constexpr int mass = M;
  static constexpr int length = L;
  static constexpr int time = T;
};

template <class A, class B>
using DimProduct = Dim<A::mass + B::mass, A::length + B::length, A::time + B::time>;
template <class A, class B>
using DimQuotient = Dim<A::mass - B::mass, A::length - B::length, A::time - B::time>;

/// SI scalar tagged with its dimension. Adding or comparing quantities of
/// different dimension does not compile.
template <class D>
class Quantity {
 public:
  using dimension = D;

  constexpr Quantity() = default;
  constexpr explicit Quantity(double si) : value_(si) {}

  [[nodiscard]] constexpr double si() const noexcept { return value_; }

  constexpr Quantity operator+(Quantity o) const { return Quantity(value_ + o.value_); }
  constexpr Quantity operator-(Quantity o) const { return Quantity(value_ - o.value_); }
  constexpr Quantity operator*(double k) const { return Quantity(value_ * k); }
  constexpr Quantity operator/(double k) const { return Quantity(value_ / k); }
  friend constexpr Quantity operator*(double k, Quantity q) { return Quantity(k * q.value_); }

  constexpr auto operator<=>(const Quantity&) const = default;

 private:
  double value_ = 0.0;
};

template <class A, class B>
constexpr Quantity<DimProduct<A, B>> operator*(Quantity<A> a, Quantity<B> b) {
  return Quantity<DimProduct<A, B>>(a.si() * b.si());
}

template <class A, class B>
constexpr Quantity<DimQuotient<A, B>> operator/(Quantity<A> a, Quantity<B> b) {
  return Quantity<DimQuotient<A, B>>(a.si() / b.si());
}

template <class D>
  requires(D::mass % 2 == 0 && D::length % 2 == 0 && D::time % 2 == 0)
Quantity<Dim<D::mass / 2, D::length / 2, D::time / 2>> sqrt(Quantity<D> q) {
  return Quantity<Dim<D::mass / 2, D::length / 2, D::time / 2>>(std::sqrt(q.si()));
}

using Dimensionless = Quantity<Dim<0, 0, 0>>;
using Mass = Quantity<Dim<1, 0, 0>>;
using Length = Quantity<Dim<0, 1, 0>>;
using Time = Quantity<Dim<0, 0, 1>>;
using Area = Quantity<Dim<0, 2, 0>>;
using Velocity = Quantity<Dim<0, 1, -1>>;
using Rate = Quantity<Dim<0, 0, -1>>;
using NumberDensity = Quantity<Dim<0, -3, 0>>;
using Flux = Quantity<Dim<0, -2, -1>>;
using Momentum = Quantity<Dim<1, 1, -1>>;
using Action = Quantity<Dim<1, 2, -1>>;
using MomentumDiffusion = Quantity<Dim<2, 2, -3>>;
using PositionDiffusion = Quantity<Dim<0, 2, -1>>;

}  // namespace rmq::units
