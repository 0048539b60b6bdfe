#pragma once

// n-fold i.i.d. powers of a state, grouped by type class. Every eigenstate of
// the n-copy system with occupation numbers k = (k_1..k_d) has the same
// r-value prod r_a^{k_a} and g-value prod g_a^{k_a}, and there are
// multinomial(n; k) of them. All three quantities are kept as logarithms.

#include "thermoflow/error.hpp"
#include "thermoflow/theory.hpp"
#include "thermoflow/types.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace thermoflow {

template <typename Scalar>
struct TypeClassAtom {
  std::vector<int> occupation;
  Scalar log_r;             // ln of one eigenstate's r-probability
  Scalar log_g;             // ln of one eigenstate's free-state probability
  Scalar log_multiplicity;  // ln multinomial(n; k)

  Scalar r_value() const { return std::exp(log_r); }
  Scalar g_value() const { return std::exp(log_g); }
  Scalar multiplicity() const { return std::exp(log_multiplicity); }
  Scalar log_r_mass() const { return log_r + log_multiplicity; }
  Scalar log_g_mass() const { return log_g + log_multiplicity; }
};

template <typename Scalar = double>
struct CompressedState {
  int copies = 0;
  std::vector<TypeClassAtom<Scalar>> atoms;

  Scalar total_r_mass() const {
    Scalar s = 0;
    for (const auto& a : atoms) s += std::exp(a.log_r_mass());
    return s;
  }
  Scalar total_g_mass() const {
    Scalar s = 0;
    for (const auto& a : atoms) s += std::exp(a.log_g_mass());
    return s;
  }
};

/// Number of type classes C(n + d - 1, d - 1), as a real to avoid overflow.
inline double type_class_count(int copies, Index dim) {
  const double n = copies;
  const double d = static_cast<double>(dim);
  return std::round(std::exp(std::lgamma(n + d) - std::lgamma(n + 1.0) - std::lgamma(d)));
}

inline constexpr double kDefaultTypeClassCap = 2.0e6;

namespace detail {

template <typename Scalar>
Scalar occupation_log(Scalar log_p, int k) {
  // 0 * ln 0 contributes nothing.
  return k == 0 ? Scalar(0) : Scalar(k) * log_p;
}

}  // namespace detail

/// Type-class compression of r^{(x)n} against the matching free state g^{(x)n}.
template <typename Scalar>
CompressedState<Scalar> tensor_power_compressed(const Vector<Scalar>& r, const Vector<Scalar>& g, int copies,
                                                double cap = kDefaultTypeClassCap) {
  if (copies < 1) throw Error(ErrorCode::InvalidValue, "number of copies must be at least 1");
  if (r.size() != g.size()) throw Error(ErrorCode::DimensionMismatch, "r and g differ in length");
  const Index d = r.size();
  const double count = type_class_count(copies, d);
  if (count > cap) {
    throw Error(ErrorCode::TooLarge, std::to_string(count) + " type classes exceed the cap of " + std::to_string(cap));
  }

  const Vector<Scalar> log_r = r.array().log().matrix();
  const Vector<Scalar> log_g = g.array().log().matrix();
  std::vector<Scalar> log_factorial(static_cast<std::size_t>(copies) + 1);
  for (int k = 0; k <= copies; ++k) log_factorial[static_cast<std::size_t>(k)] = std::lgamma(Scalar(k) + 1);

  CompressedState<Scalar> out;
  out.copies = copies;
  out.atoms.reserve(static_cast<std::size_t>(count));

  // Enumerate compositions of `copies` into d parts in lexicographic order.
  std::vector<int> k(static_cast<std::size_t>(d), 0);
  auto emit = [&] {
    TypeClassAtom<Scalar> atom{k, 0, 0, log_factorial[static_cast<std::size_t>(copies)]};
    for (Index a = 0; a < d; ++a) {
      const int ka = k[static_cast<std::size_t>(a)];
      atom.log_r += detail::occupation_log(log_r(a), ka);
      atom.log_g += detail::occupation_log(log_g(a), ka);
      atom.log_multiplicity -= log_factorial[static_cast<std::size_t>(ka)];
    }
    out.atoms.push_back(std::move(atom));
  };
  auto recurse = [&](auto&& self, Index pos, int remaining) -> void {
    if (pos == d - 1) {
      k[static_cast<std::size_t>(pos)] = remaining;
      emit();
      return;
    }
    for (int take = remaining; take >= 0; --take) {
      k[static_cast<std::size_t>(pos)] = take;
      self(self, pos + 1, remaining - take);
    }
  };
  recurse(recurse, 0, copies);
  return out;
}

template <typename Scalar>
CompressedState<Scalar> tensor_power_compressed(const QuasiclassicalState<Scalar>& state,
                                                const TheoryContext<Scalar>& ctx, int copies,
                                                double cap = kDefaultTypeClassCap) {
  return tensor_power_compressed(state.r(), gibbs_vector(state.spec(), ctx), copies, cap);
}

}  // namespace thermoflow
