#pragma once

// Theory contexts, jointly diagonal systems, quasiclassical states and the
// generalized Gibbs (free) states they relax to.
//
// Conventions: k_B = 1, natural logarithms. In the energy representation the
// first operator of every system is the Hamiltonian H and the remaining ones
// X_1..X_j are conjugate, in order, to the context's energy intensive
// variables p_1..p_j. The entropy intensive variables are F_0 = beta and
// F_i = -beta * p_i, so a free state weights eigenstate alpha by
// exp(-sum_i F_i x_{i,alpha}).

#include "thermoflow/error.hpp"
#include "thermoflow/types.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace thermoflow {

enum class Representation { energy, entropy };

template <typename Scalar>
struct Intensive {
  std::string label;
  Scalar value;

  friend bool operator==(const Intensive&, const Intensive&) = default;
};

/// One resource theory: the bath's intensive variables.
template <typename Scalar = double>
class TheoryContext {
 public:
  TheoryContext() = default;  // entropy theory

  TheoryContext(Representation representation, std::optional<Scalar> beta,
                std::vector<Intensive<Scalar>> intensive)
      : representation_(representation), beta_(beta), intensive_(std::move(intensive)) {
    if (representation_ == Representation::entropy) {
      if (beta_ || !intensive_.empty()) {
        throw Error(ErrorCode::IntensivesInEntropyTheory,
                    "the entropy theory takes no inverse temperature or intensive variables");
      }
      return;
    }
    if (!beta_ || !std::isfinite(*beta_) || *beta_ <= Scalar(0)) {
      throw Error(ErrorCode::NonPositiveBeta, "beta must be positive and finite");
    }
    for (const auto& p : intensive_) {
      if (!std::isfinite(p.value)) {
        throw Error(ErrorCode::InvalidValue, "intensive variable '" + p.label + "' is not finite");
      }
    }
  }

  Representation representation() const { return representation_; }
  bool is_entropy() const { return representation_ == Representation::entropy; }
  std::optional<Scalar> beta() const { return beta_; }
  const std::vector<Intensive<Scalar>>& intensive() const { return intensive_; }

  /// Number of state operators a system must carry under this context.
  Index operator_count() const {
    return is_entropy() ? 0 : static_cast<Index>(intensive_.size()) + 1;
  }

  Scalar temperature() const {
    require_energy();
    return Scalar(1) / *beta_;
  }

  /// (F_0, F_1, ..., F_j) = (beta, -beta p_1, ..., -beta p_j); empty for the entropy theory.
  Vector<Scalar> entropy_intensive() const {
    if (is_entropy()) return Vector<Scalar>(0);
    Vector<Scalar> f(operator_count());
    f(0) = *beta_;
    for (std::size_t i = 0; i < intensive_.size(); ++i) {
      f(static_cast<Index>(i) + 1) = -*beta_ * intensive_[i].value;
    }
    return f;
  }

  void require_energy() const {
    if (is_entropy()) {
      throw Error(ErrorCode::EntropyRepresentation, "operation needs an energy-representation theory");
    }
  }

  friend bool operator==(const TheoryContext&, const TheoryContext&) = default;

 private:
  Representation representation_ = Representation::entropy;
  std::optional<Scalar> beta_;
  std::vector<Intensive<Scalar>> intensive_;
};

template <typename Scalar = double>
TheoryContext<Scalar> make_context(Representation representation, std::optional<Scalar> beta = std::nullopt,
                                   std::vector<Intensive<Scalar>> intensive = {}) {
  return TheoryContext<Scalar>(representation, beta, std::move(intensive));
}

// ---------------------------------------------------------------------------
// Presets for the common ensembles.

enum class PresetKind { entropy, helmholtz, grand_potential, gibbs, magnetic };

template <typename Scalar = double>
struct PresetParams {
  std::optional<Scalar> beta = {};
  /// grand_potential: one chemical potential per species/phase.
  std::vector<Intensive<Scalar>> chemical_potentials = {};
  /// gibbs: the pressure p, entering as the energy intensive variable -p conjugate to volume.
  std::optional<Scalar> pressure = {};
  /// magnetic: field components conjugate to the magnetic-moment operators.
  std::vector<Intensive<Scalar>> field = {};
};

template <typename Scalar = double>
TheoryContext<Scalar> preset(PresetKind kind, const PresetParams<Scalar>& params = {}) {
  auto need_beta = [&] {
    if (!params.beta) throw Error(ErrorCode::MissingParameter, "preset needs beta");
    return *params.beta;
  };
  switch (kind) {
    case PresetKind::entropy:
      return TheoryContext<Scalar>();
    case PresetKind::helmholtz:
      return make_context<Scalar>(Representation::energy, need_beta());
    case PresetKind::grand_potential:
      if (params.chemical_potentials.empty()) {
        throw Error(ErrorCode::MissingParameter, "grand_potential needs at least one chemical potential");
      }
      return make_context<Scalar>(Representation::energy, need_beta(), params.chemical_potentials);
    case PresetKind::gibbs:
      if (!params.pressure) throw Error(ErrorCode::MissingParameter, "gibbs needs a pressure");
      return make_context<Scalar>(Representation::energy, need_beta(), {{"-p", -*params.pressure}});
    case PresetKind::magnetic:
      if (params.field.empty()) throw Error(ErrorCode::MissingParameter, "magnetic needs field components");
      return make_context<Scalar>(Representation::energy, need_beta(), params.field);
  }
  throw Error(ErrorCode::InvalidValue, "unknown preset");
}

/// Chemical potential of a species of particle mass `mass` at height `height`
/// in a uniform field `g`: the standard potential plus m g h.
template <typename Scalar>
Scalar gravitational_chemical_potential(Scalar mu, Scalar mass, Scalar g, Scalar height) {
  return mu + mass * g * height;
}

template <typename Scalar>
struct GravitationalPhase {
  std::string label;
  Scalar standard_mu;
  Scalar mass;
  Scalar height;
};

/// Grand-potential theory modelling a weight: each (species, height) pair is a
/// phase whose chemical potential absorbs the gravitational energy.
template <typename Scalar = double>
TheoryContext<Scalar> gravitational_preset(Scalar beta, Scalar g, const std::vector<GravitationalPhase<Scalar>>& phases) {
  PresetParams<Scalar> params;
  params.beta = beta;
  for (const auto& phase : phases) {
    params.chemical_potentials.push_back(
        {phase.label, gravitational_chemical_potential(phase.standard_mu, phase.mass, g, phase.height)});
  }
  return preset(PresetKind::grand_potential, params);
}

// ---------------------------------------------------------------------------
// Systems and states.

template <typename Scalar>
struct OperatorSpectrum {
  std::string label;
  Vector<Scalar> eigenvalues;

  friend bool operator==(const OperatorSpectrum& a, const OperatorSpectrum& b) {
    return a.label == b.label && a.eigenvalues.size() == b.eigenvalues.size() &&
           a.eigenvalues == b.eigenvalues;
  }
};

/// Eigenvalue table of commuting operators; column alpha of every operator
/// refers to the same shared eigenstate.
template <typename Scalar = double>
class SystemSpec {
 public:
  SystemSpec(Index dim, std::vector<OperatorSpectrum<Scalar>> operators,
             std::vector<OperatorSpectrum<Scalar>> nonstate = {})
      : dim_(dim), operators_(std::move(operators)), nonstate_(std::move(nonstate)) {
    if (dim_ < 1) throw Error(ErrorCode::DimensionMismatch, "dimension must be positive");
    auto check = [&](const OperatorSpectrum<Scalar>& op) {
      if (op.eigenvalues.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "operator '" + op.label + "' has " +
                                                      std::to_string(op.eigenvalues.size()) +
                                                      " eigenvalues, expected " + std::to_string(dim_));
      }
      if (!op.eigenvalues.allFinite()) {
        throw Error(ErrorCode::InvalidValue, "operator '" + op.label + "' has non-finite eigenvalues");
      }
    };
    for (const auto& op : operators_) check(op);
    for (const auto& op : nonstate_) check(op);
  }

  /// Trivial one-level system carrying the given operator labels with zero eigenvalues.
  static SystemSpec trivial(const std::vector<std::string>& labels) {
    std::vector<OperatorSpectrum<Scalar>> ops;
    for (const auto& label : labels) ops.push_back({label, Vector<Scalar>::Zero(1)});
    return SystemSpec(1, std::move(ops));
  }

  Index dim() const { return dim_; }
  const std::vector<OperatorSpectrum<Scalar>>& operators() const { return operators_; }
  const std::vector<OperatorSpectrum<Scalar>>& nonstate() const { return nonstate_; }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& op : operators_) out.push_back(op.label);
    return out;
  }

  std::vector<std::string> nonstate_labels() const {
    std::vector<std::string> out;
    for (const auto& op : nonstate_) out.push_back(op.label);
    return out;
  }

  /// Checks the operator count against the context. The entropy theory ignores operators.
  void require_compatible(const TheoryContext<Scalar>& ctx) const {
    if (ctx.is_entropy()) return;
    if (static_cast<Index>(operators_.size()) != ctx.operator_count()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "system carries " + std::to_string(operators_.size()) + " state operators, context expects " +
                      std::to_string(ctx.operator_count()));
    }
  }

  /// a_alpha = sum_i F_i x_{i,alpha}; the unnormalized free weight is exp(-a_alpha).
  Vector<Scalar> exponents(const TheoryContext<Scalar>& ctx) const {
    require_compatible(ctx);
    Vector<Scalar> a = Vector<Scalar>::Zero(dim_);
    if (ctx.is_entropy()) return a;
    const Vector<Scalar> f = ctx.entropy_intensive();
    for (std::size_t i = 0; i < operators_.size(); ++i) {
      a += f(static_cast<Index>(i)) * operators_[i].eigenvalues;
    }
    return a;
  }

  /// Simultaneous relabeling of the shared eigenbasis: new column k is old column perm[k].
  SystemSpec permuted(const std::vector<Index>& perm) const {
    auto apply = [&](std::vector<OperatorSpectrum<Scalar>> ops) {
      for (auto& op : ops) {
        Vector<Scalar> v(dim_);
        for (Index k = 0; k < dim_; ++k) v(k) = op.eigenvalues(perm[static_cast<std::size_t>(k)]);
        op.eigenvalues = std::move(v);
      }
      return ops;
    };
    return SystemSpec(dim_, apply(operators_), apply(nonstate_));
  }

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;

 private:
  Index dim_;
  std::vector<OperatorSpectrum<Scalar>> operators_;
  std::vector<OperatorSpectrum<Scalar>> nonstate_;
};

/// A diagonal state: system plus probability vector over the shared eigenbasis.
template <typename Scalar = double>
class QuasiclassicalState {
 public:
  QuasiclassicalState(SystemSpec<Scalar> spec, Vector<Scalar> r) : spec_(std::move(spec)), r_(std::move(r)) {
    if (r_.size() != spec_.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "probability vector has length " + std::to_string(r_.size()) +
                                                    ", system dimension is " + std::to_string(spec_.dim()));
    }
    if (!r_.allFinite() || (r_.array() < Scalar(0)).any()) {
      throw Error(ErrorCode::InvalidValue, "probabilities must be finite and nonnegative");
    }
    const Scalar total = r_.sum();
    if (std::abs(total - Scalar(1)) > Tolerance<Scalar>::renormalize) {
      throw Error(ErrorCode::NotNormalized, "probabilities sum to " + std::to_string(static_cast<double>(total)));
    }
    if (total != Scalar(1)) r_ /= total;
  }

  const SystemSpec<Scalar>& spec() const { return spec_; }
  const Vector<Scalar>& r() const { return r_; }
  Index dim() const { return spec_.dim(); }

  QuasiclassicalState permuted(const std::vector<Index>& perm) const {
    Vector<Scalar> v(dim());
    for (Index k = 0; k < dim(); ++k) v(k) = r_(perm[static_cast<std::size_t>(k)]);
    return QuasiclassicalState(spec_.permuted(perm), std::move(v));
  }

  friend bool operator==(const QuasiclassicalState& a, const QuasiclassicalState& b) {
    return a.spec_ == b.spec_ && a.r_ == b.r_;
  }

 private:
  SystemSpec<Scalar> spec_;
  Vector<Scalar> r_;
};

// ---------------------------------------------------------------------------
// Free states.

/// ln Z, evaluated with max-exponent shifting so extreme spectra stay finite.
template <typename Scalar>
Scalar log_partition_function(const SystemSpec<Scalar>& spec, const TheoryContext<Scalar>& ctx) {
  const Vector<Scalar> a = spec.exponents(ctx);
  return log_sum_exp((-a).eval());
}

/// Z = sum_alpha exp(-a_alpha). May underflow for extreme spectra; prefer the log form there.
template <typename Scalar>
Scalar partition_function(const SystemSpec<Scalar>& spec, const TheoryContext<Scalar>& ctx) {
  return std::exp(log_partition_function(spec, ctx));
}

template <typename Scalar>
Vector<Scalar> gibbs_vector(const SystemSpec<Scalar>& spec, const TheoryContext<Scalar>& ctx) {
  if (ctx.is_entropy()) return Vector<Scalar>::Constant(spec.dim(), Scalar(1) / Scalar(spec.dim()));
  const Vector<Scalar> a = spec.exponents(ctx);
  const Scalar log_z = log_sum_exp((-a).eval());
  Vector<Scalar> g = (-a.array() - log_z).exp().matrix();
  return g / g.sum();
}

template <typename Scalar>
QuasiclassicalState<Scalar> gibbs_state(const SystemSpec<Scalar>& spec, const TheoryContext<Scalar>& ctx) {
  return QuasiclassicalState<Scalar>(spec, gibbs_vector(spec, ctx));
}

// ---------------------------------------------------------------------------
// Composition.

template <typename Scalar>
SystemSpec<Scalar> compose(const SystemSpec<Scalar>& a, const SystemSpec<Scalar>& b) {
  if (a.labels() != b.labels() || a.nonstate_labels() != b.nonstate_labels()) {
    throw Error(ErrorCode::LabelMismatch, "composed systems must carry the same operator labels in the same order");
  }
  const Index da = a.dim();
  const Index db = b.dim();
  auto sum_table = [&](const std::vector<OperatorSpectrum<Scalar>>& xa,
                       const std::vector<OperatorSpectrum<Scalar>>& xb) {
    std::vector<OperatorSpectrum<Scalar>> out;
    for (std::size_t i = 0; i < xa.size(); ++i) {
      Vector<Scalar> v(da * db);
      for (Index p = 0; p < da; ++p) {
        v.segment(p * db, db) = xb[i].eigenvalues.array() + xa[i].eigenvalues(p);
      }
      out.push_back({xa[i].label, std::move(v)});
    }
    return out;
  };
  return SystemSpec<Scalar>(da * db, sum_table(a.operators(), b.operators()), sum_table(a.nonstate(), b.nonstate()));
}

/// Row-major Kronecker product: index (p, q) maps to p * dim(b) + q.
template <typename Scalar>
Vector<Scalar> kron(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  Vector<Scalar> out(a.size() * b.size());
  for (Index p = 0; p < a.size(); ++p) out.segment(p * b.size(), b.size()) = a(p) * b;
  return out;
}

template <typename Scalar>
QuasiclassicalState<Scalar> compose(const QuasiclassicalState<Scalar>& a, const QuasiclassicalState<Scalar>& b) {
  return QuasiclassicalState<Scalar>(compose(a.spec(), b.spec()), kron(a.r(), b.r()));
}

// ---------------------------------------------------------------------------

/// True iff the support of r lies inside a single joint eigenspace of the
/// behind-the-scenes operators. Vacuously true without such operators.
template <typename Scalar>
bool validate_fixed_eigensubspace(const QuasiclassicalState<Scalar>& state) {
  const auto& r = state.r();
  for (const auto& block : state.spec().nonstate()) {
    std::optional<Scalar> seen;
    for (Index k = 0; k < r.size(); ++k) {
      if (r(k) <= Tolerance<Scalar>::support) continue;
      if (!seen) {
        seen = block.eigenvalues(k);
      } else if (block.eigenvalues(k) != *seen) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace thermoflow
