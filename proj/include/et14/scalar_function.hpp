#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "et14/dual.hpp"
#include "et14/errors.hpp"

namespace et14 {

class Rng;

/// A differentiable scalar function of up to 8 scalar arguments, evaluable
/// on plain doubles and on the forward-mode scalars used throughout the
/// verifier. The canonical representation is a sparse polynomial, which has
/// exact derivatives; compositions built by the closure module implement the
/// same interface.
class ScalarFunction {
 public:
  virtual ~ScalarFunction() = default;

  virtual int arity() const = 0;

  virtual double eval(std::span<const double> args) const = 0;
  virtual Dual<8> eval(std::span<const Dual<8>> args) const = 0;
  virtual Dual<14> eval(std::span<const Dual<14>> args) const = 0;
  virtual Dual2<8> eval(std::span<const Dual2<8>> args) const = 0;
  virtual Dual2<14> eval(std::span<const Dual2<14>> args) const = 0;
  virtual Dual2<3> eval(std::span<const Dual2<3>> args) const = 0;

  /// Exact partial derivative in the given argument slot, as a function.
  virtual std::shared_ptr<const ScalarFunction> partial(int arg) const {
    (void)arg;
    throw NotDifferentiable("this function does not expose partials");
  }
};

/// CRTP helper: a derived class only provides `template <class T> T eval_t`.
template <class Derived>
class ScalarFunctionBase : public ScalarFunction {
 public:
  double eval(std::span<const double> a) const final { return self().template eval_t<double>(a); }
  Dual<8> eval(std::span<const Dual<8>> a) const final { return self().template eval_t<Dual<8>>(a); }
  Dual<14> eval(std::span<const Dual<14>> a) const final { return self().template eval_t<Dual<14>>(a); }
  Dual2<8> eval(std::span<const Dual2<8>> a) const final { return self().template eval_t<Dual2<8>>(a); }
  Dual2<14> eval(std::span<const Dual2<14>> a) const final { return self().template eval_t<Dual2<14>>(a); }
  Dual2<3> eval(std::span<const Dual2<3>> a) const final { return self().template eval_t<Dual2<3>>(a); }

 private:
  const Derived& self() const { return *static_cast<const Derived*>(this); }
};

/// Sparse multivariate polynomial: list of (exponent tuple, coefficient).
class Polynomial final : public ScalarFunctionBase<Polynomial> {
 public:
  struct Term {
    std::array<int, 8> exp{};
    double coef{};
  };

  Polynomial(int nvars, std::vector<std::string> var_names, std::vector<Term> terms);
  Polynomial(int nvars, std::vector<Term> terms);

  int arity() const override { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<std::string>& var_names() const { return names_; }

  std::shared_ptr<const ScalarFunction> partial(int arg) const override;

  template <class T>
  T eval_t(std::span<const T> args) const {
    T acc(0.0);
    for (const Term& t : terms_) {
      T m(t.coef);
      for (int i = 0; i < nvars_; ++i)
        for (int e = 0; e < t.exp[i]; ++e) m = m * args[i];
      acc += m;
    }
    return acc;
  }

  nlohmann::json to_json() const;
  static std::shared_ptr<const Polynomial> from_json(const nlohmann::json& j);

  /// Constant and single-variable helpers.
  static std::shared_ptr<const Polynomial> constant(int nvars, double c);
  static std::shared_ptr<const Polynomial> variable(int nvars, int slot, double scale = 1.0);

 private:
  int nvars_;
  std::vector<std::string> names_;
  std::vector<Term> terms_;
};

/// Deterministic random polynomial: every monomial of total degree <= degree
/// is included with probability `density`, coefficients uniform in
/// [-coef_range, coef_range]. Always includes at least one term.
std::shared_ptr<const Polynomial> random_polynomial(int nvars, int degree, Rng& rng,
                                                    double density = 0.35,
                                                    double coef_range = 1.0);

}  // namespace et14
