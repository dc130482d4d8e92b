#include "et14/scalar_function.hpp"

#include <algorithm>
#include <utility>

#include <nlohmann/json.hpp>

#include "et14/sampler.hpp"

namespace et14 {

Polynomial::Polynomial(int nvars, std::vector<std::string> var_names, std::vector<Term> terms)
    : nvars_(nvars), names_(std::move(var_names)), terms_(std::move(terms)) {
  if (nvars_ < 0 || nvars_ > 8) throw ArityMismatch("polynomial arity must be 0..8");
  for (const Term& t : terms_)
    for (int i = nvars_; i < 8; ++i)
      if (t.exp[i] != 0) throw ArityMismatch("exponent beyond arity");
}

Polynomial::Polynomial(int nvars, std::vector<Term> terms)
    : Polynomial(nvars, std::vector<std::string>{}, std::move(terms)) {}

std::shared_ptr<const ScalarFunction> Polynomial::partial(int arg) const {
  std::vector<Term> out;
  for (const Term& t : terms_) {
    if (t.exp[arg] == 0) continue;
    Term d = t;
    d.coef = t.coef * t.exp[arg];
    d.exp[arg] -= 1;
    out.push_back(d);
  }
  return std::make_shared<Polynomial>(nvars_, names_, std::move(out));
}

nlohmann::json Polynomial::to_json() const {
  nlohmann::json j;
  nlohmann::json vars = nlohmann::json::array();
  for (int i = 0; i < nvars_; ++i)
    vars.push_back(i < static_cast<int>(names_.size()) ? names_[i] : "v" + std::to_string(i + 1));
  j["vars"] = vars;
  nlohmann::json terms = nlohmann::json::array();
  for (const Term& t : terms_) {
    nlohmann::json e = nlohmann::json::array();
    for (int i = 0; i < nvars_; ++i) e.push_back(t.exp[i]);
    terms.push_back({{"exp", e}, {"coef", t.coef}});
  }
  j["terms"] = terms;
  return j;
}

std::shared_ptr<const Polynomial> Polynomial::from_json(const nlohmann::json& j) {
  if (!j.contains("vars") || !j.contains("terms"))
    throw ParseError("scalar function json needs 'vars' and 'terms'");
  std::vector<std::string> names;
  for (const auto& v : j.at("vars")) names.push_back(v.get<std::string>());
  const int nvars = static_cast<int>(names.size());
  std::vector<Term> terms;
  for (const auto& tj : j.at("terms")) {
    Term t;
    const auto& e = tj.at("exp");
    if (static_cast<int>(e.size()) != nvars) throw ParseError("exp length != vars length");
    for (int i = 0; i < nvars; ++i) {
      const int ei = e[i].get<int>();
      if (ei < 0) throw ParseError("negative exponent");
      t.exp[i] = ei;
    }
    t.coef = tj.at("coef").get<double>();
    terms.push_back(t);
  }
  return std::make_shared<Polynomial>(nvars, std::move(names), std::move(terms));
}

std::shared_ptr<const Polynomial> Polynomial::constant(int nvars, double c) {
  Term t;
  t.coef = c;
  return std::make_shared<Polynomial>(nvars, std::vector<Term>{t});
}

std::shared_ptr<const Polynomial> Polynomial::variable(int nvars, int slot, double scale) {
  Term t;
  t.coef = scale;
  t.exp[slot] = 1;
  return std::make_shared<Polynomial>(nvars, std::vector<Term>{t});
}

std::shared_ptr<const Polynomial> random_polynomial(int nvars, int degree, Rng& rng,
                                                    double density, double coef_range) {
  std::vector<Polynomial::Term> terms;
  std::array<int, 8> exp{};
  // Enumerate exponent tuples of total degree <= degree.
  const auto enumerate = [&](auto&& self, int slot, int remaining) -> void {
    if (slot == nvars) {
      if (rng.next_unit() < density) {
        Polynomial::Term t;
        t.exp = exp;
        t.coef = rng.uniform(-coef_range, coef_range);
        terms.push_back(t);
      }
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      exp[slot] = e;
      self(self, slot + 1, remaining - e);
    }
    exp[slot] = 0;
  };
  enumerate(enumerate, 0, degree);
  if (terms.empty()) {
    Polynomial::Term t;
    t.exp[0] = std::min(1, degree);
    t.coef = rng.uniform(-coef_range, coef_range);
    terms.push_back(t);
  }
  return std::make_shared<Polynomial>(nvars, std::move(terms));
}

}  // namespace et14
