#include "et14/closure.hpp"

#include <nlohmann/json.hpp>

namespace et14 {

const char* closure_form_name(ClosureForm f) {
  switch (f) {
    case ClosureForm::kXForm: return "x";
    case ClosureForm::kEtaForm: return "eta";
    case ClosureForm::kSubsystem5: return "sub5";
  }
  return "?";
}

void ClosureSpec::validate() const {
  const std::size_t want = form == ClosureForm::kSubsystem5 ? 1 : 4;
  if (functions.size() != want) throw FormMismatch("wrong function count for closure form");
  const int arity = form == ClosureForm::kSubsystem5 ? 2 : 8;
  for (const auto& f : functions) {
    if (!f) throw FormMismatch("null function in closure spec");
    if (f->arity() != arity) throw ArityMismatch("function arity does not match form");
  }
}

namespace {

/// One member H_r of the two-branch compatibility family, with exact partials
/// of the generating functions substituted at the y/z points.
class CompatXFunction final : public ScalarFunctionBase<CompatXFunction> {
 public:
  CompatXFunction(int r, std::shared_ptr<const ScalarFunction> psi,
                  std::array<std::shared_ptr<const ScalarFunction>, 3> h_star,
                  std::shared_ptr<const ScalarFunction> phi,
                  std::array<std::shared_ptr<const ScalarFunction>, 3> h_star_star,
                  std::array<double, 4> w)
      : r_(r), h_star_(std::move(h_star)), h_star_star_(std::move(h_star_star)), w_(w) {
    if (psi) {
      if (psi->arity() != 8) throw ArityMismatch("psi must have 8 arguments");
      psi_x5_ = psi->partial(4);
      for (int i = 0; i < 3; ++i) psi_y_[i] = psi->partial(5 + i);
    }
    for (const auto& f : h_star_)
      if (f && f->arity() != 7) throw ArityMismatch("H* must have 7 arguments");
    if (phi) {
      if (phi->arity() != 8) throw ArityMismatch("phi must have 8 arguments");
      phi_z5_ = phi->partial(4);
      phi_x6_ = phi->partial(5);
      phi_z7_ = phi->partial(6);
      phi_z8_ = phi->partial(7);
    }
    for (const auto& f : h_star_star_)
      if (f && f->arity() != 7) throw ArityMismatch("H** must have 7 arguments");
  }

  int arity() const override { return 8; }

  template <class T>
  T eval_t(std::span<const T> a) const {
    std::array<T, 8> x;
    for (int i = 0; i < 8; ++i) x[i] = a[i];
    T out(0.0);

    if (psi_x5_) {
      const auto y = family_y(x, w_);
      const std::array<T, 8> pa{x[0], x[1], x[2], x[3], x[4], y[1], y[2], y[3]};
      const std::array<T, 7> sa{x[0], x[1], x[2], x[3], y[1], y[2], y[3]};
      std::array<T, 3> A;
      for (int i = 0; i < 3; ++i) {
        A[i] = psi_y_[i]->eval(std::span<const T>(pa));
        if (h_star_[i]) A[i] += h_star_[i]->eval(std::span<const T>(sa));
      }
      if (r_ == 0) {
        out += psi_x5_->eval(std::span<const T>(pa));
        for (int i = 0; i < 3; ++i) out -= (w_[i + 1] / w_[0]) * x[i + 1] * A[i];
      } else {
        out += x[0] * A[r_ - 1];
      }
    }

    if (phi_x6_) {
      const auto z = family_z(x, w_);
      const std::array<T, 8> fa{x[0], x[1], x[2], x[3], z[0], x[5], z[1], z[2]};
      const std::array<T, 7> ga{x[0], x[1], x[2], x[3], z[0], z[1], z[2]};
      T b0 = phi_z5_->eval(std::span<const T>(fa));
      T b2 = phi_z7_->eval(std::span<const T>(fa));
      T b3 = phi_z8_->eval(std::span<const T>(fa));
      if (h_star_star_[0]) b0 += h_star_star_[0]->eval(std::span<const T>(ga));
      if (h_star_star_[1]) b2 += h_star_star_[1]->eval(std::span<const T>(ga));
      if (h_star_star_[2]) b3 += h_star_star_[2]->eval(std::span<const T>(ga));
      switch (r_) {
        case 0: out += x[1] * b0; break;
        case 1:
          out += phi_x6_->eval(std::span<const T>(fa)) - (w_[0] / w_[1]) * x[0] * b0 -
                 (w_[2] / w_[1]) * x[2] * b2 - (w_[3] / w_[1]) * x[3] * b3;
          break;
        case 2: out += x[1] * b2; break;
        case 3: out += x[1] * b3; break;
      }
    }
    return out;
  }

 private:
  int r_;
  std::shared_ptr<const ScalarFunction> psi_x5_;
  std::array<std::shared_ptr<const ScalarFunction>, 3> psi_y_{};
  std::array<std::shared_ptr<const ScalarFunction>, 3> h_star_{};
  std::shared_ptr<const ScalarFunction> phi_z5_, phi_x6_, phi_z7_, phi_z8_;
  std::array<std::shared_ptr<const ScalarFunction>, 3> h_star_star_{};
  std::array<double, 4> w_;
};

/// Substitution variables of the K-form family in the eta invariants:
/// yhat[0] = eta1 eta5 - eta3/2 + 3/64 eta2^2 and, for r = 1..3 with
/// q = W_r (the weight), eta1 * [ eta1 eta_{5+r} - eta_{r+3+1}/2-ish terms ]:
/// the closed forms below come from substituting the eta-definitions into
/// X1 X_{5+r} - (W_r/W_0) X_{r+1} X_5.
template <class T>
std::array<T, 4> family_y_eta(const std::array<T, 8>& e, const std::array<double, 4>& w) {
  const T& e1 = e[0];
  std::array<T, 4> y;
  y[0] = e1 * e[4] - 0.5 * e[2] + (3.0 / 64.0) * e[1] * e[1];
  const double r1 = w[1] / w[0], r2 = w[2] / w[0], r3 = w[3] / w[0];
  y[1] = e1 * (e1 * e[5] - 0.5 * e[3] - r1 * e1 * e[1] * e[4] +
               (1.0 / 16.0 + 0.5 * r1) * e[1] * e[2] -
               (1.0 / 512.0 + (3.0 / 64.0) * r1) * e[1] * e[1] * e[1]);
  y[2] = e1 * (e1 * e[6] + (1.0 / 16.0) * e[1] * e[3] - r2 * e1 * e[2] * e[4] +
               0.5 * r2 * e[2] * e[2] -
               (1.0 / 512.0 + (3.0 / 64.0) * r2) * e[2] * e[1] * e[1]);
  y[3] = e1 * (e1 * e[7] - r3 * e1 * e[3] * e[4] + 0.5 * r3 * e[2] * e[3] -
               (1.0 / 512.0 + (3.0 / 64.0) * r3) * e[3] * e[1] * e[1]);
  return y;
}

class CompatKFunction final : public ScalarFunctionBase<CompatKFunction> {
 public:
  CompatKFunction(int r, std::shared_ptr<const ScalarFunction> theta,
                  std::array<std::shared_ptr<const ScalarFunction>, 3> k_star,
                  std::array<double, 4> w)
      : r_(r), k_star_(std::move(k_star)), w_(w) {
    if (theta->arity() != 8) throw ArityMismatch("theta must have 8 arguments");
    theta_y5_ = theta->partial(4);
    for (int i = 0; i < 3; ++i) theta_y_[i] = theta->partial(5 + i);
    for (const auto& f : k_star_)
      if (f && f->arity() != 7) throw ArityMismatch("K* must have 7 arguments");
  }

  int arity() const override { return 8; }

  template <class T>
  T eval_t(std::span<const T> a) const {
    std::array<T, 8> e;
    for (int i = 0; i < 8; ++i) e[i] = a[i];
    const auto y = family_y_eta(e, w_);
    const std::array<T, 8> ta{e[0], e[1], e[2], e[3], y[0], y[1], y[2], y[3]};
    const std::array<T, 7> ka{e[0], e[1], e[2], e[3], y[1], y[2], y[3]};
    std::array<T, 3> c;
    for (int i = 0; i < 3; ++i) {
      c[i] = theta_y_[i]->eval(std::span<const T>(ta));
      if (k_star_[i]) c[i] += k_star_[i]->eval(std::span<const T>(ka));
    }
    if (r_ == 0) {
      T out = theta_y5_->eval(std::span<const T>(ta));
      for (int i = 0; i < 3; ++i) out -= (w_[i + 1] / w_[0]) * e[0] * e[i + 1] * c[i];
      return out;
    }
    return e[0] * c[r_ - 1];
  }

 private:
  int r_;
  std::shared_ptr<const ScalarFunction> theta_y5_;
  std::array<std::shared_ptr<const ScalarFunction>, 3> theta_y_{};
  std::array<std::shared_ptr<const ScalarFunction>, 3> k_star_{};
  std::array<double, 4> w_;
};

/// K_r(eta) = eta1 * H_r(X(eta)): the change of variables that makes the
/// eta-form reproduce a given X-form closure.
class EtaFromXFunction final : public ScalarFunctionBase<EtaFromXFunction> {
 public:
  EtaFromXFunction(std::shared_ptr<const ScalarFunction> h) : h_(std::move(h)) {
    if (h_->arity() != 8) throw ArityMismatch("H must have 8 arguments");
  }
  int arity() const override { return 8; }

  template <class T>
  T eval_t(std::span<const T> a) const {
    const T& e1 = a[0];
    std::array<T, 8> x;
    x[0] = e1;
    for (int i = 1; i < 4; ++i) x[i] = e1 * a[i];
    x[4] = e1 * a[4] - 0.5 * a[2] + (3.0 / 64.0) * a[1] * a[1];
    x[5] = e1 * a[5] - 0.5 * a[3] + (1.0 / 16.0) * a[1] * a[2] -
           (1.0 / 512.0) * a[1] * a[1] * a[1];
    x[6] = e1 * a[6] + (1.0 / 16.0) * a[1] * a[3] - (1.0 / 512.0) * a[2] * a[1] * a[1];
    x[7] = e1 * a[7] - (1.0 / 512.0) * a[3] * a[1] * a[1];
    return e1 * h_->eval(std::span<const T>(x));
  }

 private:
  std::shared_ptr<const ScalarFunction> h_;
};

}  // namespace

ClosureSpec build_compat_family_X(std::shared_ptr<const ScalarFunction> psi,
                                  std::array<std::shared_ptr<const ScalarFunction>, 3> h_star,
                                  std::shared_ptr<const ScalarFunction> phi,
                                  std::array<std::shared_ptr<const ScalarFunction>, 3> h_star_star,
                                  const std::array<double, 4>& weights) {
  ClosureSpec spec;
  spec.form = ClosureForm::kXForm;
  for (int r = 0; r < 4; ++r)
    spec.functions.push_back(std::make_shared<CompatXFunction>(r, psi, h_star, phi,
                                                               h_star_star, weights));
  return spec;
}

ClosureSpec build_compat_family_K(std::shared_ptr<const ScalarFunction> theta,
                                  std::array<std::shared_ptr<const ScalarFunction>, 3> k_star,
                                  const std::array<double, 4>& weights) {
  ClosureSpec spec;
  spec.form = ClosureForm::kEtaForm;
  for (int r = 0; r < 4; ++r)
    spec.functions.push_back(std::make_shared<CompatKFunction>(r, theta, k_star, weights));
  return spec;
}

ClosureSpec eta_spec_from_x_spec(const ClosureSpec& x_spec) {
  if (x_spec.form != ClosureForm::kXForm) throw FormMismatch("expected an X-form spec");
  x_spec.validate();
  ClosureSpec out;
  out.form = ClosureForm::kEtaForm;
  for (const auto& h : x_spec.functions)
    out.functions.push_back(std::make_shared<EtaFromXFunction>(h));
  return out;
}

MomentSet compute_moments(const MultiplierState& s, const ClosureSpec& spec, double eps1) {
  const auto sd = seed_state14(s);
  const auto pot = assemble_potentials(sd, spec, eps1);

  const auto tensor_grad = [](const Dual<kStateDim>& r) {
    struct {
      double d_lambda;
      Vec3d d_i;
      Sym3d d_ij;
      Vec3d d_ill;
      double d_ppll;
    } g;
    g.d_lambda = r.g[0];
    for (int i = 0; i < 3; ++i) g.d_i[i] = r.g[1 + i];
    g.d_ij(0, 0) = r.g[4];
    g.d_ij(1, 1) = r.g[5];
    g.d_ij(2, 2) = r.g[6];
    g.d_ij(0, 1) = 0.5 * r.g[7];
    g.d_ij(0, 2) = 0.5 * r.g[8];
    g.d_ij(1, 2) = 0.5 * r.g[9];
    for (int i = 0; i < 3; ++i) g.d_ill[i] = r.g[10 + i];
    g.d_ppll = r.g[13];
    return g;
  };

  MomentSet m;
  const auto gh = tensor_grad(pot.h);
  m.f = gh.d_lambda;
  m.f_i = gh.d_i;
  m.f_ij = gh.d_ij;
  m.f_ill = gh.d_ill;
  m.f_iill = gh.d_ppll;
  for (int k = 0; k < 3; ++k) {
    const auto gp = tensor_grad(pot.phi[k]);
    m.f_k[k] = gp.d_lambda;
    for (int i = 0; i < 3; ++i) m.g_ki[k][i] = gp.d_i[i];
    m.g_kij[k] = gp.d_ij;
    for (int i = 0; i < 3; ++i) m.g_kill[k][i] = gp.d_ill[i];
    m.g_kiill[k] = gp.d_ppll;
  }
  return m;
}

nlohmann::json closure_to_json(const ClosureSpec& spec) {
  nlohmann::json j;
  j["form"] = closure_form_name(spec.form);
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : spec.functions) {
    const auto* p = dynamic_cast<const Polynomial*>(f.get());
    if (!p) throw ParseError("only polynomial-backed closures serialize to 'functions'");
    fs.push_back(p->to_json());
  }
  j["functions"] = fs;
  return j;
}

ClosureSpec closure_from_json(const nlohmann::json& j) {
  ClosureSpec spec;
  const std::string form = j.at("form").get<std::string>();
  if (form == "x")
    spec.form = ClosureForm::kXForm;
  else if (form == "eta")
    spec.form = ClosureForm::kEtaForm;
  else if (form == "sub5")
    spec.form = ClosureForm::kSubsystem5;
  else
    throw ParseError("unknown closure form: " + form);

  if (j.contains("family")) {
    const auto& fam = j.at("family");
    if (spec.form == ClosureForm::kXForm) {
      auto psi = fam.contains("psi") ? Polynomial::from_json(fam.at("psi")) : nullptr;
      auto phi = fam.contains("phi") ? Polynomial::from_json(fam.at("phi")) : nullptr;
      std::array<std::shared_ptr<const ScalarFunction>, 3> hs{}, hss{};
      if (fam.contains("h_star"))
        for (int i = 0; i < 3; ++i) hs[i] = Polynomial::from_json(fam.at("h_star").at(i));
      if (fam.contains("h_star_star"))
        for (int i = 0; i < 3; ++i) hss[i] = Polynomial::from_json(fam.at("h_star_star").at(i));
      if (!psi && !phi) throw ParseError("family needs psi or phi");
      return build_compat_family_X(psi, hs, phi, hss);
    }
    if (spec.form == ClosureForm::kEtaForm) {
      auto theta = Polynomial::from_json(fam.at("theta"));
      std::array<std::shared_ptr<const ScalarFunction>, 3> ks{};
      if (fam.contains("k_star"))
        for (int i = 0; i < 3; ++i) ks[i] = Polynomial::from_json(fam.at("k_star").at(i));
      return build_compat_family_K(theta, ks);
    }
    throw ParseError("family key is not valid for sub5");
  }

  for (const auto& fj : j.at("functions")) spec.functions.push_back(Polynomial::from_json(fj));
  spec.validate();
  return spec;
}

}  // namespace et14
