#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "blab/errors.hpp"
#include "blab/meanfield.hpp"
#include "blab/model.hpp"
#include "blab/operators.hpp"
#include "blab/projections.hpp"
#include "blab/state.hpp"

namespace blab {

// Condensate-dependent one- and two-body tables at a single time stamp.
// Two-body kernels already carry the 1/(N-1) prefactor.
class EffectivePieces {
 public:
  EffectivePieces() = default;
  EffectivePieces(const Model& model, const Condensate& c) : t_(c.time()), mu_(c.mu_value()), vbar_(c.vbar_values()) {
    const Lattice& lat = model.lattice;
    const int m = lat.sites();
    // Trajectory samples may carry integrator drift; p is the exact
    // projector onto span(phi) either way.
    const double n2 = c.norm() * c.norm();
    p_ = (1.0 / n2) * OneBodyOperator::outer(lat, c.phi(), c.phi());
    p_.set_hermitian(true);
    q_ = OneBodyOperator::identity(m) - p_;
    q_.set_hermitian(true);
    h_ = c.h_phi();
    const double pref = model.pair_prefactor();
    const std::size_t md = static_cast<std::size_t>(m);
    std::vector<double> v(md * md), zc(md * md), zq(md * md);
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < m; ++s) {
        const double w = model.interaction(r, s);
        v[r * md + s] = w;
        zc[r * md + s] = w - vbar_[r] - vbar_[s];
        zq[r * md + s] = w - vbar_[r] - vbar_[s] + 2.0 * mu_;
      }
    interacting_ = pref != 0.0 && !model.interaction.is_zero();
    if (!interacting_) {
      tilde_ = TwoBodyKernel(m);
      cubic_ = TwoBodyKernel(m);
      quartic_ = TwoBodyKernel(m);
      return;
    }
    TwoBodyKernel a = TwoBodyKernel::sandwich(p_, q_, v, q_, p_);
    a += TwoBodyKernel::sandwich(p_, p_, v, q_, q_);
    tilde_ = a + a.adjoint();
    tilde_ *= pref;
    TwoBodyKernel b = TwoBodyKernel::sandwich(q_, q_, zc, q_, p_);
    b += TwoBodyKernel::sandwich(q_, q_, zc, p_, q_);
    cubic_ = b + b.adjoint();
    cubic_ *= pref;
    quartic_ = TwoBodyKernel::sandwich(q_, q_, zq, q_, q_);
    quartic_ *= pref;
  }

  double time() const { return t_; }
  double mu_value() const { return mu_; }
  const std::vector<double>& vbar_values() const { return vbar_; }
  const OneBodyOperator& p() const { return p_; }
  const OneBodyOperator& q() const { return q_; }
  const OneBodyOperator& h_phi() const { return h_; }
  // (N-1)^{-1} (p q v q p + p p v q q + h.c.)
  const TwoBodyKernel& tilde_kernel() const { return tilde_; }
  // (N-1)^{-1} (q q Z (q p + p q) + h.c.)
  const TwoBodyKernel& cubic_kernel() const { return cubic_; }
  // (N-1)^{-1} q q Z q q
  const TwoBodyKernel& quartic_kernel() const { return quartic_; }
  bool interacting() const { return interacting_; }

  void require_time(double t) const {
    if (std::abs(t - t_) > 1e-12 * std::max(1.0, std::abs(t)))
      throw StaleCacheError("effective pieces built at t = " + std::to_string(t_) + " used at t = " + std::to_string(t));
  }

 private:
  double t_ = 0.0;
  double mu_ = 0.0;
  std::vector<double> vbar_;
  OneBodyOperator p_, q_, h_;
  TwoBodyKernel tilde_, cubic_, quartic_;
  bool interacting_ = false;
};

template <class Space>
class Hamiltonians {
 public:
  using state_type = typename Space::state_type;

  Hamiltonians(Space sp, const Model& model) : sp_(std::move(sp)), model_(&model) {
    if (sp_.particles() != model.particles() || !(sp_.lattice() == model.lattice))
      throw ShapeError("space does not match the model");
  }

  const Space& space() const { return sp_; }
  const Model& model() const { return *model_; }

  // sum_j (-Delta_j + V^ext(t, x_j)) + (N-1)^{-1} sum_{i<j} v_ij
  state_type apply_H(double t, const state_type& psi) const {
    state_type out = sp_.one_body_sum(model_->one_body(t), psi);
    const double pref = model_->pair_prefactor();
    if (pref != 0.0 && !model_->interaction.is_zero()) out.add_scaled(pref, sp_.pair_diagonal(model_->interaction, psi));
    return out;
  }

  state_type apply_Htilde(const EffectivePieces& e, const state_type& psi) const {
    state_type out = sp_.one_body_sum(e.h_phi(), psi);
    if (e.interacting()) out += sp_.pair_sum(e.tilde_kernel(), psi);
    return out;
  }
  state_type apply_Htilde(const EffectivePieces& e, double t, const state_type& psi) const {
    e.require_time(t);
    return apply_Htilde(e, psi);
  }

  state_type apply_C(const EffectivePieces& e, const state_type& psi) const {
    if (!e.interacting()) return sp_.zero();
    return sp_.pair_sum(e.cubic_kernel(), psi);
  }
  state_type apply_C(const EffectivePieces& e, double t, const state_type& psi) const {
    e.require_time(t);
    return apply_C(e, psi);
  }

  state_type apply_Q(const EffectivePieces& e, const state_type& psi) const {
    if (!e.interacting()) return sp_.zero();
    return sp_.pair_sum(e.quartic_kernel(), psi);
  }
  state_type apply_Q(const EffectivePieces& e, double t, const state_type& psi) const {
    e.require_time(t);
    return apply_Q(e, psi);
  }

  // ||(H - Htilde - C - Q) psi|| / ||psi||
  double decomposition_residual(double t, const EffectivePieces& e, const state_type& psi) const {
    e.require_time(t);
    state_type r = apply_H(t, psi);
    r -= apply_Htilde(e, psi);
    r -= apply_C(e, psi);
    r -= apply_Q(e, psi);
    const double n = norm(psi);
    return n == 0.0 ? norm(r) : norm(r) / n;
  }

 private:
  Space sp_;
  const Model* model_;
};

// ||m^j chi||^2 for an arbitrary (unnormalised, symmetric) chi.
template <class Space>
double m_moment_of(const Space& sp, const SiteFunction& phi, const typename Space::state_type& chi, int j) {
  SpectralWeights w;
  for (int k = 0; k <= sp.particles(); ++k) {
    const double nk = norm(apply_Pk(sp, k, phi, chi));
    w.w.push_back(nk * nk);
  }
  return m_moment(w, j);
}

struct QCRatios {
  double r_q = 0.0;
  double r_c = 0.0;
};

// r_Q(j) = ||m^j Q psi||^2 / (N^{2+2d beta} ||m^{4+j} psi||^2)
// r_C(j) = ||m^j C psi||^2 / (4^j |phi|^2_Hk N^{2+d beta} ||m^{3+j} psi||^2)
template <class Space>
QCRatios qc_ratios(const Hamiltonians<Space>& ham, const Condensate& c, const EffectivePieces& e,
                   const typename Space::state_type& psi, int j) {
  const auto& sp = ham.space();
  const auto& cfg = ham.model().config;
  const double n = sp.particles();
  const double db = cfg.dimension * cfg.beta;
  QCRatios r;
  const double qnum = m_moment_of(sp, c.phi(), ham.apply_Q(e, psi), j);
  const double cnum = m_moment_of(sp, c.phi(), ham.apply_C(e, psi), j);
  r.r_q = qnum / (std::pow(n, 2.0 + 2.0 * db) * m_moment_of(sp, c.phi(), psi, 4 + j));
  r.r_c = cnum / (std::pow(4.0, j) * hk_proxy(c.lattice(), c.phi()) * std::pow(n, 2.0 + db) *
                  m_moment_of(sp, c.phi(), psi, 3 + j));
  return r;
}

}  // namespace blab
