#pragma once

// Brackets of currents with Hamiltonian sections and densities, the Lie
// bracket of currents, and the affine isomorphisms relating dh and Gamma_h.

#include <vector>

#include "hdw/bundle.hpp"

namespace hdw {

// Components (A_alpha, A^alpha_i) of a vertical covector on the phase space.
template <class T>
struct PhaseComponents {
  std::vector<T> Au;               // [alpha]
  std::vector<std::vector<T>> Ap;  // [i][alpha]
};

// Constrained data of a class of connections: u-components and the trace of
// the momentum components.
template <class T>
struct GammaSection {
  std::vector<std::vector<T>> hu;  // [i][alpha]
  std::vector<T> hp;               // [alpha]
};

template <class T>
GammaSection<T> sharp_aff(const PhaseComponents<T>& pc) {
  GammaSection<T> g;
  g.hu = pc.Ap;
  g.hp.reserve(pc.Au.size());
  for (const auto& a : pc.Au) g.hp.push_back(-a);
  return g;
}

template <class T>
PhaseComponents<T> a_hat(const GammaSection<T>& g) {
  PhaseComponents<T> pc;
  pc.Ap = g.hu;
  pc.Au.reserve(g.hp.size());
  for (const auto& a : g.hp) pc.Au.push_back(-a);
  return pc;
}

PhaseComponents<Expression> dh_components(const HamiltonianSection& h);
GammaSection<Expression> gamma_h(const HamiltonianSection& h);

// Local connection coefficients: hu[i][alpha] = H^alpha_i and
// hp[i][alpha][j] = H^j_{alpha i}.
struct ConnectionCoefficients {
  std::vector<std::vector<Expression>> hu;
  std::vector<std::vector<std::vector<Expression>>> hp;
};

// The connection determined by gamma_h with the trace placed on the
// diagonal entries H^i_{alpha i} = -dH/du^alpha / m.
ConnectionCoefficients canonical_connection(const HamiltonianSection& h);

struct ConnectionCheck {
  bool hamiltonian = false;
  bool symbolic = false;  // decided by simplification alone
  double max_residual = 0.0;
};

// Only H^alpha_i and the trace sum_i H^i_{alpha i} are constrained.
ConnectionCheck connection_is_hamiltonian(const ConnectionCoefficients& c,
                                          const HamiltonianSection& h,
                                          const std::vector<Binding>& samples,
                                          double tolerance = 1e-12);

// {alpha0, h}: coefficient of d^m x.
DensityCoefficient bracket_affine(const Current& c, const HamiltonianSection& h);
// One-dimensional base: df/dt + {f, H}.
DensityCoefficient bracket_affine(const Expression& f,
                                  const HamiltonianSection& h);

// {alpha0, F}_l.
DensityCoefficient bracket_linear(const Current& c, const DensityCoefficient& F,
                                  const Chart& chart);
// One-dimensional base: canonical Poisson bracket {f, g}.
DensityCoefficient bracket_linear(const Expression& f, const Expression& g,
                                  const Chart& chart);

// Lie bracket of currents; requires m >= 2.
Current current_bracket(const Current& a, const Current& b, const Chart& chart);

struct VerticalField {
  std::vector<Expression> vu;               // [alpha]
  std::vector<std::vector<Expression>> vp;  // [i][beta]
  Expression vpext;                         // extended-momentum component
};

VerticalField hamiltonian_field(const Current& c, const Chart& chart);

// max over samples of |{{a,b}_O,h} - {a,{b,h}}_l + {b,{a,h}}_l|.
double representation_residual(const Current& a, const Current& b,
                               const HamiltonianSection& h,
                               const std::vector<Binding>& samples);
// One-dimensional base, with the Poisson bracket as the Lie bracket.
double representation_residual(const Expression& f, const Expression& g,
                               const HamiltonianSection& h,
                               const std::vector<Binding>& samples);

// Expression of the representation residual itself (m >= 2).
Expression representation_defect(const Current& a, const Current& b,
                                  const HamiltonianSection& h);

// Max |e| over the samples, evaluated through a compiled form.
double max_abs_over(const Expression& e, const std::vector<Binding>& samples);

}  // namespace hdw
