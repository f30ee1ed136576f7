#pragma once

#include <string>

#include "lamcon/laurent.hpp"

namespace lamcon {

/// Tangent vector of the space of (holomorphic structure, Higgs field) pairs:
/// a (0,1)-slot gamma and a (1,0)-slot beta, both trace-free.
struct TangentPair {
    GridField gamma;  // 1-form with vanishing dz part
    GridField beta;   // 1-form with vanishing dzbar part
};

/// Check type purity of the two slots (to 1e-12 relative).
void validate(const TangentPair& t);

TangentPair make_tangent(GridField gamma, GridField beta);

struct EnergyReport {
    cplx energy{0.0, 0.0};
    double trunc_err = 0.0;  // truncation budget inherited from the family
    double quad_err = 0.0;   // a-posteriori coarse-grid quadrature estimate
    std::string family_id;
};

/// E = (1 / 2 pi i) * integral of tr(Phi ^ Psi), with Phi the k = -1
/// coefficient (required pure (1,0)) and Psi the (0,1)-part of the k = +1
/// coefficient of the family.
EnergyReport energy(const LambdaFamily& fam);

/// E(sigma^* s) for sigma in {tau, rho}; for any admissible-shaped family this
/// equals conj(E(s)). Families with a wider Laurent range are rejected.
cplx energy_sigma(const LambdaFamily& fam, Involution s);

/// Moment map of the rotating circle action: mu = -integral tr(Phi ^ Phi*).
/// Purely imaginary for any (1,0)-form Phi.
cplx moment_map(const GridField& phi);

/// Holomorphic symplectic form of the flat model:
/// omega_C(t1, t2) = 2i * integral tr(beta_2 ^ gamma_1 - beta_1 ^ gamma_2).
cplx omega_c(const TangentPair& t1, const TangentPair& t2);

/// Contraction of omega_C with the circle direction X = (0, i Phi) at the
/// point (dbar, Phi): i_X omega_C(t) = 2 * integral tr(Phi ^ gamma_t).
cplx contract_Y(const GridField& phi, const TangentPair& t);

/// Right-hand side of the residue formula:
///   res = -integral tr(Phi ^ (gamma_lift - gamma_ref)) + mu.
/// With gamma_ref the Phi*-slot of the twistor line through the point and
/// mu = -integral tr(Phi ^ Phi*), the identity E = (i / 2 pi) res holds for
/// any lift tangent (the Phi* contributions cancel algebraically).
cplx residue_rhs(const GridField& phi, const TangentPair& lift_tangent,
                 const TangentPair& reference_tangent, cplx mu);

}  // namespace lamcon
