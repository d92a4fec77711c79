//! The three commuting families of relativistic projectors.
//!
//! With ε̂(p) = H(p)/E(p) and the internal rotation 2S₅₆ = iΓ₅Γ₆, the
//! families are
//!
//! * kind 1: ½(1 ± 2S₅₆) — internal label σ, momentum independent,
//! * kind 2: ½(1 ± 2ε̂S₅₆) — the invariant product εσ,
//! * kind 3: ½(1 ± ε̂) — energy sign ε.
//!
//! All three square to themselves, are Hermitian, commute with H(p) and with
//! each other at fixed p, and each has rank 4.  A `ProjectorSpec` denotes the
//! literal matrix ½(1 + sign·X_kind).

use serde::{Deserialize, Serialize};

use crate::clifford::{two_s56, GammaSet};
use crate::error::{Dirac8Error, Result};
use crate::field::SpinorField;
use crate::matrix::{scaled_identity, Matrix8};
use crate::operator::{apply, generator};
use crate::poincare::{energy, GeneratorId, HamiltonianKernel};
use crate::scalar::{cr, fd, Real};

/// ε̂(p) = H(p)/E(p); the unit-normalized energy-sign operator.
pub fn epsilon_hat_matrix<T: Real>(gs: &GammaSet<T>, p: &[T; 3], m: T) -> Result<Matrix8<T>> {
    let e = energy(p, m);
    if fd(e) < 1e-300 {
        return Err(Dirac8Error::LightlikeDegeneratePoint);
    }
    Ok(HamiltonianKernel::new(gs, m).at(p) * cr(T::ONE / e))
}

/// Identifies one projector: `kind` ∈ {1, 2, 3}, `sign` ∈ {+1, −1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjectorSpec {
    pub kind: u8,
    pub sign: i8,
}

impl ProjectorSpec {
    pub fn new(kind: u8, sign: i8) -> Result<Self> {
        if !(1..=3).contains(&kind) {
            return Err(Dirac8Error::InvalidParameter(format!(
                "projector kind must be 1, 2, or 3 (got {kind})"
            )));
        }
        if sign != 1 && sign != -1 {
            return Err(Dirac8Error::InvalidParameter(format!(
                "projector sign must be +1 or −1 (got {sign})"
            )));
        }
        Ok(ProjectorSpec { kind, sign })
    }

    /// All six projectors in canonical order.
    pub const ALL: [ProjectorSpec; 6] = [
        ProjectorSpec { kind: 1, sign: 1 },
        ProjectorSpec { kind: 1, sign: -1 },
        ProjectorSpec { kind: 2, sign: 1 },
        ProjectorSpec { kind: 2, sign: -1 },
        ProjectorSpec { kind: 3, sign: 1 },
        ProjectorSpec { kind: 3, sign: -1 },
    ];

    /// The complementary projector 1 − P, i.e. the opposite sign.
    pub fn complement(self) -> Self {
        ProjectorSpec {
            kind: self.kind,
            sign: -self.sign,
        }
    }

    pub fn name(self) -> String {
        format!(
            "P{}{}",
            self.kind,
            if self.sign > 0 { "+" } else { "-" }
        )
    }

    /// True when the projector is a constant matrix (kind 1); the other two
    /// kinds act per momentum mode.
    pub fn is_pointwise(self) -> bool {
        self.kind == 1
    }
}

/// Evaluates projector matrices at momenta without rebuilding the Γ products.
#[derive(Clone, Debug)]
pub struct ProjectorKernel<T: Real> {
    spec: ProjectorSpec,
    ham: HamiltonianKernel<T>,
    kind1: Matrix8<T>,
}

impl<T: Real> ProjectorKernel<T> {
    pub fn new(spec: ProjectorSpec, gs: &GammaSet<T>, m: T) -> Self {
        let s = cr(crate::scalar::r::<T>(spec.sign as f64));
        let kind1 = (scaled_identity(T::ONE) + two_s56(gs) * s) * cr(crate::scalar::r(0.5));
        ProjectorKernel {
            spec,
            ham: HamiltonianKernel::new(gs, m),
            kind1,
        }
    }

    /// The projector matrix at momentum p.
    pub fn at(&self, p: &[T; 3]) -> Matrix8<T> {
        match self.spec.kind {
            1 => self.kind1,
            2 => {
                // 2ε̂S₅₆: since 2S₅₆ = diag(I₄, −I₄), right-multiplication
                // flips the sign of columns 4..8 of ε̂.
                let eps = self.ham.epsilon_at(p);
                let mut x = eps;
                for row in 0..8 {
                    for col in 4..8 {
                        x[(row, col)] = -x[(row, col)];
                    }
                }
                half_plus(self.spec.sign, &x)
            }
            3 => half_plus(self.spec.sign, &self.ham.epsilon_at(p)),
            _ => unreachable!("validated kind"),
        }
    }
}

fn half_plus<T: Real>(sign: i8, x: &Matrix8<T>) -> Matrix8<T> {
    let s = cr(crate::scalar::r::<T>(0.5 * sign as f64));
    scaled_identity(crate::scalar::r::<T>(0.5)) + x * s
}

/// The literal projector matrix ½(1 + sign·X_kind) at momentum p.
pub fn projector_matrix<T: Real>(
    spec: ProjectorSpec,
    gs: &GammaSet<T>,
    p: &[T; 3],
    m: T,
) -> Result<Matrix8<T>> {
    if fd(energy(p, m)) < 1e-300 {
        return Err(Dirac8Error::LightlikeDegeneratePoint);
    }
    Ok(ProjectorKernel::new(spec, gs, m).at(p))
}

/// Apply a projector to a field.  Kind 1 acts pointwise; kinds 2 and 3 act
/// mode-by-mode in momentum space.  The mass parameter is taken from the
/// field.
pub fn apply_projector<T: Real>(
    spec: ProjectorSpec,
    f: &SpinorField<T>,
    gs: &GammaSet<T>,
) -> SpinorField<T> {
    let kernel = ProjectorKernel::new(spec, gs, f.m);
    if spec.is_pointwise() {
        f.multiplied_by_matrix(&kernel.kind1)
    } else {
        f.map_momentum_matrix(|k| kernel.at(k))
    }
}

/// ‖P(G f) − G(P f)‖ / ‖f‖: field-level commutation of a projector with a
/// Poincaré generator.
pub fn generator_commutation_residual<T: Real>(
    spec: ProjectorSpec,
    id: GeneratorId,
    gs: &GammaSet<T>,
    f: &SpinorField<T>,
) -> Result<T> {
    let g = generator(id, gs, f.m);
    let gf = apply(&g, f)?;
    let pgf = apply_projector(spec, &gf, gs);
    let pf = apply_projector(spec, f, gs);
    let gpf = apply(&g, &pf)?;
    let mut res = pgf;
    res.add_scaled(crate::scalar::c(-1.0, 0.0), &gpf)?;
    Ok(res.norm() / f.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_gamma_set;
    use crate::field::localized_packet;
    use crate::grid::Grid;
    use crate::matrix::{
        commutator_norm, hermiticity_residual, idempotency_residual, max_abs,
    };
    use crate::poincare::hamiltonian_matrix;
    use crate::sampling;

    #[test]
    fn epsilon_hat_squares_to_identity_and_flags_degenerate_points() {
        let gs = build_gamma_set::<f64>();
        let mut rng = sampling::rng(21);
        for _ in 0..100 {
            let p = sampling::momentum(&mut rng, 2.0);
            let m = sampling::mass(&mut rng, 0.2, 2.5);
            let eps = epsilon_hat_matrix(&gs, &p, m).unwrap();
            assert!(max_abs(&(eps * eps - scaled_identity(1.0))) < 1e-12);
            assert!(hermiticity_residual(&eps) < 1e-13);
        }
        assert!(matches!(
            epsilon_hat_matrix(&gs, &[0.0; 3], 0.0),
            Err(Dirac8Error::LightlikeDegeneratePoint)
        ));
    }

    #[test]
    fn rest_frame_epsilon_hat_is_gamma0_gamma4() {
        let gs = build_gamma_set::<f64>();
        let eps = epsilon_hat_matrix(&gs, &[0.0; 3], 1.7).unwrap();
        assert!(max_abs(&(eps - gs.gamma[0] * gs.gamma[4])) < 1e-14);
    }

    #[test]
    fn projector_family_invariants_hold_at_random_momenta() {
        let gs = build_gamma_set::<f64>();
        let mut rng = sampling::rng(22);
        for _ in 0..100 {
            let p = sampling::momentum(&mut rng, 2.0);
            let m = sampling::mass(&mut rng, 0.2, 2.5);
            let h = hamiltonian_matrix(&gs, &p, m);
            for spec in ProjectorSpec::ALL {
                let pm = projector_matrix(spec, &gs, &p, m).unwrap();
                assert!(idempotency_residual(&pm) < 1e-13, "{} not idempotent", spec.name());
                assert!(hermiticity_residual(&pm) < 1e-13);
                assert!(commutator_norm(&pm, &h) < 1e-12, "{} vs H", spec.name());
                // Complement sums to the identity and annihilates.
                let pc = projector_matrix(spec.complement(), &gs, &p, m).unwrap();
                assert!(max_abs(&(pm + pc - scaled_identity(1.0))) < 1e-13);
                assert!(max_abs(&(pm * pc)) < 1e-13);
                // Each projector has rank 4 (trace 4, and P is idempotent).
                let tr = crate::matrix::trace(&pm);
                assert!((tr.re - 4.0).abs() < 1e-12 && tr.im.abs() < 1e-13);
            }
            // The three families commute pairwise at fixed momentum.
            for a in ProjectorSpec::ALL {
                for b in ProjectorSpec::ALL {
                    let pa = projector_matrix(a, &gs, &p, m).unwrap();
                    let pb = projector_matrix(b, &gs, &p, m).unwrap();
                    assert!(commutator_norm(&pa, &pb) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn kind_relation_p2_is_product_structure() {
        // 2ε̂S₅₆ = ε̂·(2S₅₆), so the kind-2 projector is built from commuting
        // factors: P₂⁺ = P₃⁺P₁⁺ + P₃⁻P₁⁻ (εσ = +1 in both terms).
        let gs = build_gamma_set::<f64>();
        let mut rng = sampling::rng(23);
        for _ in 0..20 {
            let p = sampling::momentum(&mut rng, 2.0);
            let m = sampling::mass(&mut rng, 0.2, 2.5);
            let get = |k: u8, s: i8| {
                projector_matrix(ProjectorSpec::new(k, s).unwrap(), &gs, &p, m).unwrap()
            };
            let lhs = get(2, 1);
            let rhs = get(3, 1) * get(1, 1) + get(3, -1) * get(1, -1);
            assert!(max_abs(&(lhs - rhs)) < 1e-13);
        }
    }

    #[test]
    fn spec_validation_and_names() {
        assert!(ProjectorSpec::new(0, 1).is_err());
        assert!(ProjectorSpec::new(4, 1).is_err());
        assert!(ProjectorSpec::new(2, 0).is_err());
        let s = ProjectorSpec::new(2, -1).unwrap();
        assert_eq!(s.name(), "P2-");
        assert_eq!(s.complement().name(), "P2+");
    }

    #[test]
    fn field_level_projection_is_idempotent_and_contractive() {
        let gs = build_gamma_set::<f64>();
        let g = Grid::new(1, 128, 40.0).unwrap();
        let v = sampling::spinor(&mut sampling::rng(31));
        let f = localized_packet(g, 1.0, &[0.0; 3], 2.0, &[0.8, 0.0, 0.0], &v).unwrap();
        for spec in ProjectorSpec::ALL {
            let pf = apply_projector(spec, &f, &gs);
            let ppf = apply_projector(spec, &pf, &gs);
            let mut res = ppf.clone();
            res.add_scaled(crate::scalar::c(-1.0, 0.0), &pf).unwrap();
            assert!(res.norm() < 1e-10, "{} not idempotent on fields", spec.name());
            assert!(pf.norm() <= f.norm() + 1e-12);
            // Complementary halves reassemble the field.
            let qf = apply_projector(spec.complement(), &f, &gs);
            let mut sum = pf.clone();
            sum.add_scaled(crate::scalar::c(1.0, 0.0), &qf).unwrap();
            sum.add_scaled(crate::scalar::c(-1.0, 0.0), &f).unwrap();
            assert!(sum.norm() < 1e-10);
        }
    }

    #[test]
    fn projectors_commute_with_sample_generators_on_fields() {
        // Kinds 2 and 3 have nonlocal position kernels decaying like
        // e^{−m|x|}; the box must be large enough (m·L/2 ≫ 14) that the
        // wrapped kernel tail stays below the 1e-6 target.
        let gs = build_gamma_set::<f64>();
        let g = Grid::new(2, 64, 36.0).unwrap();
        let v = sampling::spinor(&mut sampling::rng(32));
        let f = localized_packet(g, 1.0, &[0.3, -0.2, 0.0], 1.8, &[0.7, 0.4, 0.0], &v).unwrap();
        for spec in [
            ProjectorSpec { kind: 1, sign: 1 },
            ProjectorSpec { kind: 2, sign: 1 },
            ProjectorSpec { kind: 3, sign: -1 },
        ] {
            for id in [GeneratorId::J12, GeneratorId::J01, GeneratorId::P2] {
                let r = generator_commutation_residual(spec, id, &gs, &f).unwrap();
                assert!(
                    r < 1e-6,
                    "[{}, {}] field residual {r:.3e}",
                    spec.name(),
                    id.name()
                );
            }
        }
    }

    #[test]
    fn f32_projectors_hold_at_reduced_tolerance() {
        let gs = build_gamma_set::<f32>();
        let p = [0.4f32, -0.7, 0.2];
        for spec in ProjectorSpec::ALL {
            let pm = projector_matrix(spec, &gs, &p, 1.0f32).unwrap();
            assert!(idempotency_residual(&pm) < 1e-5);
        }
    }
}
