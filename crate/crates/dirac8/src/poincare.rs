//! Poincaré generators: the per-momentum Hamiltonian matrix, the generator
//! identifiers, and the bracket table their field realizations must close.
//!
//! The boost generators are implemented as J_0a = −½(x_aH + Hx_a) at the
//! t = 0 slice — the symmetrized form, which is the unique choice that
//! closes the algebra (validated by the boost-boost commutator tests).

use num_complex::Complex;

use crate::clifford::{spin_generator, GammaSet};
use crate::matrix::Matrix8;
use crate::scalar::{cr, Real};

/// E(p) = √(p² + m²).
pub fn energy<T: Real>(p: &[T; 3], m: T) -> T {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + m * m).sqrt()
}

/// H(p) = Γ₀Γ_a p_a + Γ₀Γ₄ m.  Hermitian, with H² = (p² + m²)·I₈.
pub fn hamiltonian_matrix<T: Real>(gs: &GammaSet<T>, p: &[T; 3], m: T) -> Matrix8<T> {
    HamiltonianKernel::new(gs, m).at(p)
}

/// Precomputed matrix coefficients of H(p), for loops that evaluate H at
/// many momenta: H(p) = Σ_a p_a · (Γ₀Γ_a) + m · (Γ₀Γ₄).
#[derive(Clone, Debug)]
pub struct HamiltonianKernel<T: Real> {
    p_terms: [Matrix8<T>; 3],
    mass_term: Matrix8<T>,
    pub m: T,
}

impl<T: Real> HamiltonianKernel<T> {
    pub fn new(gs: &GammaSet<T>, m: T) -> Self {
        let g0 = &gs.gamma[0];
        HamiltonianKernel {
            p_terms: [g0 * gs.gamma[1], g0 * gs.gamma[2], g0 * gs.gamma[3]],
            mass_term: g0 * gs.gamma[4] * cr(m),
            m,
        }
    }

    pub fn at(&self, p: &[T; 3]) -> Matrix8<T> {
        let mut h = self.mass_term;
        for a in 0..3 {
            h += self.p_terms[a] * cr(p[a]);
        }
        h
    }

    /// ε̂(p) = H(p)/E(p).
    pub fn epsilon_at(&self, p: &[T; 3]) -> Matrix8<T> {
        self.at(p) * cr(T::ONE / energy(p, self.m))
    }
}

/// The ten generators of the t = 0 slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorId {
    H,
    P1,
    P2,
    P3,
    J12,
    J23,
    J31,
    J01,
    J02,
    J03,
}

impl GeneratorId {
    pub const ALL: [GeneratorId; 10] = [
        GeneratorId::H,
        GeneratorId::P1,
        GeneratorId::P2,
        GeneratorId::P3,
        GeneratorId::J12,
        GeneratorId::J23,
        GeneratorId::J31,
        GeneratorId::J01,
        GeneratorId::J02,
        GeneratorId::J03,
    ];

    /// The six generators acting within the (x₁, x₂) plane; this subset is
    /// closed under the bracket table and is the one exercised on 2D grids.
    pub const PLANE_2D: [GeneratorId; 6] = [
        GeneratorId::H,
        GeneratorId::P1,
        GeneratorId::P2,
        GeneratorId::J12,
        GeneratorId::J01,
        GeneratorId::J02,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorId::H => "H",
            GeneratorId::P1 => "P1",
            GeneratorId::P2 => "P2",
            GeneratorId::P3 => "P3",
            GeneratorId::J12 => "J12",
            GeneratorId::J23 => "J23",
            GeneratorId::J31 => "J31",
            GeneratorId::J01 => "J01",
            GeneratorId::J02 => "J02",
            GeneratorId::J03 => "J03",
        }
    }

    /// Translation index P_ρ (ρ = 0 for H), or None for rotations/boosts.
    pub fn translation_index(self) -> Option<usize> {
        match self {
            GeneratorId::H => Some(0),
            GeneratorId::P1 => Some(1),
            GeneratorId::P2 => Some(2),
            GeneratorId::P3 => Some(3),
            _ => None,
        }
    }

    /// Lorentz index pair (μ, ν) for J_μν, or None for translations.
    pub fn lorentz_indices(self) -> Option<(usize, usize)> {
        match self {
            GeneratorId::J12 => Some((1, 2)),
            GeneratorId::J23 => Some((2, 3)),
            GeneratorId::J31 => Some((3, 1)),
            GeneratorId::J01 => Some((0, 1)),
            GeneratorId::J02 => Some((0, 2)),
            GeneratorId::J03 => Some((0, 3)),
            _ => None,
        }
    }

    /// Inverse of `lorentz_indices` up to antisymmetry: the canonical id for
    /// J_μν together with the sign relating it to the canonical orientation.
    fn from_lorentz(mu: usize, nu: usize) -> Option<(GeneratorId, f64)> {
        if mu == nu {
            return None;
        }
        for id in Self::ALL {
            if let Some((a, b)) = id.lorentz_indices() {
                if (a, b) == (mu, nu) {
                    return Some((id, 1.0));
                }
                if (a, b) == (nu, mu) {
                    return Some((id, -1.0));
                }
            }
        }
        None
    }

    fn from_translation(rho: usize) -> GeneratorId {
        match rho {
            0 => GeneratorId::H,
            1 => GeneratorId::P1,
            2 => GeneratorId::P2,
            3 => GeneratorId::P3,
            _ => unreachable!("translation index out of range"),
        }
    }
}

/// Spacetime metric g_μν = diag(+1, −1, −1, −1).
fn metric4(mu: usize, nu: usize) -> f64 {
    if mu != nu {
        0.0
    } else if mu == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The bracket table: [A, B] as a (complex coefficient, generator) sum.
///
/// Convention (validated numerically, not assumed):
///   [J_μν, J_ρσ] = i(g_μσ J_νρ + g_νρ J_μσ − g_μρ J_νσ − g_νσ J_μρ)
///   [J_μν, P_ρ]  = i(g_νρ P_μ − g_μρ P_ν)
///   [P_μ, P_ν]   = 0
pub fn expected_bracket(a: GeneratorId, b: GeneratorId) -> Vec<(Complex<f64>, GeneratorId)> {
    let i = Complex::new(0.0, 1.0);
    let mut terms: Vec<(Complex<f64>, GeneratorId)> = Vec::new();
    let mut push = |coeff: Complex<f64>, id: GeneratorId| {
        if coeff.norm() > 0.0 {
            if let Some(entry) = terms.iter_mut().find(|(_, t)| *t == id) {
                entry.0 += coeff;
            } else {
                terms.push((coeff, id));
            }
        }
    };

    match (a.lorentz_indices(), b.lorentz_indices()) {
        (Some((mu, nu)), Some((rho, sigma))) => {
            let contributions = [
                (metric4(mu, sigma), nu, rho),
                (metric4(nu, rho), mu, sigma),
                (-metric4(mu, rho), nu, sigma),
                (-metric4(nu, sigma), mu, rho),
            ];
            for (g, x, y) in contributions {
                if g != 0.0 {
                    if let Some((id, sign)) = GeneratorId::from_lorentz(x, y) {
                        push(i * g * sign, id);
                    }
                }
            }
        }
        (Some((mu, nu)), None) => {
            let rho = b.translation_index().expect("not a J ⇒ a translation");
            let g_nr = metric4(nu, rho);
            if g_nr != 0.0 {
                push(i * g_nr, GeneratorId::from_translation(mu));
            }
            let g_mr = metric4(mu, rho);
            if g_mr != 0.0 {
                push(-i * g_mr, GeneratorId::from_translation(nu));
            }
        }
        (None, Some(_)) => {
            for (coeff, id) in expected_bracket(b, a) {
                push(-coeff, id);
            }
        }
        (None, None) => {}
    }
    terms.retain(|(coeff, _)| coeff.norm() > 0.0);
    terms
}

/// Spin part of a generator: S_ab for rotations, S_0a for boosts, zero for
/// translations (H's matrix part is the full Hamiltonian, handled by the
/// field realization).
pub fn spin_part<T: Real>(gs: &GammaSet<T>, id: GeneratorId) -> Matrix8<T> {
    match id.lorentz_indices() {
        Some((mu, nu)) => {
            spin_generator(gs, mu, nu)
                .expect("distinct indices")
                .matrix
        }
        None => Matrix8::<T>::zeros(),
    }
}

/// On-shell 4-momentum (p₀ = ε·E(p), ε = ±1).
pub fn on_shell_p0<T: Real>(p: &[T; 3], m: T, epsilon: i8) -> T {
    let e = energy(p, m);
    if epsilon >= 0 {
        e
    } else {
        -e
    }
}

/// |p₀² − p² − m²|, the mass-shell residual of a 4-momentum.
pub fn mass_shell_residual<T: Real>(p0: T, p: &[T; 3], m: T) -> T {
    let e2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + m * m;
    (p0 * p0 - e2).abs()
}
