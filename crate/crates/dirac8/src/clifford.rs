//! Seven-element Clifford system Γ₀…Γ₆ and the spin matrices built from it.
//!
//! Construction: Γ_μ = s₃ ⊗ γ_μ (μ = 0..3), Γ₄ = i·s₃ ⊗ γ₅, Γ₅ = i·s₁ ⊗ I₄,
//! Γ₆ = i·s₂ ⊗ I₄, with s₁,s₂,s₃ the Pauli matrices and γ_μ a Dirac-basis
//! 4×4 set (γ₀ diagonal, γ₅ = iγ₀γ₁γ₂γ₃).  Every entry lies in {0, ±1, ±i},
//! so the algebraic identities hold exactly in floating point.  The signature
//! is (+,−,−,−,−,−,−): Γ₄² = −I is forced so that squaring the wave equation
//! yields the mass shell p² = m².

use crate::error::{Dirac8Error, Result};
use crate::matrix::{kron2x4, max_abs, scaled_identity, Matrix2, Matrix4, Matrix8};
use crate::scalar::{c, cabs, ci, cr, Real};

/// Metric signature g = (+1, −1, −1, −1, −1, −1, −1).
pub const METRIC_SIGNATURE: [f64; 7] = [1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0];

/// The seven 8×8 Γ matrices together with their metric signature.
#[derive(Clone, Debug)]
pub struct GammaSet<T: Real> {
    /// gamma[A] for A ∈ {0..6}.
    pub gamma: [Matrix8<T>; 7],
    /// Diagonal metric entries g_AA.
    pub metric: [T; 7],
}

/// An antisymmetrized spin matrix S_AB = (i/4)[Γ_A, Γ_B].
#[derive(Clone, Debug)]
pub struct SpinMatrix<T: Real> {
    pub mu: usize,
    pub nu: usize,
    pub matrix: Matrix8<T>,
}

/// Pauli matrix s_k (k = 1, 2, 3).
pub fn pauli<T: Real>(k: usize) -> Matrix2<T> {
    let mut m = Matrix2::<T>::zeros();
    match k {
        1 => {
            m[(0, 1)] = c(1.0, 0.0);
            m[(1, 0)] = c(1.0, 0.0);
        }
        2 => {
            m[(0, 1)] = c(0.0, -1.0);
            m[(1, 0)] = c(0.0, 1.0);
        }
        3 => {
            m[(0, 0)] = c(1.0, 0.0);
            m[(1, 1)] = c(-1.0, 0.0);
        }
        _ => panic!("Pauli index must be 1, 2, or 3"),
    }
    m
}

/// Dirac-basis 4×4 set: returns (γ₀, γ₁, γ₂, γ₃, γ₅) with γ₀ = diag(1,1,−1,−1)
/// and γ₅ = iγ₀γ₁γ₂γ₃ (computed, not transcribed).
pub fn dirac_gammas<T: Real>() -> [Matrix4<T>; 5] {
    let mut g0 = Matrix4::<T>::zeros();
    g0[(0, 0)] = c(1.0, 0.0);
    g0[(1, 1)] = c(1.0, 0.0);
    g0[(2, 2)] = c(-1.0, 0.0);
    g0[(3, 3)] = c(-1.0, 0.0);

    let block = |s: &Matrix2<T>| {
        // γ_k = [[0, s_k], [−s_k, 0]]
        let mut m = Matrix4::<T>::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m[(i, 2 + j)] = s[(i, j)];
                m[(2 + i, j)] = -s[(i, j)];
            }
        }
        m
    };
    let g1 = block(&pauli(1));
    let g2 = block(&pauli(2));
    let g3 = block(&pauli(3));
    let g5 = (g0 * g1 * g2 * g3) * ci::<T>();
    [g0, g1, g2, g3, g5]
}

/// Build the documented Γ system.  The construction is self-checked: any
/// violated anticommutation relation aborts with a diagnostic naming the
/// offending pairs (this can only happen on an internal bug).
pub fn build_gamma_set<T: Real>() -> GammaSet<T> {
    let [g0, g1, g2, g3, g5] = dirac_gammas::<T>();
    let s1 = pauli::<T>(1);
    let s2 = pauli::<T>(2);
    let s3 = pauli::<T>(3);
    let i4 = Matrix4::<T>::identity();

    let gamma = [
        kron2x4(&s3, &g0),
        kron2x4(&s3, &g1),
        kron2x4(&s3, &g2),
        kron2x4(&s3, &g3),
        kron2x4(&s3, &g5) * ci::<T>(),
        kron2x4(&s1, &i4) * ci::<T>(),
        kron2x4(&s2, &i4) * ci::<T>(),
    ];

    let mut metric = [T::ZERO; 7];
    for (a, g) in METRIC_SIGNATURE.iter().enumerate() {
        metric[a] = crate::scalar::r(*g);
    }

    let gs = GammaSet { gamma, metric };
    let residuals = clifford_pair_residuals(&gs);
    let tol = crate::scalar::r::<T>(1e-13);
    let violated: Vec<String> = (0..7)
        .flat_map(|a| (a..7).map(move |b| (a, b)))
        .filter(|&(a, b)| residuals[a][b] > tol)
        .map(|(a, b)| format!("(Γ{a}, Γ{b}): residual {:?}", residuals[a][b]))
        .collect();
    if !violated.is_empty() {
        panic!(
            "Clifford construction self-check failed; violated relations:\n{}",
            violated.join("\n")
        );
    }
    gs
}

/// Residual ‖Γ_AΓ_B + Γ_BΓ_A − 2g_AB·I‖ for one ordered pair (A ≤ B for the
/// canonical 28; the matrix is symmetric).
pub fn clifford_pair_residuals<T: Real>(gs: &GammaSet<T>) -> [[T; 7]; 7] {
    let mut out = [[T::ZERO; 7]; 7];
    for a in 0..7 {
        for b in a..7 {
            let anti = gs.gamma[a] * gs.gamma[b] + gs.gamma[b] * gs.gamma[a];
            let target = if a == b {
                scaled_identity(gs.metric[a] + gs.metric[a])
            } else {
                Matrix8::<T>::zeros()
            };
            let r = max_abs(&(anti - target));
            out[a][b] = r;
            out[b][a] = r;
        }
    }
    out
}

/// Max over all 28 pairs (A ≤ B) of ‖Γ_AΓ_B + Γ_BΓ_A − 2g_AB·I‖.
pub fn clifford_residual<T: Real>(gs: &GammaSet<T>) -> T {
    let residuals = clifford_pair_residuals(gs);
    let mut best = T::ZERO;
    for a in 0..7 {
        for b in a..7 {
            if residuals[a][b] > best {
                best = residuals[a][b];
            }
        }
    }
    best
}

/// S_AB = (i/4)(Γ_AΓ_B − Γ_BΓ_A).  For anticommuting pairs this equals
/// (i/2)Γ_AΓ_B; in particular S₅₆ matches the grade operator (i/2)Γ₅Γ₆.
pub fn spin_generator<T: Real>(gs: &GammaSet<T>, a: usize, b: usize) -> Result<SpinMatrix<T>> {
    if a == b {
        return Err(Dirac8Error::DegenerateIndexPair(a));
    }
    if a > 6 || b > 6 {
        return Err(Dirac8Error::InvalidParameter(format!(
            "spin generator indices must lie in 0..=6 (got {a}, {b})"
        )));
    }
    let comm = gs.gamma[a] * gs.gamma[b] - gs.gamma[b] * gs.gamma[a];
    let quarter_i = c::<T>(0.0, 0.25);
    Ok(SpinMatrix {
        mu: a,
        nu: b,
        matrix: comm * quarter_i,
    })
}

/// The grade operator 2S₅₆ = iΓ₅Γ₆ (equals s₃ ⊗ I₄ in this construction).
pub fn two_s56<T: Real>(gs: &GammaSet<T>) -> Matrix8<T> {
    gs.gamma[5] * gs.gamma[6] * ci::<T>()
}

/// A Γ-monomial: the ascending-order product of the Γ's selected by `mask`
/// (bit A set ⟺ Γ_A present; mask 0 is the identity).
#[derive(Clone, Debug)]
pub struct Monomial<T: Real> {
    pub mask: u8,
    pub matrix: Matrix8<T>,
}

impl<T: Real> Monomial<T> {
    /// Ascending list of Γ indices in this product.
    pub fn indices(&self) -> Vec<usize> {
        (0..7).filter(|a| self.mask & (1 << a) != 0).collect()
    }

    /// Number of Γ factors.
    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// Human-readable name such as "Γ0Γ4" ("I" for the empty product).
    pub fn name(&self) -> String {
        if self.mask == 0 {
            "I".to_string()
        } else {
            self.indices()
                .iter()
                .map(|a| format!("G{a}"))
                .collect::<Vec<_>>()
                .join("")
        }
    }
}

/// All 128 Γ-monomials indexed by subset mask (ascending-index products).
pub fn monomials<T: Real>(gs: &GammaSet<T>) -> Vec<Monomial<T>> {
    let mut out: Vec<Monomial<T>> = Vec::with_capacity(128);
    out.push(Monomial {
        mask: 0,
        matrix: Matrix8::<T>::identity(),
    });
    for mask in 1u8..=127 {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1); // lowest set bit cleared
        let matrix = gs.gamma[low] * out[rest as usize].matrix;
        out.push(Monomial { mask, matrix });
    }
    out
}

/// The 128 monomial matrices in canonical subset order (element 0 = I₈).
pub fn monomial_basis<T: Real>(gs: &GammaSet<T>) -> Vec<Matrix8<T>> {
    monomials(gs).into_iter().map(|m| m.matrix).collect()
}

/// Canonical phase representative: divide by the phase of the first nonzero
/// entry in row-major order, making that entry real positive.
pub fn phase_canonical<T: Real>(m: &Matrix8<T>) -> Matrix8<T> {
    for i in 0..8 {
        for j in 0..8 {
            let z = m[(i, j)];
            let a = cabs(z);
            if a > crate::scalar::r(1e-300) {
                let phase = z / cr(a);
                return m * phase.conj();
            }
        }
    }
    *m
}
