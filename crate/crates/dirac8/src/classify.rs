//! Four-sector spectral classification, the three four-component
//! reductions, and the κ-modified equation kernel.
//!
//! At every momentum the commuting Hermitian pair (ε̂, 2S₅₆) splits C⁸ into
//! four 2-dimensional sectors labeled by (ε, σ).  A fixed bijection maps
//! (ε, σ) to the four irreducible representation labels; each projector
//! family of rank 4 keeps one pair of sectors, which is the content of the
//! three four-component reductions and of their mutual nonequivalence.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::clifford::{spin_generator, two_s56, GammaSet};
use crate::error::{Dirac8Error, Result};
use crate::matrix::{commutator_norm, max_abs, scaled_identity, Matrix4, Matrix8, Vector8};
use crate::poincare::{energy, hamiltonian_matrix};
use crate::projector::{projector_matrix, ProjectorKernel, ProjectorSpec};
use crate::scalar::{c0, cr, fd, r, Real, C};

/// The four irreducible sector labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RepLabel {
    #[serde(rename = "D+(s,0)")]
    DPlusS0,
    #[serde(rename = "D-(s,0)")]
    DMinusS0,
    #[serde(rename = "D+(0,s)")]
    DPlus0S,
    #[serde(rename = "D-(0,s)")]
    DMinus0S,
}

impl RepLabel {
    pub const ALL: [RepLabel; 4] = [
        RepLabel::DPlusS0,
        RepLabel::DMinusS0,
        RepLabel::DPlus0S,
        RepLabel::DMinus0S,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RepLabel::DPlusS0 => "D+(s,0)",
            RepLabel::DMinusS0 => "D-(s,0)",
            RepLabel::DPlus0S => "D+(0,s)",
            RepLabel::DMinus0S => "D-(0,s)",
        }
    }

    /// Short machine-friendly name used in CSV column headers.
    pub fn short(self) -> &'static str {
        match self {
            RepLabel::DPlusS0 => "Dp_s0",
            RepLabel::DMinusS0 => "Dm_s0",
            RepLabel::DPlus0S => "Dp_0s",
            RepLabel::DMinus0S => "Dm_0s",
        }
    }
}

impl std::fmt::Display for RepLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The fixed (ε, σ) → label bijection.
///
/// It is the unique assignment consistent simultaneously with the three
/// reductions: the σ = +1 pair is {D⁺(s,0), D⁻(0,s)}, the εσ = +1 pair is
/// {D⁺(s,0), D⁻(s,0)}, and the ε = +1 pair is {D⁺(s,0), D⁺(0,s)}
/// (uniqueness is asserted by exhaustive enumeration in the tests).
pub fn rep_label(epsilon: i8, sigma: i8) -> RepLabel {
    match (epsilon, sigma) {
        (1, 1) => RepLabel::DPlusS0,
        (-1, 1) => RepLabel::DMinus0S,
        (1, -1) => RepLabel::DPlus0S,
        (-1, -1) => RepLabel::DMinusS0,
        _ => panic!("epsilon and sigma must be ±1 (got ({epsilon}, {sigma}))"),
    }
}

/// Inverse of `rep_label`.
pub fn label_signs(label: RepLabel) -> (i8, i8) {
    match label {
        RepLabel::DPlusS0 => (1, 1),
        RepLabel::DMinus0S => (-1, 1),
        RepLabel::DPlus0S => (1, -1),
        RepLabel::DMinusS0 => (-1, -1),
    }
}

/// One sector of the plane-wave solution space at a fixed momentum.
#[derive(Clone, Debug)]
pub struct PlaneWaveMode<T: Real> {
    pub p: [T; 3],
    pub m: T,
    /// Sign of energy: eigenvalue of ε̂.
    pub epsilon: i8,
    /// Internal grade: eigenvalue of 2S₅₆.
    pub sigma: i8,
    pub rep_label: RepLabel,
    /// Signed energy ε·E(p).
    pub energy: T,
    /// Two orthonormal spanning vectors of the sector.
    pub basis: [Vector8<T>; 2],
}

/// |p₀² − p² − m²| with p₀ = ε·E(p); zero by construction for classified
/// modes, reported as an honest recomputation.
pub fn klein_gordon_residual<T: Real>(mode: &PlaneWaveMode<T>) -> T {
    let p2 = mode.p[0] * mode.p[0] + mode.p[1] * mode.p[1] + mode.p[2] * mode.p[2];
    (mode.energy * mode.energy - p2 - mode.m * mode.m).abs()
}

/// Sector traversal order: ε descending, then σ descending.
pub const SECTOR_ORDER: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Simultaneous eigendecomposition of (H(p), 2S₅₆) into the four sectors.
///
/// Sectors are extracted with the commuting projector products
/// ½(1 + ε·ε̂)·½(1 + σ·2S₅₆) rather than by eigenvalue sorting, which keeps
/// the 4-fold degenerate ±E levels cleanly separated.  Within a sector the
/// basis is fixed deterministically: the two projector columns of largest
/// norm, orthonormalized in column-index order.
pub fn classify_modes<T: Real>(
    gs: &GammaSet<T>,
    p: &[T; 3],
    m: T,
) -> Result<Vec<PlaneWaveMode<T>>> {
    if m <= T::ZERO {
        return Err(Dirac8Error::NonPositiveMass(fd(m)));
    }
    let h = hamiltonian_matrix(gs, p, m);
    let s = two_s56(gs);
    let comm = commutator_norm(&h, &s);
    if fd(comm) > 1e-12 {
        return Err(Dirac8Error::DegeneracyResolutionFailure {
            commutator: fd(comm),
        });
    }
    let e = energy(p, m);
    let mut modes = Vec::with_capacity(4);
    for (eps, sig) in SECTOR_ORDER {
        let pe = projector_matrix(ProjectorSpec::new(3, eps)?, gs, p, m)?;
        let ps = projector_matrix(ProjectorSpec::new(1, sig)?, gs, p, m)?;
        let q = pe * ps;
        let basis = sector_basis(&q)?;
        modes.push(PlaneWaveMode {
            p: *p,
            m,
            epsilon: eps,
            sigma: sig,
            rep_label: rep_label(eps, sig),
            energy: r::<T>(eps as f64) * e,
            basis,
        });
    }
    Ok(modes)
}

/// Deterministic 2-vector basis of a rank-2 projector: columns by
/// descending norm (index ascending on ties), greedily orthonormalized.
fn sector_basis<T: Real>(q: &Matrix8<T>) -> Result<[Vector8<T>; 2]> {
    let mut order: Vec<usize> = (0..8).collect();
    let norms: Vec<T> = (0..8)
        .map(|j| {
            let col = q.column(j);
            let mut s = T::ZERO;
            for i in 0..8 {
                s = s + col[i].norm_sqr();
            }
            s
        })
        .collect();
    order.sort_by(|&a, &b| {
        norms[b]
            .partial_cmp(&norms[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut picked: Vec<Vector8<T>> = Vec::new();
    for j in order {
        if picked.len() == 2 {
            break;
        }
        let mut v = Vector8::from_fn(|i, _| q[(i, j)]);
        for u in &picked {
            let overlap = u.dotc(&v);
            v -= u * overlap;
        }
        let n2 = {
            let mut s = T::ZERO;
            for i in 0..8 {
                s = s + v[i].norm_sqr();
            }
            s
        };
        if fd(n2) > 1e-12 {
            v /= cr(n2.sqrt());
            picked.push(v);
        }
    }
    if picked.len() != 2 {
        return Err(Dirac8Error::InvalidParameter(
            "sector projector is not rank 2".into(),
        ));
    }
    Ok([picked[0], picked[1]])
}

/// Report on the σ = sign four-component reduction (the coordinate-block
/// view of the Dirac-type operator).
#[derive(Clone, Debug)]
pub struct DiracReductionReport<T: Real> {
    pub sign: i8,
    /// Max anticommutator residual of the induced γ̃_μ (μ = 0..3) against
    /// the (+,−,−,−) metric.
    pub clifford_residual: T,
    /// ‖B² + I₄‖ for the induced mass coupling B.
    pub mass_coupling_residual: T,
    /// Max ‖{γ̃_μ, B}‖: the mass coupling anticommutes with all four γ̃_μ.
    pub anticoupling_residual: T,
    /// Sorted (ascending) spectrum of the induced 4×4 Hamiltonian block at
    /// each sample momentum.
    pub spectra: Vec<[T; 4]>,
    /// Max deviation of those spectra from {−E, −E, +E, +E}.
    pub dirac_spectrum_residual: T,
}

fn block4<T: Real>(m8: &Matrix8<T>, sign: i8) -> Matrix4<T> {
    let off = if sign > 0 { 0 } else { 4 };
    Matrix4::from_fn(|i, j| m8[(i + off, j + off)])
}

fn offblock_norm<T: Real>(m8: &Matrix8<T>) -> T {
    let mut best = T::ZERO;
    for i in 0..8 {
        for j in 0..8 {
            if (i < 4) != (j < 4) {
                let a = m8[(i, j)].norm_sqr();
                if a > best {
                    best = a;
                }
            }
        }
    }
    best.sqrt()
}

/// Extract the 4×4 view of the wave operator on the σ = sign eigenspace of
/// 2S₅₆ and verify it is a genuine Dirac system: the induced γ̃_μ close a
/// 4-dimensional Clifford algebra and the mass coupling B squares to −I.
pub fn dirac_reduction_report<T: Real>(
    gs: &GammaSet<T>,
    sign: i8,
    sample_momenta: &[[T; 3]],
    m: T,
) -> Result<DiracReductionReport<T>> {
    if sign != 1 && sign != -1 {
        return Err(Dirac8Error::InvalidParameter(format!(
            "reduction sign must be ±1 (got {sign})"
        )));
    }
    // Internal precondition: 2S₅₆ and the Γ_μ entering the wave operator
    // must be block-diagonal in the coordinate basis, otherwise the naive
    // corner extraction would silently produce garbage.
    let s = two_s56(gs);
    let mut block_res = offblock_norm(&s);
    let expected_diag = block4(&s, sign) - scaled_identity4(r::<T>(sign as f64));
    block_res = block_res.max(max_abs(&expected_diag));
    for mu in 0..5 {
        block_res = block_res.max(offblock_norm(&gs.gamma[mu]));
    }
    if fd(block_res) > 1e-13 {
        return Err(Dirac8Error::InvalidParameter(format!(
            "block extraction requires 2S56 in diagonal form (residual {:.3e})",
            fd(block_res)
        )));
    }

    let gt: Vec<Matrix4<T>> = (0..4).map(|mu| block4(&gs.gamma[mu], sign)).collect();
    let b = block4(&gs.gamma[4], sign);

    let mut clifford_residual = T::ZERO;
    for mu in 0..4 {
        for nu in 0..4 {
            let metric = if mu == nu {
                if mu == 0 {
                    r::<T>(2.0)
                } else {
                    r::<T>(-2.0)
                }
            } else {
                T::ZERO
            };
            let anti = gt[mu] * gt[nu] + gt[nu] * gt[mu] - scaled_identity4(metric);
            clifford_residual = clifford_residual.max(max_abs(&anti));
        }
    }
    let mass_coupling_residual = max_abs(&(b * b + scaled_identity4(T::ONE)));
    let mut anticoupling_residual = T::ZERO;
    for g in &gt {
        anticoupling_residual = anticoupling_residual.max(max_abs(&(g * b + b * g)));
    }

    let mut spectra = Vec::with_capacity(sample_momenta.len());
    let mut dirac_spectrum_residual = T::ZERO;
    for p in sample_momenta {
        let h4 = block4(&hamiltonian_matrix(gs, p, m), sign);
        let eigs = hermitian_eigenvalues4(&h4);
        let e = energy(p, m);
        let expected = [-e, -e, e, e];
        for i in 0..4 {
            dirac_spectrum_residual = dirac_spectrum_residual.max((eigs[i] - expected[i]).abs());
        }
        spectra.push(eigs);
    }
    Ok(DiracReductionReport {
        sign,
        clifford_residual,
        mass_coupling_residual,
        anticoupling_residual,
        spectra,
        dirac_spectrum_residual,
    })
}

fn scaled_identity4<T: Real>(x: T) -> Matrix4<T> {
    Matrix4::from_fn(|i, j| if i == j { C::new(x, T::ZERO) } else { c0() })
}

fn hermitian_eigenvalues4<T: Real>(m: &Matrix4<T>) -> [T; 4] {
    let eig = nalgebra::SymmetricEigen::new(*m);
    let mut vals = [T::ZERO; 4];
    for i in 0..4 {
        vals[i] = eig.eigenvalues[i];
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Side-by-side view of the three reductions over shared momenta: the
/// spectrum of H restricted to each rank-4 range, and the sector labels the
/// range carries.
#[derive(Clone, Debug)]
pub struct ReductionComparison<T: Real> {
    pub momenta: Vec<[T; 3]>,
    /// Sorted induced spectra per kind (index 0 ↔ kind 1, …), per momentum.
    pub kind_spectra: [Vec<[T; 4]>; 3],
    /// The two sector labels spanned by each kind's + range (sorted).
    pub kind_labels: [[RepLabel; 2]; 3],
    /// Max elementwise deviation between the kind-1 and kind-2 spectra.
    pub spectra_dev_12: T,
}

/// Compare the ranges of P₁⁺, P₂⁺, P₃⁺ over shared momenta.
pub fn reduction_comparison<T: Real>(
    gs: &GammaSet<T>,
    momenta: &[[T; 3]],
    m: T,
) -> Result<ReductionComparison<T>> {
    let mut kind_spectra: [Vec<[T; 4]>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut kind_labels: [Option<[RepLabel; 2]>; 3] = [None, None, None];
    for p in momenta {
        let modes = classify_modes(gs, p, m)?;
        for kind in 1..=3u8 {
            // The + range keeps the sectors with the matching sign product.
            let keeps: Vec<&PlaneWaveMode<T>> = modes
                .iter()
                .filter(|md| match kind {
                    1 => md.sigma == 1,
                    2 => md.epsilon * md.sigma == 1,
                    _ => md.epsilon == 1,
                })
                .collect();
            let mut labels: Vec<RepLabel> = keeps.iter().map(|md| md.rep_label).collect();
            labels.sort();
            let labels: [RepLabel; 2] = [labels[0], labels[1]];
            match &kind_labels[kind as usize - 1] {
                None => kind_labels[kind as usize - 1] = Some(labels),
                Some(prev) => {
                    if *prev != labels {
                        return Err(Dirac8Error::InvalidParameter(format!(
                            "kind-{kind} range labels vary with momentum: {prev:?} vs {labels:?}"
                        )));
                    }
                }
            }
            // Induced 4×4 matrix U†HU on the orthonormal range basis.
            let h = hamiltonian_matrix(gs, p, m);
            let cols: Vec<Vector8<T>> = keeps
                .iter()
                .flat_map(|md| md.basis.iter().copied())
                .collect();
            let induced = Matrix4::from_fn(|i, j| cols[i].dotc(&(h * cols[j])));
            kind_spectra[kind as usize - 1].push(hermitian_eigenvalues4(&induced));
        }
    }
    let mut spectra_dev_12 = T::ZERO;
    for (a, b) in kind_spectra[0].iter().zip(&kind_spectra[1]) {
        for i in 0..4 {
            spectra_dev_12 = spectra_dev_12.max((a[i] - b[i]).abs());
        }
    }
    Ok(ReductionComparison {
        momenta: momenta.to_vec(),
        kind_spectra,
        kind_labels: [
            kind_labels[0].unwrap(),
            kind_labels[1].unwrap(),
            kind_labels[2].unwrap(),
        ],
        spectra_dev_12,
    })
}

/// Null-space analysis of the κ-modified wave operator at one on-shell
/// 4-momentum.
#[derive(Clone, Debug)]
pub struct KernelReport<T: Real> {
    pub kappa: T,
    pub kind: u8,
    /// Null-space dimension (0..=8).
    pub dimension: usize,
    /// Max ‖P_cond v‖ over the normalized null basis: satisfaction of the
    /// subsidiary condition enforced by the κ term.
    pub constraint_residual: T,
    /// Max ‖(Γ_μp^μ − Γ₄m) v‖ over the null basis: null vectors satisfy the
    /// unmodified wave equation.
    pub mass_shell_residual: T,
    /// Orthonormal basis of the null space.
    pub null_basis: Vec<Vector8<T>>,
    pub warning: Option<String>,
}

impl<T: Real> KernelReport<T> {
    /// Orthogonal projector onto the null space, for κ-stability checks.
    pub fn null_projector(&self) -> Matrix8<T> {
        let mut q = Matrix8::zeros();
        for v in &self.null_basis {
            q += v * v.adjoint();
        }
        q
    }
}

/// The free Dirac-type wave operator D(p) = Γ_μp^μ − Γ₄m = Γ₀(p₀ − H(p)).
pub fn wave_operator<T: Real>(gs: &GammaSet<T>, p4: &[T; 4], m: T) -> Matrix8<T> {
    let h = hamiltonian_matrix(gs, &[p4[1], p4[2], p4[3]], m);
    gs.gamma[0] * (scaled_identity(p4[0]) - h)
}

/// The penalized condition projector for each kind: the subsidiary
/// condition the κ term enforces is P_cond Ψ = 0 with P_cond = P₁⁺, P₂⁺,
/// P₃⁻ for kinds 1, 2, 3.  (Kind 3 penalizes the negative-energy half, so
/// the surviving solutions have positive energy.)
pub fn default_condition_spec(kind: u8) -> Result<ProjectorSpec> {
    match kind {
        1 => ProjectorSpec::new(1, 1),
        2 => ProjectorSpec::new(2, 1),
        3 => ProjectorSpec::new(3, -1),
        _ => Err(Dirac8Error::InvalidParameter(format!(
            "kind must be 1, 2, or 3 (got {kind})"
        ))),
    }
}

/// Kernel analysis with the default per-kind condition projector.
pub fn modified_equation_kernel<T: Real>(
    gs: &GammaSet<T>,
    kind: u8,
    kappa: T,
    p4: &[T; 4],
    m: T,
) -> Result<KernelReport<T>> {
    modified_equation_kernel_signed(gs, default_condition_spec(kind)?, kappa, p4, m)
}

/// Kernel analysis of M = D(p) + κ·Γ₀·P_cond for an explicit condition
/// projector.
///
/// The Γ₀ factor makes the constraint block-diagonal against (p₀ − H):
/// multiplying the equation by Γ₀ gives (p₀ − H)Ψ = −κ P_cond Ψ, and since
/// every projector kind commutes with H the null space is exactly
/// null(p₀ − H) ∩ null(P_cond) for every κ ∉ {0, −2E} — κ-independent, with
/// the subsidiary condition emerging automatically.
pub fn modified_equation_kernel_signed<T: Real>(
    gs: &GammaSet<T>,
    cond: ProjectorSpec,
    kappa: T,
    p4: &[T; 4],
    m: T,
) -> Result<KernelReport<T>> {
    if m <= T::ZERO {
        return Err(Dirac8Error::NonPositiveMass(fd(m)));
    }
    let p = [p4[1], p4[2], p4[3]];
    let e2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + m * m;
    let shell = (p4[0] * p4[0] - e2).abs();
    let scale = p4[0] * p4[0] + e2;
    if fd(shell) > 1e-10 * fd(scale) {
        return Err(Dirac8Error::OffShell {
            residual: fd(shell),
        });
    }
    let d = wave_operator(gs, p4, m);
    let p_cond = ProjectorKernel::new(cond, gs, m).at(&p);
    let mut warning = None;
    let mut mat = d;
    if kappa == T::ZERO {
        warning = Some("constraint not enforced: kappa = 0".to_string());
    } else {
        mat += gs.gamma[0] * p_cond * cr(kappa);
    }

    let null_basis = null_space(&mat);
    let mut constraint_residual = T::ZERO;
    let mut mass_shell_residual = T::ZERO;
    for v in &null_basis {
        constraint_residual = constraint_residual.max(vec_norm(&(p_cond * v)));
        mass_shell_residual = mass_shell_residual.max(vec_norm(&(d * v)));
    }
    Ok(KernelReport {
        kappa,
        kind: cond.kind,
        dimension: null_basis.len(),
        constraint_residual,
        mass_shell_residual,
        null_basis,
        warning,
    })
}

fn vec_norm<T: Real>(v: &Vector8<T>) -> T {
    let mut s = T::ZERO;
    for i in 0..8 {
        s = s + v[i].norm_sqr();
    }
    s.sqrt()
}

/// Orthonormal null-space basis via singular value decomposition.
fn null_space<T: Real>(m: &Matrix8<T>) -> Vec<Vector8<T>> {
    let dm = DMatrix::from_fn(8, 8, |i, j| m[(i, j)]);
    let svd = dm.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd
        .singular_values
        .iter()
        .fold(T::ZERO, |acc, s| acc.max(*s));
    let tol = r::<T>(1e-8) * smax.max(T::ONE);
    let mut basis = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol {
            // Row i of V^T is the conjugate of the null direction.
            basis.push(Vector8::from_fn(|j, _| v_t[(i, j)].conj()));
        }
    }
    basis
}

/// Exact 90° rotation intertwiner in the (a, b) coordinate plane:
/// W = exp(−i·(π/2)·S_ab) = (1 − i·2S_ab)/√2, satisfying
/// W H(p) W† = H(p') with p' the rotated momentum.
pub fn quarter_turn<T: Real>(gs: &GammaSet<T>, a: usize, b: usize) -> Result<Matrix8<T>> {
    let s = spin_generator(gs, a, b)?;
    let root_half = cr(T::ONE / r::<T>(2.0).sqrt());
    Ok((scaled_identity(T::ONE) - s.matrix * C::new(T::ZERO, r::<T>(2.0))) * root_half)
}

/// Rotate p by 90° in the (a, b) plane (p_a → −p_b, p_b → p_a): the
/// momentum map matching `quarter_turn` conjugation.
pub fn quarter_turn_momentum<T: Real>(p: &[T; 3], a: usize, b: usize) -> [T; 3] {
    let mut q = *p;
    q[a - 1] = -p[b - 1];
    q[b - 1] = p[a - 1];
    q
}
