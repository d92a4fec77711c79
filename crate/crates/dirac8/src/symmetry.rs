//! Discrete-symmetry search: P, C, and Tᵖ as Γ-monomial intertwiners.
//!
//! Each symmetry is defined operationally by a conjugation contract on the
//! Hamiltonian family H(p) plus the sector-label action it is expected to
//! induce.  The search is exhaustive over the 128 Γ-monomials (composed with
//! entrywise complex conjugation for antilinear contracts); every hit is
//! re-validated on held-out momenta and its induced label permutation is
//! measured by classifying transformed sector bases.

use rayon::prelude::*;

use crate::classify::{classify_modes, label_signs, rep_label, RepLabel};
use crate::clifford::{monomials, phase_canonical, GammaSet, Monomial};
use crate::error::{Dirac8Error, Result};
use crate::matrix::{max_abs, unitarity_residual, Matrix8};
use crate::poincare::HamiltonianKernel;
use crate::sampling;
use crate::scalar::{cr, fd, r, Real};

/// Residual threshold below which a monomial counts as satisfying a
/// conjugation contract.
const HIT_TOL: f64 = 1e-12;

/// Seed for the three held-out validation momenta (distinct from any
/// caller-supplied search samples).
const HOLDOUT_SEED: u64 = 0x7E57_0_u64;

/// A permutation of the four sector labels, indexed by `RepLabel::ALL`
/// position: `map[i]` is the image of `RepLabel::ALL[i]`.
pub type LabelMap = [RepLabel; 4];

fn label_index(l: RepLabel) -> usize {
    RepLabel::ALL.iter().position(|x| *x == l).unwrap()
}

/// The identity label permutation.
pub fn identity_label_map() -> LabelMap {
    RepLabel::ALL
}

/// The permutation flipping ε and/or σ in the (ε, σ) ↔ label bijection.
pub fn label_map_from_flips(flip_epsilon: bool, flip_sigma: bool) -> LabelMap {
    RepLabel::ALL.map(|l| {
        let (e, s) = label_signs(l);
        rep_label(
            if flip_epsilon { -e } else { e },
            if flip_sigma { -s } else { s },
        )
    })
}

/// apply `a` after `b`: (a ∘ b)(l) = a(b(l)).
pub fn compose_label_maps(a: &LabelMap, b: &LabelMap) -> LabelMap {
    let mut out = identity_label_map();
    for i in 0..4 {
        out[i] = a[label_index(b[i])];
    }
    out
}

/// A permutation is an involution when applying it twice is the identity.
pub fn is_involution(map: &LabelMap) -> bool {
    compose_label_maps(map, map) == identity_label_map()
}

/// Operational definition of one discrete symmetry: the conjugation
/// contract on H(p) and the sector-label action the coupling diagram
/// predicts for it.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryContract {
    pub name: &'static str,
    /// Antilinear contracts conjugate entrywise before the matrix acts.
    pub antilinear: bool,
    /// Componentwise momentum map: p_a → momentum_signs[a]·p_a.
    pub momentum_signs: [i8; 3],
    /// Required relation sign: W·H̃(p)·W⁻¹ = target_sign·H(p′), where H̃ is
    /// H(p) (linear) or conj(H(p)) (antilinear) and p′ the mapped momentum.
    pub target_sign: i8,
    /// The diagram's predicted label permutation (always an involution).
    pub expected_label_action: LabelMap,
}

impl SymmetryContract {
    fn build(
        name: &'static str,
        antilinear: bool,
        momentum_signs: [i8; 3],
        target_sign: i8,
        expected_label_action: LabelMap,
    ) -> Self {
        assert!(
            is_involution(&expected_label_action),
            "diagram arrows are double-headed"
        );
        SymmetryContract {
            name,
            antilinear,
            momentum_signs,
            target_sign,
            expected_label_action,
        }
    }

    /// Parity: linear, spatial momentum flip, energy sign preserved.
    /// Diagram action: σ → −σ at fixed ε (the horizontal arrows).
    pub fn parity() -> Self {
        Self::build("P", false, [-1, -1, -1], 1, label_map_from_flips(false, true))
    }

    /// Charge conjugation: antilinear (entrywise conjugation then the
    /// matrix), momentum unchanged, Hamiltonian sign flipped.  Diagram
    /// action: the vertical arrows D±(s,0) ↔ D∓(s,0), D±(0,s) ↔ D∓(0,s),
    /// i.e. both ε and σ flip.
    pub fn charge_conjugation() -> Self {
        Self::build("C", true, [1, 1, 1], -1, label_map_from_flips(true, true))
    }

    /// Pauli time reversal: LINEAR (not Wigner-antilinear), with
    /// W·H(p)·W⁻¹ = −H(−p).  Shares the vertical diagram action with C.
    pub fn pauli_time_reversal() -> Self {
        Self::build("Tp", false, [-1, -1, -1], -1, label_map_from_flips(true, true))
    }

    /// Trivial contract (used for calibration): W·H(p)·W⁻¹ = H(p).
    pub fn identity() -> Self {
        Self::build("identity", false, [1, 1, 1], 1, identity_label_map())
    }

    /// The three physical contracts in report order.
    pub fn standard() -> [Self; 3] {
        [
            Self::parity(),
            Self::charge_conjugation(),
            Self::pauli_time_reversal(),
        ]
    }

    pub fn map_momentum<T: Real>(&self, p: &[T; 3]) -> [T; 3] {
        [
            p[0] * r(self.momentum_signs[0] as f64),
            p[1] * r(self.momentum_signs[1] as f64),
            p[2] * r(self.momentum_signs[2] as f64),
        ]
    }
}

/// Restrictions on the monomial search space (degraded-mode experiments).
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Bitmask of Γ indices a monomial may use (bit A ⟺ Γ_A allowed).
    pub allowed_mask: u8,
    /// Keep only even-length monomials.
    pub even_only: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            allowed_mask: 0x7F,
            even_only: false,
        }
    }
}

impl SearchOptions {
    fn allows(&self, mask: u8) -> bool {
        mask & !self.allowed_mask == 0 && (!self.even_only || mask.count_ones() % 2 == 0)
    }
}

/// One monomial satisfying a contract.
#[derive(Clone, Debug)]
pub struct IntertwinerResult<T: Real> {
    pub contract: &'static str,
    /// Subset mask of the monomial (bit A ⟺ Γ_A present).
    pub mask: u8,
    /// Ascending Γ indices of the monomial.
    pub indices: Vec<usize>,
    /// Human-readable monomial name ("G0G4", "I", …).
    pub monomial: String,
    /// Canonical-phase representative (first nonzero entry real positive).
    pub matrix: Matrix8<T>,
    /// Max relative conjugation residual over the search momenta.
    pub residual: T,
    /// ‖W†W − 1‖ for the canonical representative.
    pub unitarity: T,
    /// Max relative conjugation residual over the held-out momenta.
    pub holdout_residual: T,
    /// Induced sector permutation; `None` when the image of some sector
    /// straddles two sectors (cannot happen for monomials, recorded for
    /// honesty).
    pub label_map: Option<LabelMap>,
    /// Whether `label_map` equals the contract's expected action.
    pub matches_expected: bool,
}

/// Max relative residual of W·H̃(p)·W⁻¹ − sign·H(p′) over a momentum list.
/// W must be unitary (monomials are); W⁻¹ = W†.
fn conjugation_residual<T: Real>(
    w: &Matrix8<T>,
    contract: &SymmetryContract,
    kernel: &HamiltonianKernel<T>,
    momenta: &[[T; 3]],
) -> T {
    let wh = w.adjoint();
    let mut worst = T::ZERO;
    for p in momenta {
        let h = kernel.at(p);
        let src = if contract.antilinear { h.conjugate() } else { h };
        let target = kernel.at(&contract.map_momentum(p)) * cr(r::<T>(contract.target_sign as f64));
        let diff = w * src * wh - target;
        let scale = max_abs(&target).max(T::ONE);
        worst = worst.max(max_abs(&diff) / scale);
    }
    worst
}

/// Exhaustive monomial search for a contract (full search space).
///
/// Requires at least 8 generic sample momenta.  Every hit satisfies the
/// contract on all samples AND on 3 fresh held-out momenta to ≤ 1e-12, and
/// carries its induced label permutation.  An empty result is a valid
/// outcome, not an error.
pub fn find_intertwiners<T: Real>(
    contract: &SymmetryContract,
    gs: &GammaSet<T>,
    sample_momenta: &[[T; 3]],
    m: T,
) -> Result<Vec<IntertwinerResult<T>>> {
    find_intertwiners_with(contract, gs, sample_momenta, m, &SearchOptions::default())
        .map(|(hits, _)| hits)
}

/// `find_intertwiners` with search-space restrictions; also returns the
/// residual of every examined monomial (for near-miss reporting).
pub fn find_intertwiners_with<T: Real>(
    contract: &SymmetryContract,
    gs: &GammaSet<T>,
    sample_momenta: &[[T; 3]],
    m: T,
    opts: &SearchOptions,
) -> Result<(Vec<IntertwinerResult<T>>, Vec<(String, T)>)> {
    if sample_momenta.len() < 8 {
        return Err(Dirac8Error::InvalidParameter(format!(
            "intertwiner search needs at least 8 sample momenta (got {})",
            sample_momenta.len()
        )));
    }
    if m <= T::ZERO {
        return Err(Dirac8Error::NonPositiveMass(fd(m)));
    }
    let kernel = HamiltonianKernel::new(gs, m);
    let holdout = holdout_momenta::<T>();
    let mons = monomials(gs);
    let tol = r::<T>(HIT_TOL);

    // Embarrassingly parallel over the 128 monomials; the indexed collect
    // keeps the merge order deterministic (ascending mask).
    let scanned: Vec<(String, T, Option<(u8, Matrix8<T>, T)>)> = mons
        .par_iter()
        .map(|mono: &Monomial<T>| {
            if !opts.allows(mono.mask) {
                return (mono.name(), r::<T>(f64::INFINITY), None);
            }
            let residual = conjugation_residual(&mono.matrix, contract, &kernel, sample_momenta);
            if residual > tol {
                return (mono.name(), residual, None);
            }
            let canonical = phase_canonical(&mono.matrix);
            let hold = conjugation_residual(&canonical, contract, &kernel, &holdout);
            (mono.name(), residual, Some((mono.mask, canonical, hold)))
        })
        .collect();

    let mut hits = Vec::new();
    let mut examined = Vec::new();
    for (name, residual, candidate) in scanned {
        if fd(residual).is_finite() {
            examined.push((name.clone(), residual));
        }
        let Some((mask, canonical, holdout_residual)) = candidate else {
            continue;
        };
        if holdout_residual > tol {
            // A sample-only fit that fails fresh momenta is overfitted:
            // demote it to the examined pool rather than report it.
            continue;
        }
        let label_map = match induced_label_map(
            &canonical,
            contract.antilinear,
            contract.momentum_signs,
            gs,
            m,
            &sample_momenta[..3],
        ) {
            Ok(map) => Some(map),
            Err(Dirac8Error::NotSectorCovariant { .. }) => None,
            Err(e) => return Err(e),
        };
        let matches_expected = label_map.as_ref() == Some(&contract.expected_label_action);
        hits.push(IntertwinerResult {
            contract: contract.name,
            mask,
            indices: (0..7).filter(|a| mask & (1 << a) != 0).collect(),
            monomial: name,
            matrix: canonical,
            residual,
            unitarity: unitarity_residual(&canonical),
            holdout_residual,
            label_map,
            matches_expected,
        });
    }
    Ok((hits, examined))
}

fn holdout_momenta<T: Real>() -> Vec<[T; 3]> {
    sampling::momenta(HOLDOUT_SEED, 3, 2.0)
}

/// Sector permutation induced by a fixed matrix W: each sector basis vector
/// v at momentum p is mapped to W·v (W·conj(v) if antilinear) and classified
/// at the mapped momentum.  W must be a single momentum-independent matrix —
/// the signature enforces this — and invertible.
///
/// Errors with `NotSectorCovariant` when the image of a sector straddles two
/// sectors above the leakage tolerance (1e-10 in f64; scaled to the scalar's
/// precision), or when samples disagree on the permutation.
pub fn induced_label_map<T: Real>(
    w: &Matrix8<T>,
    antilinear: bool,
    momentum_signs: [i8; 3],
    gs: &GammaSet<T>,
    m: T,
    p_samples: &[[T; 3]],
) -> Result<LabelMap> {
    if p_samples.is_empty() {
        return Err(Dirac8Error::InvalidParameter(
            "induced_label_map needs at least one sample momentum".into(),
        ));
    }
    // Invertibility precondition (W is arbitrary here, not only monomials).
    let det = w.determinant();
    if fd(crate::scalar::cabs(det)) < 1e-12 {
        return Err(Dirac8Error::InvalidParameter(
            "intertwiner matrix is numerically singular".into(),
        ));
    }
    let leak_tol = r::<T>(1e-10).max(r::<T>(1e3) * T::default_epsilon());
    let mut agreed: Option<LabelMap> = None;
    for p in p_samples {
        let source = classify_modes(gs, p, m)?;
        let q = [
            p[0] * r(momentum_signs[0] as f64),
            p[1] * r(momentum_signs[1] as f64),
            p[2] * r(momentum_signs[2] as f64),
        ];
        let target = classify_modes(gs, &q, m)?;
        let mut map = identity_label_map();
        let mut used = [false; 4];
        for src in &source {
            // Image of the sector's 2-basis under the (anti)linear map.
            let images: Vec<_> = src
                .basis
                .iter()
                .map(|v| {
                    let v = if antilinear { v.conjugate() } else { *v };
                    w * v
                })
                .collect();
            let total: T = images
                .iter()
                .map(|u| u.norm_squared())
                .fold(T::ZERO, |a, b| a + b);
            let mut weights = [T::ZERO; 4];
            for (t, tgt) in target.iter().enumerate() {
                for u in &images {
                    for b in &tgt.basis {
                        weights[t] = weights[t] + b.dotc(u).norm_sqr();
                    }
                }
            }
            let best = (0..4).max_by(|&a, &b| weights[a].partial_cmp(&weights[b]).unwrap()).unwrap();
            let leakage = T::ONE - weights[best] / total;
            if leakage > leak_tol {
                return Err(Dirac8Error::NotSectorCovariant {
                    leakage: fd(leakage),
                    tolerance: fd(leak_tol),
                });
            }
            if used[best] {
                return Err(Dirac8Error::NotSectorCovariant {
                    leakage: fd(leakage),
                    tolerance: fd(leak_tol),
                });
            }
            used[best] = true;
            map[label_index(src.rep_label)] = target[best].rep_label;
        }
        match &agreed {
            None => agreed = Some(map),
            Some(prev) if *prev != map => {
                return Err(Dirac8Error::NotSectorCovariant {
                    leakage: 1.0,
                    tolerance: fd(leak_tol),
                })
            }
            _ => {}
        }
    }
    Ok(agreed.unwrap())
}

/// Search outcome for one contract.
#[derive(Clone, Debug)]
pub struct ContractReport<T: Real> {
    pub contract: SymmetryContract,
    pub hits: Vec<IntertwinerResult<T>>,
    /// Masks of hits whose label action matches the diagram.
    pub diagram_hit_masks: Vec<u8>,
    /// At least one diagram-matching hit exists.
    pub realized: bool,
    /// Hits induce more than one distinct label action (the arrow is then
    /// reported per-hit rather than per-contract).
    pub ambiguous: bool,
    /// Five smallest residuals among non-hit monomials, ascending — filled
    /// only when the contract has no hits at all.
    pub near_misses: Vec<(String, T)>,
}

/// Full coupling-scheme verification across P, C, and Tᵖ.
#[derive(Clone, Debug)]
pub struct CouplingSchemeReport<T: Real> {
    pub contracts: Vec<ContractReport<T>>,
    /// Names of contracts whose diagram arrow is missing.
    pub missing: Vec<&'static str>,
    pub all_realized: bool,
    /// C and Tᵖ diagram hits induce identical label actions.
    pub c_and_t_agree: bool,
    /// The composed action P∘C∘Tᵖ(hit) is an involution for every Tᵖ hit.
    pub compositions_are_involutions: bool,
}

/// Run the three standard contracts and check the diagram: each arrow must
/// be realized by at least one monomial whose label action matches, C and Tᵖ
/// must share the vertical action, and all composites must close.
pub fn check_coupling_scheme<T: Real>(
    gs: &GammaSet<T>,
    m: T,
    p_samples: &[[T; 3]],
) -> Result<CouplingSchemeReport<T>> {
    check_coupling_scheme_with(gs, m, p_samples, &SearchOptions::default())
}

/// `check_coupling_scheme` under search-space restrictions.
pub fn check_coupling_scheme_with<T: Real>(
    gs: &GammaSet<T>,
    m: T,
    p_samples: &[[T; 3]],
    opts: &SearchOptions,
) -> Result<CouplingSchemeReport<T>> {
    let mut contracts = Vec::new();
    for contract in SymmetryContract::standard() {
        let (hits, examined) = find_intertwiners_with(&contract, gs, p_samples, m, opts)?;
        let diagram_hit_masks: Vec<u8> = hits
            .iter()
            .filter(|h| h.matches_expected)
            .map(|h| h.mask)
            .collect();
        let mut distinct_actions: Vec<Option<LabelMap>> = Vec::new();
        for h in &hits {
            if !distinct_actions.contains(&h.label_map) {
                distinct_actions.push(h.label_map);
            }
        }
        let near_misses = if hits.is_empty() {
            let mut pool = examined;
            pool.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
            pool.truncate(5);
            pool
        } else {
            Vec::new()
        };
        contracts.push(ContractReport {
            realized: !diagram_hit_masks.is_empty(),
            ambiguous: distinct_actions.len() > 1,
            contract,
            hits,
            diagram_hit_masks,
            near_misses,
        });
    }

    let missing: Vec<&'static str> = contracts
        .iter()
        .filter(|c| !c.realized)
        .map(|c| c.contract.name)
        .collect();
    let all_realized = missing.is_empty();

    let diagram_actions = |name: &str| -> Vec<LabelMap> {
        contracts
            .iter()
            .find(|c| c.contract.name == name)
            .map(|c| {
                c.hits
                    .iter()
                    .filter(|h| h.matches_expected)
                    .filter_map(|h| h.label_map)
                    .collect()
            })
            .unwrap_or_default()
    };
    let c_actions = diagram_actions("C");
    let t_actions = diagram_actions("Tp");
    let c_and_t_agree = !c_actions.is_empty()
        && !t_actions.is_empty()
        && c_actions
            .iter()
            .chain(t_actions.iter())
            .all(|a| *a == c_actions[0]);

    // Composition closure: P ∘ C ∘ (any Tᵖ hit action) must be an involution.
    let p_expected = SymmetryContract::parity().expected_label_action;
    let c_expected = SymmetryContract::charge_conjugation().expected_label_action;
    let compositions_are_involutions = contracts
        .iter()
        .find(|c| c.contract.name == "Tp")
        .map(|c| {
            c.hits.iter().filter_map(|h| h.label_map).all(|t_map| {
                let composed =
                    compose_label_maps(&p_expected, &compose_label_maps(&c_expected, &t_map));
                is_involution(&composed)
            })
        })
        .unwrap_or(true);

    Ok(CouplingSchemeReport {
        contracts,
        missing,
        all_realized,
        c_and_t_agree,
        compositions_are_involutions,
    })
}
