//! Kronecker structure of `λE − A` by a rank-revealing staircase.
//!
//! The right staircase alternates a column compression of `E` with a row
//! compression of `A` restricted to the kernel of `E`. Step `i` yields the
//! nullity `nᵢ` and the rank `rᵢ`; then
//!
//! * `#L_{i−1} = nᵢ − rᵢ` (right minimal index `i − 1`),
//! * `#N_i = rᵢ − n_{i+1}` (infinite block of size `i`).
//!
//! What remains has `E` of full column rank. The same procedure on its
//! conjugate transpose yields the left minimal indices, leaving a square
//! regular part with invertible `E`. Its eigenvalues come from QZ; each
//! cluster of QZ values is validated by reading the partial multiplicities at
//! the cluster mean `μ` off the infinite structure of `ν(A − μE) − E`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{spectral_norm, svd_full, Mat, C64, EPS};
use crate::pencil::{Eigenvalue, Pencil};
use crate::qz;

/// Tolerance policy for every rank decision of the staircase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankPolicy {
    /// Multiplier `κ` in `tol = max(rows, cols)·σ_max·ε·κ`.
    pub safety: f64,
    /// A decision is ambiguous when `σ_r / σ_{r+1}` falls below this.
    pub gap_threshold: f64,
    /// Absolute tolerance overriding the formula (relative to the
    /// normalized pencil, whose coefficients have unit norm).
    pub explicit_tolerance: Option<f64>,
    /// Relative floor for the rank calls made at eigenvalue estimates,
    /// where the shift itself carries rounding error.
    pub shifted_floor: f64,
    /// Largest admitted row or column count.
    pub size_cap: usize,
    /// Upper bound on the size of a trial eigenvalue cluster.
    pub max_cluster: usize,
    /// Relative radius `r·(1+|λ|)` in which trial cluster members are sought.
    pub cluster_radius: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self {
            safety: 1e7,
            gap_threshold: 1e3,
            explicit_tolerance: None,
            shifted_floor: 1e-9,
            size_cap: 512,
            max_cluster: 12,
            cluster_radius: 0.05,
        }
    }
}

impl RankPolicy {
    fn base_tolerance(&self, dim: usize) -> f64 {
        self.explicit_tolerance
            .unwrap_or(dim.max(1) as f64 * EPS * self.safety)
    }
}

/// A single numerical rank decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankDecision {
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// `σ_rank / σ_{rank+1}`, or `∞` when the decision has no boundary.
    pub gap_ratio: f64,
    pub tolerance_used: f64,
}

impl RankDecision {
    /// Rank of a list of nonincreasing singular values against `tol`.
    pub fn from_singular_values(singular_values: Vec<f64>, tol: f64) -> Self {
        let rank = singular_values.iter().take_while(|&&s| s > tol).count();
        let gap_ratio = if rank == 0 || rank == singular_values.len() {
            f64::INFINITY
        } else {
            let dropped = singular_values[rank];
            if dropped > 0.0 {
                singular_values[rank - 1] / dropped
            } else {
                f64::INFINITY
            }
        };
        Self {
            singular_values,
            rank,
            gap_ratio,
            tolerance_used: tol,
        }
    }

    pub fn is_ambiguous(&self, gap_threshold: f64) -> bool {
        self.gap_ratio < gap_threshold
    }
}

/// Partial multiplicities of one finite eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteEigenstructure {
    pub value: C64,
    /// Jordan block sizes, ascending.
    pub partial_multiplicities: Vec<usize>,
}

impl FiniteEigenstructure {
    pub fn algebraic_multiplicity(&self) -> usize {
        self.partial_multiplicities.iter().sum()
    }
}

/// Tolerance data surfaced alongside every structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaircaseDiagnostics {
    pub tolerance: f64,
    pub shifted_tolerance: f64,
    pub smallest_gap_ratio: f64,
    pub rank_decisions: usize,
    /// Norm factors `(‖E‖, ‖A‖)` removed before the staircase.
    pub normalization: (f64, f64),
}

/// Complete Kronecker data of an `m×n` pencil.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KroneckerStructure {
    pub rows: usize,
    pub cols: usize,
    pub right_minimal_indices: Vec<usize>,
    pub left_minimal_indices: Vec<usize>,
    pub finite_eigenstructure: Vec<FiniteEigenstructure>,
    pub infinite_block_sizes: Vec<usize>,
    pub index: usize,
    pub regular: bool,
    pub diagnostics: Option<StaircaseDiagnostics>,
}

impl KroneckerStructure {
    /// Builds a structure from block data, deriving sizes, index and
    /// regularity.
    pub fn from_blocks(
        mut right: Vec<usize>,
        mut left: Vec<usize>,
        finite: Vec<FiniteEigenstructure>,
        mut infinite: Vec<usize>,
    ) -> Self {
        right.sort_unstable();
        left.sort_unstable();
        infinite.sort_unstable();
        let mut finite: Vec<FiniteEigenstructure> = finite
            .into_iter()
            .filter(|f| !f.partial_multiplicities.is_empty())
            .map(|mut f| {
                f.partial_multiplicities.sort_unstable();
                f
            })
            .collect();
        finite.sort_by(|a, b| {
            a.value
                .re
                .total_cmp(&b.value.re)
                .then(a.value.im.total_cmp(&b.value.im))
        });
        let jordan: usize = finite.iter().map(|f| f.algebraic_multiplicity()).sum();
        let inf: usize = infinite.iter().sum();
        let rows = right.iter().sum::<usize>() + left.iter().map(|e| e + 1).sum::<usize>() + jordan + inf;
        let cols = right.iter().map(|e| e + 1).sum::<usize>() + left.iter().sum::<usize>() + jordan + inf;
        let index = infinite.iter().copied().max().unwrap_or(0);
        let regular = right.is_empty() && left.is_empty() && rows == cols;
        Self {
            rows,
            cols,
            right_minimal_indices: right,
            left_minimal_indices: left,
            finite_eigenstructure: finite,
            infinite_block_sizes: infinite,
            index,
            regular,
            diagnostics: None,
        }
    }

    /// `(rows, cols)` implied by the block list.
    pub fn block_dimensions(&self) -> (usize, usize) {
        let b = Self::from_blocks(
            self.right_minimal_indices.clone(),
            self.left_minimal_indices.clone(),
            self.finite_eigenstructure.clone(),
            self.infinite_block_sizes.clone(),
        );
        (b.rows, b.cols)
    }

    /// Block accounting balances against the stored dimensions.
    pub fn is_balanced(&self) -> bool {
        self.block_dimensions() == (self.rows, self.cols)
    }

    pub fn finite_count(&self) -> usize {
        self.finite_eigenstructure
            .iter()
            .map(|f| f.algebraic_multiplicity())
            .sum()
    }

    /// Partial multiplicities at the eigenvalue nearest `z` within `tol`.
    pub fn partial_multiplicities_near(&self, z: C64, tol: f64) -> Vec<usize> {
        self.finite_eigenstructure
            .iter()
            .filter(|f| (f.value - z).norm() <= tol)
            .flat_map(|f| f.partial_multiplicities.iter().copied())
            .collect()
    }

    /// Integer data identical and eigenvalues paired within `eig_tol·(1+|λ|)`.
    pub fn matches(&self, other: &KroneckerStructure, eig_tol: f64) -> bool {
        if self.right_minimal_indices != other.right_minimal_indices
            || self.left_minimal_indices != other.left_minimal_indices
            || self.infinite_block_sizes != other.infinite_block_sizes
            || self.finite_eigenstructure.len() != other.finite_eigenstructure.len()
        {
            return false;
        }
        let mut used = vec![false; other.finite_eigenstructure.len()];
        for f in &self.finite_eigenstructure {
            let best = other
                .finite_eigenstructure
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, g)| (k, (g.value - f.value).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((k, d)) if d <= eig_tol * (1.0 + f.value.norm()) => {
                    if other.finite_eigenstructure[k].partial_multiplicities != f.partial_multiplicities {
                        return false;
                    }
                    used[k] = true;
                }
                _ => return false,
            }
        }
        true
    }
}

struct Staircase {
    nullities: Vec<usize>,
    ranks: Vec<usize>,
    rem_e: Mat,
    rem_a: Mat,
}

struct Tracker {
    smallest_gap: f64,
    decisions: usize,
}

impl Tracker {
    fn new() -> Self {
        Self {
            smallest_gap: f64::INFINITY,
            decisions: 0,
        }
    }
}

/// Right staircase on `(e, a)`; both are assumed normalized.
fn right_staircase(
    mut e: Mat,
    mut a: Mat,
    tol: f64,
    gap_threshold: f64,
    context: &str,
    tracker: &mut Tracker,
) -> Result<Staircase> {
    let mut nullities = Vec::new();
    let mut ranks = Vec::new();
    loop {
        let (m, n) = e.shape();
        if n == 0 {
            break;
        }
        let (_, s, v) = svd_full(&e);
        let de = RankDecision::from_singular_values(s, tol);
        check(&de, gap_threshold, context, "column compression", tracker)?;
        let nullity = n - de.rank;
        if nullity == 0 {
            break;
        }
        let v1 = v.columns(0, de.rank).into_owned();
        let v2 = v.columns(de.rank, nullity).into_owned();
        let av2 = &a * &v2;
        let (u, s2, _) = svd_full(&av2);
        let da = RankDecision::from_singular_values(s2, tol);
        check(&da, gap_threshold, context, "row compression", tracker)?;
        let r = da.rank;
        nullities.push(nullity);
        ranks.push(r);
        let uh = u.adjoint();
        let ue = &uh * &e * &v1;
        let ua = &uh * &a * &v1;
        e = ue.rows(r, m - r).into_owned();
        a = ua.rows(r, m - r).into_owned();
    }
    Ok(Staircase {
        nullities,
        ranks,
        rem_e: e,
        rem_a: a,
    })
}

fn check(d: &RankDecision, gap: f64, context: &str, step: &str, tracker: &mut Tracker) -> Result<()> {
    tracker.decisions += 1;
    tracker.smallest_gap = tracker.smallest_gap.min(d.gap_ratio);
    if d.is_ambiguous(gap) {
        return Err(Error::RankAmbiguity {
            context: format!("{context}: {step}"),
            singular_values: d.singular_values.clone(),
            tolerance: d.tolerance_used,
        });
    }
    Ok(())
}

/// `(minimal indices, infinite block sizes)` from staircase counts.
fn read_counts(st: &Staircase, context: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let k = st.nullities.len();
    let mut minimal = Vec::new();
    let mut infinite = Vec::new();
    for i in 0..k {
        let n_i = st.nullities[i] as isize;
        let r_i = st.ranks[i] as isize;
        let n_next = st.nullities.get(i + 1).copied().unwrap_or(0) as isize;
        let l = n_i - r_i;
        let nb = r_i - n_next;
        if l < 0 || nb < 0 {
            return Err(Error::RankAmbiguity {
                context: format!("{context}: inconsistent staircase counts at step {}", i + 1),
                singular_values: Vec::new(),
                tolerance: 0.0,
            });
        }
        minimal.extend(std::iter::repeat_n(i, l as usize));
        infinite.extend(std::iter::repeat_n(i + 1, nb as usize));
    }
    Ok((minimal, infinite))
}

fn normalized(m: &Mat) -> (Mat, f64) {
    let s = spectral_norm(m);
    if s > 0.0 {
        (m / C64::new(s, 0.0), s)
    } else {
        (m.clone(), 1.0)
    }
}

/// Complete Kronecker structure of `p` (any convention; read as `λE − A`).
pub fn kronecker_structure(p: &Pencil, policy: &RankPolicy) -> Result<KroneckerStructure> {
    let (m, n) = (p.rows(), p.cols());
    if m.max(n) > policy.size_cap {
        return Err(Error::SizeCap {
            size: m.max(n),
            cap: policy.size_cap,
        });
    }
    let (e0, a0) = p.minus_parts();
    let (e, se) = normalized(&e0);
    let (a, sa) = normalized(&a0);
    let tol = policy.base_tolerance(m.max(n));
    let mut tracker = Tracker::new();

    let right = right_staircase(e, a, tol, policy.gap_threshold, "right staircase", &mut tracker)?;
    let (right_indices, infinite) = read_counts(&right, "right staircase")?;

    let left = right_staircase(
        right.rem_e.adjoint(),
        right.rem_a.adjoint(),
        tol,
        policy.gap_threshold,
        "left staircase",
        &mut tracker,
    )?;
    let (left_indices, spurious) = read_counts(&left, "left staircase")?;
    if !spurious.is_empty() {
        return Err(Error::RankAmbiguity {
            context: "left staircase found infinite blocks after deflation".into(),
            singular_values: Vec::new(),
            tolerance: tol,
        });
    }
    let ef = left.rem_e.adjoint();
    let af = left.rem_a.adjoint();
    if ef.nrows() != ef.ncols() {
        return Err(Error::RankAmbiguity {
            context: "regular part is not square after deflation".into(),
            singular_values: Vec::new(),
            tolerance: tol,
        });
    }
    let finite = finite_structure(&ef, &af, policy, tol, &mut tracker)?;
    let back = sa / se;
    let finite = finite
        .into_iter()
        .map(|f| FiniteEigenstructure {
            value: f.value * back,
            partial_multiplicities: f.partial_multiplicities,
        })
        .collect();

    let mut ks = KroneckerStructure::from_blocks(right_indices, left_indices, finite, infinite);
    if (ks.rows, ks.cols) != (m, n) {
        return Err(Error::RankAmbiguity {
            context: format!(
                "block accounting gives {}x{} for a {m}x{n} pencil",
                ks.rows, ks.cols
            ),
            singular_values: Vec::new(),
            tolerance: tol,
        });
    }
    ks.diagnostics = Some(StaircaseDiagnostics {
        tolerance: tol,
        shifted_tolerance: tol.max(policy.shifted_floor),
        smallest_gap_ratio: tracker.smallest_gap,
        rank_decisions: tracker.decisions,
        normalization: (se, sa),
    });
    Ok(ks)
}

/// Partial multiplicities at `mu` of the regular pencil `λE − A` (with `E`
/// invertible), or `None` when the rank decisions are not clean.
fn multiplicities_at(e: &Mat, a: &Mat, mu: C64, policy: &RankPolicy, tol: f64) -> Option<Vec<usize>> {
    // Scale by the pencil's magnitude, not by the shifted matrix's own norm,
    // which would erase the rank information.
    let scale = (1.0 + mu.norm()) * spectral_norm(a).max(spectral_norm(e));
    let lead = (a - e * mu) / C64::new(if scale > 0.0 { scale } else { 1.0 }, 0.0);
    let (cst, _) = normalized(e);
    let mut scratch = Tracker::new();
    let st = right_staircase(
        lead,
        cst,
        tol.max(policy.shifted_floor),
        policy.gap_threshold,
        "shifted staircase",
        &mut scratch,
    )
    .ok()?;
    let (minimal, infinite) = read_counts(&st, "shifted staircase").ok()?;
    if !minimal.is_empty() {
        return None;
    }
    Some(infinite)
}

fn finite_structure(
    e: &Mat,
    a: &Mat,
    policy: &RankPolicy,
    tol: f64,
    tracker: &mut Tracker,
) -> Result<Vec<FiniteEigenstructure>> {
    let k = e.nrows();
    if k == 0 {
        return Ok(Vec::new());
    }
    let raw = qz::eigenvalues(e, a)?;
    let mut values = Vec::with_capacity(k);
    for ev in raw {
        match ev {
            Eigenvalue::Finite(z) => values.push(z),
            Eigenvalue::Infinite => {
                return Err(Error::RankAmbiguity {
                    context: "QZ found an infinite eigenvalue in the deflated regular part".into(),
                    singular_values: Vec::new(),
                    tolerance: tol,
                })
            }
        }
    }
    let mut unassigned: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    while let Some(&seed) = unassigned.first() {
        let z0 = values[seed];
        let radius = policy.cluster_radius * (1.0 + z0.norm());
        let mut cands: Vec<(usize, f64)> = unassigned
            .iter()
            .map(|&i| (i, (values[i] - z0).norm()))
            .filter(|(_, d)| *d <= radius)
            .collect();
        cands.sort_by(|x, y| x.1.total_cmp(&y.1));
        cands.truncate(policy.max_cluster);
        let mut accepted = None;
        for j in (1..=cands.len()).rev() {
            let mu: C64 = cands[..j].iter().map(|(i, _)| values[*i]).sum::<C64>() / j as f64;
            tracker.decisions += 1;
            if let Some(pm) = multiplicities_at(e, a, mu, policy, tol) {
                if pm.iter().sum::<usize>() == j {
                    accepted = Some((j, mu, pm));
                    break;
                }
            }
        }
        let Some((j, mu, pm)) = accepted else {
            return Err(Error::RankAmbiguity {
                context: format!(
                    "no consistent eigenvalue cluster near {:.6e}{:+.6e}i",
                    z0.re, z0.im
                ),
                singular_values: cands.iter().map(|(_, d)| *d).collect(),
                tolerance: tol.max(policy.shifted_floor),
            });
        };
        let members: Vec<usize> = cands[..j].iter().map(|(i, _)| *i).collect();
        unassigned.retain(|i| !members.contains(i));
        out.push(FiniteEigenstructure {
            value: mu,
            partial_multiplicities: pm,
        });
    }
    Ok(out)
}

/// Index `ν`: size of the largest infinite block, 0 when the lead is invertible.
pub fn structural_index(p: &Pencil, policy: &RankPolicy) -> Result<usize> {
    Ok(kronecker_structure(p, policy)?.index)
}

/// `(right, left)` minimal indices, each ascending.
pub fn minimal_index_lists(p: &Pencil, policy: &RankPolicy) -> Result<(Vec<usize>, Vec<usize>)> {
    let ks = kronecker_structure(p, policy)?;
    Ok((ks.right_minimal_indices, ks.left_minimal_indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn real(rows: usize, cols: usize, v: &[f64]) -> Mat {
        Mat::from_fn(rows, cols, |i, j| c(v[i * cols + j], 0.0))
    }

    fn ks(e: Mat, a: Mat) -> KroneckerStructure {
        kronecker_structure(&Pencil::minus(e, a).unwrap(), &RankPolicy::default()).unwrap()
    }

    #[test]
    fn zero_pencil() {
        let s = ks(Mat::zeros(2, 2), Mat::zeros(2, 2));
        assert_eq!(s.right_minimal_indices, vec![0, 0]);
        assert_eq!(s.left_minimal_indices, vec![0, 0]);
        assert!(s.finite_eigenstructure.is_empty());
        assert!(!s.regular);
    }

    #[test]
    fn jordan_block_at_zero() {
        let s = ks(Mat::identity(2, 2), real(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        assert!(s.regular);
        assert_eq!(s.index, 0);
        assert_eq!(s.finite_eigenstructure.len(), 1);
        assert_eq!(s.finite_eigenstructure[0].partial_multiplicities, vec![2]);
        assert!(s.finite_eigenstructure[0].value.norm() < 1e-12);
    }

    #[test]
    fn nilpotent_block_index_two() {
        let s = ks(real(2, 2, &[0.0, 1.0, 0.0, 0.0]), Mat::identity(2, 2));
        assert_eq!(s.infinite_block_sizes, vec![2]);
        assert_eq!(s.index, 2);
        assert_eq!(structural_index(&Pencil::minus(Mat::identity(3, 3), Mat::zeros(3, 3)).unwrap(), &RankPolicy::default()).unwrap(), 0);
    }

    #[test]
    fn l1_block_and_transpose() {
        let e = real(1, 2, &[1.0, 0.0]);
        let a = real(1, 2, &[0.0, 1.0]);
        let s = ks(e.clone(), a.clone());
        assert_eq!(s.right_minimal_indices, vec![1]);
        assert!(s.left_minimal_indices.is_empty());
        let t = ks(e.transpose(), a.transpose());
        assert!(t.right_minimal_indices.is_empty());
        assert_eq!(t.left_minimal_indices, vec![1]);
    }

    #[test]
    fn rank_decision_gap() {
        let d = RankDecision::from_singular_values(vec![1.0, 1e-3, 1e-17], 1e-14);
        assert_eq!(d.rank, 2);
        assert!(!d.is_ambiguous(1e3));
        let d = RankDecision::from_singular_values(vec![1.0, 2e-14, 1e-14], 1.5e-14);
        assert!(d.is_ambiguous(1e3));
    }

    #[test]
    fn scaled_eigenvalues_come_back_in_original_units() {
        let a = real(2, 2, &[-300.0, 0.0, 0.0, -500.0]);
        let s = ks(Mat::identity(2, 2) * c(0.5, 0.0), a);
        let v: Vec<f64> = s.finite_eigenstructure.iter().map(|f| f.value.re).collect();
        assert!((v[0] + 1000.0).abs() < 1e-9 && (v[1] + 600.0).abs() < 1e-9);
    }
}
