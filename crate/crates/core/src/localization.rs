//! Left-half-plane certificates for posH pencils.
//!
//! The central condition is
//! `−(x*R₁x)(x*R₂x) + (x*J₁x)(x*J₂x) ≤ 0` for all `x`, written EE-JJx below.
//! Three sufficient provers of increasing cost are offered together with a
//! randomized falsifier, and [`lhp_certificate`] combines them with the
//! hypotheses that turn EE-JJx into a spectral statement.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kcf::{kronecker_structure, KroneckerStructure, RankPolicy};
use crate::matpoly::{cubic_stability, linearize_cubic, CubicConclusion, MatrixPolynomial};
use crate::matrix::{
    c, hermitian_part, kron, lambda_max, lambda_min, quad_form, spectral_norm, svd_full, Mat, C64,
};
use crate::numrange::{chunk_rng, common_kernel, nocommon_chain_report, sample_numerical_range, unit_vector, Evidence};
use crate::pencil::{finite_eigenvalues, regularity_probe, Pencil, PoshPencil};

/// Largest `n` accepted by [`eejjx_by_kronecker`]; the test works with an
/// `n² × n²` matrix.
pub const KRONECKER_CAP: usize = 64;
/// Relative tolerance on form values, scaled by `s²‖x‖⁴` with `s` the largest
/// coefficient norm.
pub const FORM_TOL: f64 = 1e-10;
/// Relative tolerance used to call an eigenvalue real or nonpositive.
pub const EIG_TOL: f64 = 1e-9;

const CHUNK: usize = 256;
const ASCENT_STARTS: usize = 4;

fn form_scale(pp: &PoshPencil) -> f64 {
    [&pp.j1, &pp.r1, &pp.j2, &pp.r2]
        .iter()
        .map(|m| m.norm2())
        .fold(0.0, f64::max)
}

/// Value of `−(x*R₁x)(x*R₂x) + (x*J₁x)(x*J₂x)`. Both products are real for a
/// posH pencil, so only the real part is kept.
pub fn eejjx_value(pp: &PoshPencil, x: &DVector<C64>) -> f64 {
    let r = quad_form(pp.r1.as_mat(), x) * quad_form(pp.r2.as_mat(), x);
    let j = quad_form(pp.j1.as_mat(), x) * quad_form(pp.j2.as_mat(), x);
    (j - r).re
}

/// `λ_min(R₁)·λ_min(R₂) ≥ ‖J₁‖·‖J₂‖`.
pub fn eejjx_by_norms(pp: &PoshPencil) -> bool {
    let l1 = lambda_min(pp.r1.as_mat()).max(0.0);
    let l2 = lambda_min(pp.r2.as_mat()).max(0.0);
    let s = form_scale(pp);
    l1 * l2 >= pp.j1.norm2() * pp.j2.norm2() - FORM_TOL * s * s
}

/// `λ_max(J₁⊗J₂ − R₁⊗R₂) ≤ tol`. Refuses `n > KRONECKER_CAP`; use
/// [`eejjx_by_norms`] or [`eejjx_falsify`] there.
pub fn eejjx_by_kronecker(pp: &PoshPencil) -> Result<bool> {
    let n = pp.n();
    if n > KRONECKER_CAP {
        return Err(Error::SizeCap { size: n, cap: KRONECKER_CAP });
    }
    if n == 0 {
        return Ok(true);
    }
    let m = kron(pp.j1.as_mat(), pp.j2.as_mat()) - kron(pp.r1.as_mat(), pp.r2.as_mat());
    let s = form_scale(pp);
    Ok(lambda_max(&hermitian_part(&m)) <= FORM_TOL * s * s)
}

/// Whether every finite eigenvalue of `λJ₁ + J₂` is real, nonpositive and
/// semisimple, `∞` is semisimple, every minimal index is zero, and the
/// diagonal entries `(aᵢ, bᵢ)` of the simultaneous diagonal form of `iJ₁`,
/// `iJ₂` never have opposite signs across blocks. Then
/// `(x*J₁x)(x*J₂x) ≤ 0` for every `x`.
///
/// The structural conditions alone are not enough: `J₁ = i·diag(1, −1)`,
/// `J₂ = i·diag(2, −½)` has eigenvalues `−2` and `−½`, yet
/// `x = (√0.4, √0.6)` gives `(x*J₁x)(x*J₂x) = 0.1`. With `y = Sx` in the
/// diagonal form the product is `−(Σaᵢ|yᵢ|²)(Σbᵢ|yᵢ|²)`, which is nonpositive
/// for all `y` exactly when `iJ₁` and `iJ₂` are semidefinite of the same sign,
/// or proportional with a nonnegative factor.
pub fn eejjx_by_spectral(pp: &PoshPencil) -> bool {
    match kronecker_structure(&pp.skew_pencil(), &RankPolicy::default()) {
        Ok(ks) => spectral_condition(&ks) && sign_condition(pp),
        Err(_) => false,
    }
}

fn sign_condition(pp: &PoshPencil) -> bool {
    let i = c(0.0, 1.0);
    let h1 = hermitian_part(&(pp.j1.as_mat() * i));
    let h2 = hermitian_part(&(pp.j2.as_mat() * i));
    let (n1, n2) = (spectral_norm(&h1), spectral_norm(&h2));
    let tol = EIG_TOL * n1.max(n2);
    if n1 <= tol || n2 <= tol {
        return true;
    }
    let (lo1, hi1) = (lambda_min(&h1), lambda_max(&h1));
    let (lo2, hi2) = (lambda_min(&h2), lambda_max(&h2));
    if (lo1 >= -tol && lo2 >= -tol) || (hi1 <= tol && hi2 <= tol) {
        return true;
    }
    let dot = h1.iter().zip(h2.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
    let ratio = dot / h1.norm_squared();
    ratio >= 0.0 && spectral_norm(&(&h2 - &h1 * c(ratio, 0.0))) <= tol
}

fn spectral_condition(ks: &KroneckerStructure) -> bool {
    let finite_ok = ks.finite_eigenstructure.iter().all(|f| {
        let tol = EIG_TOL * (1.0 + f.value.norm());
        f.value.im.abs() <= tol && f.value.re <= tol && f.partial_multiplicities.iter().all(|&k| k == 1)
    });
    finite_ok
        && ks.infinite_block_sizes.iter().all(|&k| k == 1)
        && zero_minimal_indices(ks)
}

fn zero_minimal_indices(ks: &KroneckerStructure) -> bool {
    ks.right_minimal_indices.iter().all(|&e| e == 0) && ks.left_minimal_indices.iter().all(|&e| e == 0)
}

/// A vector violating EE-JJx and the value it attains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EejjxWitness {
    pub x: Vec<C64>,
    pub value: f64,
}

fn violation_bound(pp: &PoshPencil) -> f64 {
    let s = form_scale(pp);
    FORM_TOL * s * s
}

/// Witness found in one sampling chunk, with the chunk's best candidates.
type ChunkResult<W, B> = (Option<W>, B);
type Seeds = Vec<(f64, DVector<C64>)>;

/// Randomized search for `x` with EE-JJx value above `FORM_TOL·s²‖x‖⁴`.
/// Four fifths of the budget go to uniform draws on the unit sphere, the rest
/// to local ascent from the best draws. `None` after the budget is spent is
/// inconclusive, not a proof.
pub fn eejjx_falsify(pp: &PoshPencil, budget: usize, seed: u64) -> Option<EejjxWitness> {
    let n = pp.n();
    if n == 0 || budget == 0 {
        return None;
    }
    let bound = violation_bound(pp);
    let random = (budget * 4 / 5).max(1);
    let chunks = random.div_ceil(CHUNK);
    let per_chunk: Vec<ChunkResult<EejjxWitness, Seeds>> = (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let mut r = chunk_rng(seed, ch as u64);
            let count = CHUNK.min(random - ch * CHUNK);
            let mut best: Vec<(f64, DVector<C64>)> = Vec::new();
            for _ in 0..count {
                let x = unit_vector(n, &mut r);
                let v = eejjx_value(pp, &x);
                if v > bound {
                    return (Some(witness(x, v)), Vec::new());
                }
                keep_best(&mut best, v, x);
            }
            (None, best)
        })
        .collect();
    let mut starts = Vec::new();
    for (w, best) in per_chunk {
        if w.is_some() {
            return w;
        }
        for (v, x) in best {
            keep_best(&mut starts, v, x);
        }
    }
    if n < 2 {
        return None;
    }
    let mut rng = chunk_rng(seed, u64::MAX);
    let per_start = (budget - random.min(budget)) / starts.len().max(1);
    for (v, x) in starts {
        if let Some(w) = ascend(pp, x, v, per_start, bound, &mut rng) {
            return Some(w);
        }
    }
    None
}

fn witness(x: DVector<C64>, value: f64) -> EejjxWitness {
    EejjxWitness { x: x.iter().copied().collect(), value }
}

fn keep_best(best: &mut Vec<(f64, DVector<C64>)>, v: f64, x: DVector<C64>) {
    if best.len() < ASCENT_STARTS {
        best.push((v, x));
    } else if let Some(worst) = best.iter_mut().min_by(|a, b| a.0.total_cmp(&b.0)) {
        if v > worst.0 {
            *worst = (v, x);
        }
    }
}

/// Unitary rotations in random coordinate planes, accepting improvements and
/// halving the angle after a run of failures.
fn ascend(
    pp: &PoshPencil,
    mut x: DVector<C64>,
    mut v: f64,
    evals: usize,
    bound: f64,
    rng: &mut ChaCha8Rng,
) -> Option<EejjxWitness> {
    let n = x.len();
    let mut angle: f64 = 0.5;
    let mut misses = 0;
    for _ in 0..evals {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let phase = C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
        let th = angle * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let (cs, sn) = (th.cos(), th.sin());
        let mut y = x.clone();
        y[i] = x[i] * cs + phase * x[j] * sn;
        y[j] = -phase.conj() * x[i] * sn + x[j] * cs;
        let w = eejjx_value(pp, &y);
        if w > v {
            x = y;
            v = w;
            misses = 0;
            if v > bound {
                return Some(witness(x, v));
            }
        } else {
            misses += 1;
            if misses > 4 * n {
                angle = (angle * 0.5).max(1e-6);
                misses = 0;
            }
        }
    }
    None
}

/// A real pair `(ξ, η)` violating the real form of EE-JJx, and the vector
/// `x = ξ + iη` it corresponds to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealWitness {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub value: f64,
}

impl RealWitness {
    pub fn to_complex(&self) -> DVector<C64> {
        DVector::from_iterator(self.xi.len(), self.xi.iter().zip(&self.eta).map(|(&a, &b)| c(a, b)))
    }
}

/// For real data and `x = ξ + iη` one has `x*Jx = 2i·ξᵀJη` and
/// `x*Rx = ξᵀRξ + ηᵀRη`, so EE-JJx reads
/// `−4(ξᵀJ₁η)(ξᵀJ₂η) ≤ (ξᵀR₁ξ + ηᵀR₁η)(ξᵀR₂ξ + ηᵀR₂η)`.
/// Returns the left side minus the right side.
pub fn real_form_value(pp: &PoshPencil, xi: &[f64], eta: &[f64]) -> f64 {
    let bil = |m: &Mat, u: &[f64], w: &[f64]| -> f64 {
        let mut s = 0.0;
        for (r, &ur) in u.iter().enumerate() {
            for (k, &wk) in w.iter().enumerate() {
                s += ur * m[(r, k)].re * wk;
            }
        }
        s
    };
    let rr = |m: &Mat| bil(m, xi, xi) + bil(m, eta, eta);
    -4.0 * bil(pp.j1.as_mat(), xi, eta) * bil(pp.j2.as_mat(), xi, eta) - rr(pp.r1.as_mat()) * rr(pp.r2.as_mat())
}

/// Randomized falsifier of the real form. Refuses complex data.
pub fn eejjx_real_form(pp: &PoshPencil, budget: usize, seed: u64) -> Result<Option<RealWitness>> {
    if !pp.is_real() {
        return Err(Error::Precondition("the real form needs real coefficients".into()));
    }
    let n = pp.n();
    if n == 0 || budget == 0 {
        return Ok(None);
    }
    let bound = violation_bound(pp);
    let draw = |r: &mut ChaCha8Rng| -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..2 * n).map(|_| r.sample(StandardNormal)).collect();
            let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if nv > 0.0 {
                return v.into_iter().map(|a| a / nv).collect();
            }
        }
    };
    let value = |v: &[f64]| real_form_value(pp, &v[..n], &v[n..]);
    let make = |v: Vec<f64>, val: f64| RealWitness { xi: v[..n].to_vec(), eta: v[n..].to_vec(), value: val };

    let random = (budget * 4 / 5).max(1);
    let chunks = random.div_ceil(CHUNK);
    let per_chunk: Vec<ChunkResult<RealWitness, (f64, Vec<f64>)>> = (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let mut r = chunk_rng(seed, ch as u64);
            let count = CHUNK.min(random - ch * CHUNK);
            let mut best = (f64::NEG_INFINITY, Vec::new());
            for _ in 0..count {
                let v = draw(&mut r);
                let val = value(&v);
                if val > bound {
                    return (Some(make(v, val)), best);
                }
                if val > best.0 {
                    best = (val, v);
                }
            }
            (None, best)
        })
        .collect();
    let mut start = (f64::NEG_INFINITY, Vec::new());
    for (w, best) in per_chunk {
        if w.is_some() {
            return Ok(w);
        }
        if best.0 > start.0 {
            start = best;
        }
    }
    let (mut val, mut v) = start;
    let mut rng = chunk_rng(seed, u64::MAX);
    let mut angle: f64 = 0.5;
    let mut misses = 0;
    for _ in 0..budget - random.min(budget) {
        let i = rng.random_range(0..2 * n);
        let mut j = rng.random_range(0..2 * n - 1);
        if j >= i {
            j += 1;
        }
        let th = angle * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let mut w = v.clone();
        w[i] = v[i] * th.cos() + v[j] * th.sin();
        w[j] = -v[i] * th.sin() + v[j] * th.cos();
        let wv = value(&w);
        if wv > val {
            v = w;
            val = wv;
            misses = 0;
            if val > bound {
                return Ok(Some(make(v, val)));
            }
        } else {
            misses += 1;
            if misses > 8 * n {
                angle = (angle * 0.5).max(1e-6);
                misses = 0;
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum EejjxStatus {
    ProvedByNorms,
    ProvedByKronecker,
    ProvedBySpectral,
    /// Proved through the quadratic-form condition of a cubic, see
    /// [`cubic_lhp_certificate`].
    ProvedByCubic,
    Falsified { x: Vec<C64>, value: f64 },
    Unknown,
}

impl EejjxStatus {
    pub fn is_proved(&self) -> bool {
        matches!(
            self,
            EejjxStatus::ProvedByNorms
                | EejjxStatus::ProvedByKronecker
                | EejjxStatus::ProvedBySpectral
                | EejjxStatus::ProvedByCubic
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisRoute {
    /// No common isotropic vector.
    NoIsotropic,
    /// Regular pencil with `W(λJ₁ + J₂)` in the closed left half-plane.
    SkewNumrangeLhp,
    /// Regular pencil, `λJ₁ + J₂` with zero minimal indices and spectrum in
    /// the closed left half-plane.
    SkewStructure,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LhpConclusion {
    NumrangeInLhp,
    EigenvaluesInLhp,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LhpCertificate {
    pub eejjx_status: EejjxStatus,
    pub hypothesis_route: HypothesisRoute,
    pub conclusion: LhpConclusion,
    /// Strength of the evidence behind the hypothesis route.
    pub evidence: Evidence,
    pub notes: Vec<String>,
}

impl LhpCertificate {
    /// Numerical range in the closed left half-plane implies the same for
    /// every finite eigenvalue.
    pub fn certifies_eigenvalues_in_lhp(&self) -> bool {
        self.conclusion != LhpConclusion::None
    }

    fn conclude(eejjx_status: EejjxStatus, hypothesis_route: HypothesisRoute, evidence: Evidence, notes: Vec<String>) -> Self {
        let conclusion = match (eejjx_status.is_proved(), hypothesis_route) {
            (true, HypothesisRoute::NoIsotropic | HypothesisRoute::SkewNumrangeLhp) => LhpConclusion::NumrangeInLhp,
            (true, HypothesisRoute::SkewStructure) => LhpConclusion::EigenvaluesInLhp,
            _ => LhpConclusion::None,
        };
        Self {
            eejjx_status,
            hypothesis_route,
            conclusion,
            evidence,
            notes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhpOptions {
    pub falsify_budget: usize,
    pub sample_budget: usize,
    pub seed: u64,
}

impl Default for LhpOptions {
    fn default() -> Self {
        Self {
            falsify_budget: 10_000,
            sample_budget: 10_000,
            seed: 0,
        }
    }
}

pub fn lhp_certificate(pp: &PoshPencil) -> LhpCertificate {
    lhp_certificate_with(pp, &LhpOptions::default())
}

/// Runs the EE-JJx provers by cost, then the falsifier when none succeeds,
/// and looks for a hypothesis route in the order: skew structure, no common
/// isotropic vector, sampled skew numerical range.
pub fn lhp_certificate_with(pp: &PoshPencil, opts: &LhpOptions) -> LhpCertificate {
    let mut notes = Vec::new();
    let skew = kronecker_structure(&pp.skew_pencil(), &RankPolicy::default());
    if let Err(e) = &skew {
        notes.push(format!("Kronecker structure of lambda*J1 + J2 failed: {e}"));
    }
    let status = if eejjx_by_norms(pp) {
        EejjxStatus::ProvedByNorms
    } else if matches!(eejjx_by_kronecker(pp), Ok(true)) {
        EejjxStatus::ProvedByKronecker
    } else if skew.as_ref().is_ok_and(spectral_condition) && sign_condition(pp) {
        EejjxStatus::ProvedBySpectral
    } else {
        if pp.n() > KRONECKER_CAP {
            notes.push(format!("n > {KRONECKER_CAP}: Kronecker test skipped"));
        }
        match eejjx_falsify(pp, opts.falsify_budget, opts.seed) {
            Some(w) => EejjxStatus::Falsified { x: w.x, value: w.value },
            None => {
                notes.push(format!("no violation in {} falsifier evaluations", opts.falsify_budget));
                EejjxStatus::Unknown
            }
        }
    };

    let pencil = pp.to_pencil();
    let regular = regularity_probe(&pencil).regular;
    if !regular {
        notes.push("P is singular by the random-shift probe".into());
    }

    if regular {
        if let Ok(ks) = &skew {
            let lhp = ks
                .finite_eigenstructure
                .iter()
                .all(|f| f.value.re <= EIG_TOL * (1.0 + f.value.norm()));
            if lhp && zero_minimal_indices(ks) {
                return LhpCertificate::conclude(status, HypothesisRoute::SkewStructure, Evidence::Exact, notes);
            }
        }
    }

    let kernel_trivial = common_kernel(&[pp.r1.as_mat(), pp.r2.as_mat()]).is_ok_and(|k| k.ncols() == 0);
    if kernel_trivial {
        notes.push("ker R1 and ker R2 intersect trivially".into());
        return LhpCertificate::conclude(status, HypothesisRoute::NoIsotropic, Evidence::Exact, notes);
    }
    if let Ok(report) = nocommon_chain_report(pp, opts.sample_budget.min(2_000), opts.seed) {
        if report.no_common_isotropic.holds == Some(true) {
            notes.push(report.no_common_isotropic.note.clone());
            return LhpCertificate::conclude(
                status,
                HypothesisRoute::NoIsotropic,
                report.no_common_isotropic.evidence,
                notes,
            );
        }
    }

    if regular {
        if let Ok(sample) = sample_numerical_range(&pp.skew_pencil(), opts.sample_budget, opts.seed) {
            let s = form_scale(pp);
            let inside = sample
                .points
                .iter()
                .all(|z| z.re <= EIG_TOL * (1.0 + z.norm()) * s.max(1.0));
            if inside && !sample.points.is_empty() {
                notes.push(format!(
                    "W(lambda*J1 + J2) sampled with {} points, all in the closed left half-plane; sampling does not prove containment",
                    sample.points.len()
                ));
                return LhpCertificate::conclude(status, HypothesisRoute::SkewNumrangeLhp, Evidence::Sampled, notes);
            }
        }
    }
    notes.push("no hypothesis route established".into());
    LhpCertificate::conclude(status, HypothesisRoute::None, Evidence::Heuristic, notes)
}

/// Certificate for a cubic `A₃λ³ + A₂λ² + A₁λ + A₀` through its posH
/// linearization. `λJ₁ + J₂` of that linearization is singular with right
/// minimal indices one, so the generic provers do not apply. Under the cubic
/// hypotheses `A₂ + A₁ ≻ 0` makes `ker R₁ ∩ ker R₂` trivial, and the ordering
/// `A₂ ⪰ A₃`, `A₁ ⪰ A₀` implies EE-JJx for the linearization. Falls back to
/// [`lhp_certificate_with`] when the cubic test does not certify.
pub fn cubic_lhp_certificate(p: &MatrixPolynomial, opts: &LhpOptions) -> Result<LhpCertificate> {
    let report = cubic_stability(p)?;
    let pp = linearize_cubic(p)?;
    if report.conclusion != CubicConclusion::LhpCertified {
        let mut cert = lhp_certificate_with(&pp, opts);
        cert.notes.push(format!("cubic test: {:?}", report.conclusion));
        return Ok(cert);
    }
    let kernel = common_kernel(&[pp.r1.as_mat(), pp.r2.as_mat()])?;
    let route = if kernel.ncols() == 0 {
        HypothesisRoute::NoIsotropic
    } else {
        HypothesisRoute::None
    };
    Ok(LhpCertificate::conclude(
        EejjxStatus::ProvedByCubic,
        route,
        Evidence::Exact,
        vec!["EE-JJx from A2 >= A3 and A1 >= A0 on the linearization".into()],
    ))
}

/// Points `z` with `|z| > tol` and `|arg z| < π/d − angle_tol`, i.e. outside
/// the sector `{|arg z| ≥ π/d} ∪ {0}`.
pub fn sector_membership(points: &[C64], d: usize, tol: f64, angle_tol: f64) -> Result<Vec<C64>> {
    if d == 0 {
        return Err(Error::Precondition("degree must be at least 1".into()));
    }
    let limit = std::f64::consts::PI / d as f64 - angle_tol;
    Ok(points
        .iter()
        .copied()
        .filter(|z| z.norm() > tol && z.arg().abs() < limit)
        .collect())
}

// ---------------------------------------------------------------------------
// Regularity of coefficient subpencils
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubpencilRegularity {
    pub regular: bool,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionItem {
    /// Whether the hypothesis of the item holds.
    pub hypothesis: SubpencilRegularity,
    /// `None` when the hypothesis fails and the item says nothing.
    pub consistent: Option<bool>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityConditionsReport {
    pub p_regular: SubpencilRegularity,
    pub positive_real_eigenvalues: Vec<f64>,
    /// Singular `P`: dimensions of the common kernels of `(J₁, R₁, R₂)` and
    /// `(J₂, R₁, R₂)`.
    pub common_kernel_dims: (usize, usize),
    pub item_i: Option<bool>,
    /// `λR₁ + R₂` regular.
    pub item_ii: ConditionItem,
    /// `λJ₁ + J₂` regular.
    pub item_iii: ConditionItem,
    /// `λR₁ + J₂` regular.
    pub item_iv: ConditionItem,
    /// `λR₂ + J₁` regular.
    pub item_v: ConditionItem,
}

fn subpencil_regularity(p: &Pencil) -> SubpencilRegularity {
    match kronecker_structure(p, &RankPolicy::default()) {
        Ok(ks) => SubpencilRegularity {
            regular: ks.regular,
            evidence: Evidence::Exact,
        },
        Err(_) => SubpencilRegularity {
            regular: regularity_probe(p).regular,
            evidence: Evidence::Heuristic,
        },
    }
}

/// Checks the regularity consequences of two-coefficient subpencils against
/// the computed spectrum of `P`.
pub fn regularity_conditions_report(pp: &PoshPencil) -> Result<RegularityConditionsReport> {
    let (j1, r1, j2, r2) = (pp.j1.as_mat(), pp.r1.as_mat(), pp.j2.as_mat(), pp.r2.as_mat());
    let plus = |a: &Mat, b: &Mat| Pencil::plus(a.clone(), b.clone());
    let pencil = pp.to_pencil();
    let p_regular = subpencil_regularity(&pencil);
    let s = form_scale(pp).max(f64::MIN_POSITIVE);

    let positive: Vec<f64> = if p_regular.regular {
        finite_eigenvalues(&pencil)?
            .into_iter()
            .filter(|z| z.re > EIG_TOL * (1.0 + z.norm()) && z.im.abs() <= 1e-7 * (1.0 + z.norm()))
            .map(|z| z.re)
            .collect()
    } else {
        Vec::new()
    };

    let k1 = common_kernel(&[j1, r1, r2])?.ncols();
    let k2 = common_kernel(&[j2, r1, r2])?.ncols();
    let item_i = (!p_regular.regular).then_some(k1 > 0 && k2 > 0);

    // Eigenvectors of P at each positive eigenvalue, from the small singular
    // values of P(α).
    let eigvecs = |alpha: f64| -> Vec<DVector<C64>> {
        let m = pencil.evaluate(c(alpha, 0.0));
        let (_, sv, v) = svd_full(&m);
        let cut = 1e-7 * spectral_norm(&m).max(s);
        let mut out: Vec<DVector<C64>> = sv
            .iter()
            .enumerate()
            .filter(|(_, &x)| x <= cut)
            .map(|(k, _)| v.column(k).into_owned())
            .collect();
        if out.is_empty() && !sv.is_empty() {
            out.push(v.column(sv.len() - 1).into_owned());
        }
        out
    };
    let skew_at = |alpha: f64| j1 * c(alpha, 0.0) + j2;

    let item = |sub: &Pencil, check: &dyn Fn() -> (bool, String)| -> ConditionItem {
        let hypothesis = subpencil_regularity(sub);
        if !hypothesis.regular {
            return ConditionItem {
                hypothesis,
                consistent: None,
                note: "hypothesis does not hold".into(),
            };
        }
        let (ok, note) = check();
        ConditionItem {
            hypothesis,
            consistent: Some(p_regular.regular && ok),
            note,
        }
    };

    let item_ii = item(&plus(r1, r2)?, &|| {
        (positive.is_empty(), format!("{} positive real eigenvalues", positive.len()))
    });
    let item_iii = item(&plus(j1, j2)?, &|| {
        let worst = positive
            .iter()
            .map(|&a| crate::matrix::sigma_min(&skew_at(a)) / (a * spectral_norm(j1) + spectral_norm(j2)).max(s))
            .fold(0.0, f64::max);
        (worst <= 1e-6, format!("max relative sigma_min(alpha*J1 + J2) = {worst:.2e}"))
    });
    let kernel_check = || {
        let worst = positive
            .iter()
            .flat_map(|&a| {
                let m = skew_at(a);
                eigvecs(a).into_iter().map(move |x| (&m * &x).norm() / (x.norm() * (a + 1.0) * s))
            })
            .fold(0.0, f64::max);
        (worst <= 1e-6, format!("max relative residual of (alpha*J1 + J2)x = {worst:.2e}"))
    };
    let item_iv = item(&plus(r1, j2)?, &kernel_check);
    let item_v = item(&plus(r2, j1)?, &kernel_check);

    Ok(RegularityConditionsReport {
        p_regular,
        positive_real_eigenvalues: positive,
        common_kernel_dims: (k1, k2),
        item_i,
        item_ii,
        item_iii,
        item_iv,
        item_v,
    })
}
