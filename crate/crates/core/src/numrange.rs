//! Numerical ranges of pencils, definiteness thresholds and the pacman
//! regions they exclude.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kcf::{kronecker_structure, RankPolicy};
use crate::matrix::{
    c, hermitian_part, is_positive_definite, lambda_min, null_space, quad_form, singular_values, spectral_norm,
    Mat, C64, EPS,
};
use crate::pencil::{regularity_probe, Pencil, PoshPencil};

/// Denominators below `DISCARD_CUTOFF·‖Lead‖·‖x‖²` are treated as isotropic.
pub const DISCARD_CUTOFF: f64 = 1e-12;
/// Residual bound re-checked for every emitted point.
pub const RESIDUAL_BOUND: f64 = 1e-10;
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    Exact,
    Sampled,
    Heuristic,
}

/// A supremum that may be finite, infinite or taken over an empty set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Threshold {
    Finite(f64),
    Infinite,
    Undefined,
}

impl Threshold {
    /// Numeric value, `+∞` for `Infinite`, `None` when undefined.
    pub fn value(&self) -> Option<f64> {
        match *self {
            Threshold::Finite(b) => Some(b),
            Threshold::Infinite => Some(f64::INFINITY),
            Threshold::Undefined => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        !matches!(self, Threshold::Undefined)
    }
}

/// `sup{β ≥ 0 : h0 + β·k ≻ 0}` by Cholesky bisection on `[0, cap]`.
pub fn definiteness_threshold(h0: &Mat, k: &Mat, cap: f64, bisect_tol: f64) -> Threshold {
    if !is_positive_definite(h0) {
        return Threshold::Undefined;
    }
    if spectral_norm(k) == 0.0 || lambda_min(&hermitian_part(k)) >= 0.0 {
        return Threshold::Infinite;
    }
    let at = |b: f64| is_positive_definite(&(h0 + k * c(b, 0.0)));
    if at(cap) {
        return Threshold::Finite(cap);
    }
    let (mut lo, mut hi) = (0.0, cap);
    while hi - lo > bisect_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Threshold::Finite(lo)
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// `μ = −(x*Cx)/(x*Lx)` for the plus form `λL + C`, or `None` when the
/// denominator is below the isotropy cutoff.
pub fn rayleigh_point(p: &Pencil, x: &DVector<C64>) -> Result<Option<C64>> {
    let (l, cst) = p.plus_parts();
    if !p.is_square() || x.len() != l.ncols() {
        return Err(Error::Dimension("vector length does not match the pencil".into()));
    }
    let nx = x.norm_squared();
    if nx == 0.0 {
        return Err(Error::Precondition("zero vector".into()));
    }
    Ok(rayleigh_with(&l, &cst, spectral_norm(&l), x, nx))
}

fn rayleigh_with(l: &Mat, cst: &Mat, l_norm: f64, x: &DVector<C64>, nx: f64) -> Option<C64> {
    let den = quad_form(l, x);
    if den.norm() <= DISCARD_CUTOFF * l_norm * nx || den.norm() == 0.0 {
        return None;
    }
    Some(-quad_form(cst, x) / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumRangeSample {
    pub points: Vec<C64>,
    pub discarded: usize,
    pub seed: u64,
    pub sample_count: usize,
}

/// Complex Gaussian vector normalized to the unit sphere.
pub fn unit_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let nv = v.norm();
        if nv > 0.0 {
            return v / c(nv, 0.0);
        }
    }
}

/// Deterministic generator for draw chunk `chunk` of a seeded stream.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(chunk);
    r
}

/// `n_samples` Rayleigh points of `p` from unit vectors. Draws are split into
/// fixed chunks with their own stream, so the result is independent of the
/// thread count.
pub fn sample_numerical_range(p: &Pencil, n_samples: usize, seed: u64) -> Result<NumRangeSample> {
    sample_in_subspace(p, None, n_samples, seed)
}

/// As [`sample_numerical_range`] but with `x = B·y` for an orthonormal basis
/// `B` when given.
pub fn sample_in_subspace(p: &Pencil, basis: Option<&Mat>, n_samples: usize, seed: u64) -> Result<NumRangeSample> {
    if !p.is_square() {
        return Err(Error::Dimension("numerical range needs a square pencil".into()));
    }
    let (l, cst) = p.plus_parts();
    let n = l.nrows();
    let dim = basis.map_or(n, |b| b.ncols());
    if dim == 0 || n == 0 {
        return Ok(NumRangeSample {
            points: Vec::new(),
            discarded: n_samples,
            seed,
            sample_count: n_samples,
        });
    }
    let l_norm = spectral_norm(&l);
    let bound = RESIDUAL_BOUND * (l_norm + spectral_norm(&cst));
    let chunks = n_samples.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<Option<C64>>> = (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let mut r = chunk_rng(seed, ch as u64);
            let count = CHUNK.min(n_samples - ch * CHUNK);
            (0..count)
                .map(|_| {
                    let y = unit_vector(dim, &mut r);
                    let x = match basis {
                        Some(b) => b * y,
                        None => y,
                    };
                    let nx = x.norm_squared();
                    let mu = rayleigh_with(&l, &cst, l_norm, &x, nx)?;
                    let res = (quad_form(&l, &x) * mu + quad_form(&cst, &x)).norm();
                    (res <= bound * nx).then_some(mu)
                })
                .collect()
        })
        .collect();
    let mut points = Vec::with_capacity(n_samples);
    let mut discarded = 0;
    for v in per_chunk.into_iter().flatten() {
        match v {
            Some(z) => points.push(z),
            None => discarded += 1,
        }
    }
    Ok(NumRangeSample {
        points,
        discarded,
        seed,
        sample_count: n_samples,
    })
}

// ---------------------------------------------------------------------------
// Thresholds and regions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaThresholds {
    pub beta_plus: Threshold,
    pub beta_minus: Threshold,
    /// `σ_min(tR₁+R₂)/‖J₁‖`, when `J₁ ≠ 0`.
    pub lower_bound: Option<f64>,
    /// `σ_min(R₂)/‖J₁‖`, when `R₂` is invertible and `J₁ ≠ 0`.
    pub strip_bound: Option<f64>,
    pub t: f64,
    pub bisect_tol: f64,
}

impl BetaThresholds {
    pub fn regions(&self) -> Vec<PacmanRegion> {
        let mut out = Vec::new();
        for (th, sign) in [(self.beta_plus, Sign::Plus), (self.beta_minus, Sign::Minus)] {
            if let Some(b) = th.value() {
                if b > 0.0 {
                    out.push(PacmanRegion { beta: b, sign, t: self.t });
                }
            }
        }
        out
    }
}

pub const DEFAULT_BISECT_TOL: f64 = 1e-10;

pub fn beta_thresholds(pp: &PoshPencil, bisect_tol: f64) -> BetaThresholds {
    thresholds(pp, 1.0, bisect_tol)
}

/// Thresholds for `tR₁ + R₂ ± β(iJ₁)`.
pub fn beta_thresholds_scaled(pp: &PoshPencil, t: f64) -> Result<BetaThresholds> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!("scale t must be positive, got {t}")));
    }
    Ok(thresholds(pp, t, DEFAULT_BISECT_TOL))
}

fn thresholds(pp: &PoshPencil, t: f64, bisect_tol: f64) -> BetaThresholds {
    let h0 = pp.r1.as_mat() * c(t, 0.0) + pp.r2.as_mat();
    let ij1 = pp.j1.as_mat() * c(0.0, 1.0);
    let j1_norm = spectral_norm(pp.j1.as_mat());
    let s_h0 = singular_values(&h0);
    let s_j = singular_values(&ij1);
    let sigma_plus = s_j
        .iter()
        .rev()
        .copied()
        .find(|&s| s > EPS * j1_norm * h0.nrows() as f64)
        .unwrap_or(0.0);
    let cap = 1.0 + 2.0 * s_h0.first().copied().unwrap_or(0.0) / sigma_plus.max(EPS);
    let beta_plus = definiteness_threshold(&h0, &ij1, cap, bisect_tol);
    let beta_minus = definiteness_threshold(&h0, &(-&ij1), cap, bisect_tol);
    let defined = beta_plus.is_defined() || beta_minus.is_defined();
    let lower_bound = (j1_norm > 0.0 && defined).then(|| s_h0.last().copied().unwrap_or(0.0) / j1_norm);
    let r2 = pp.r2.as_mat();
    let strip_bound = (j1_norm > 0.0 && is_positive_definite(r2))
        .then(|| singular_values(r2).last().copied().unwrap_or(0.0) / j1_norm);
    BetaThresholds {
        beta_plus,
        beta_minus,
        lower_bound,
        strip_bound,
        t,
        bisect_tol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

/// Region `{Re z > 0, 0 ≤ ±Im z < β, 0 ≤ ±arg z < arctan(β/t)}` that the
/// numerical range avoids. `t = 1` is the unscaled region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacmanRegion {
    pub beta: f64,
    pub sign: Sign,
    pub t: f64,
}

impl PacmanRegion {
    pub fn new(beta: f64, sign: Sign) -> Self {
        Self { beta, sign, t: 1.0 }
    }

    /// Same region with `β` reduced by the relative margin `rel`.
    pub fn shrunk(&self, rel: f64) -> Self {
        let beta = if self.beta.is_infinite() {
            self.beta
        } else {
            self.beta * (1.0 - rel)
        };
        Self { beta, ..*self }
    }

    pub fn angle(&self) -> f64 {
        if self.beta.is_infinite() {
            FRAC_PI_2
        } else {
            (self.beta / self.t).atan()
        }
    }
}

pub fn pacman_excludes(region: &PacmanRegion, z: C64) -> bool {
    let (re, im) = match region.sign {
        Sign::Plus => (z.re, z.im),
        Sign::Minus => (z.re, -z.im),
    };
    let arg = im.atan2(re);
    re > 0.0 && im >= 0.0 && im < region.beta && arg >= 0.0 && arg < region.angle()
}

// ---------------------------------------------------------------------------
// Kernels, isotropic vectors, definite combinations
// ---------------------------------------------------------------------------

/// Orthonormal basis of `∩ ker Mᵢ` from the SVD of the stacked matrices.
pub fn common_kernel(matrices: &[&Mat]) -> Result<Mat> {
    let Some(first) = matrices.first() else {
        return Err(Error::Precondition("no matrices".into()));
    };
    let cols = first.ncols();
    if matrices.iter().any(|m| m.ncols() != cols) {
        return Err(Error::Dimension("column counts differ".into()));
    }
    let rows: usize = matrices.iter().map(|m| m.nrows()).sum();
    let mut stack = Mat::zeros(rows, cols);
    let mut r = 0;
    for m in matrices {
        stack.view_mut((r, 0), (m.nrows(), cols)).copy_from(m);
        r += m.nrows();
    }
    let scale = matrices.iter().map(|m| spectral_norm(m)).fold(0.0, f64::max);
    let tol = 64.0 * EPS * scale * rows.max(cols) as f64;
    Ok(null_space(&stack, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefiniteCombination {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda_min: f64,
}

const GRID: usize = 26;

/// Searches `(α, β, γ)` on the unit sphere with `αh₁ + βh₂ + γh₃ ≻ 0`.
/// Coordinate axes first, then a spherical grid, then local ascent on the
/// smallest eigenvalue. `None` does not prove that no combination exists.
pub fn find_definite_combination(h1: &Mat, h2: &Mat, h3: &Mat) -> Option<DefiniteCombination> {
    let scale = spectral_norm(h1) + spectral_norm(h2) + spectral_norm(h3);
    if scale == 0.0 {
        return None;
    }
    let eval = |v: [f64; 3]| -> f64 {
        let m = h1 * c(v[0], 0.0) + h2 * c(v[1], 0.0) + h3 * c(v[2], 0.0);
        lambda_min(&m)
    };
    let accept = |v: [f64; 3], lm: f64| -> Option<DefiniteCombination> {
        let m = h1 * c(v[0], 0.0) + h2 * c(v[1], 0.0) + h3 * c(v[2], 0.0);
        (lm > 1e-10 * scale && is_positive_definite(&m)).then_some(DefiniteCombination {
            alpha: v[0],
            beta: v[1],
            gamma: v[2],
            lambda_min: lm,
        })
    };
    let axes = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, -1.0],
    ];
    for v in axes {
        if let Some(d) = accept(v, eval(v)) {
            return Some(d);
        }
    }
    let mut best = ([1.0, 0.0, 0.0], f64::NEG_INFINITY);
    for i in 0..GRID {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / GRID as f64;
        for j in 0..GRID {
            let phi = TAU * j as f64 / GRID as f64;
            let v = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let lm = eval(v);
            if lm > best.1 {
                best = (v, lm);
            }
        }
    }
    let (mut v, mut lm) = best;
    let mut step = 0.25;
    while step > 1e-6 {
        let mut improved = false;
        for axis in 0..3 {
            for dir in [-1.0, 1.0] {
                let mut w = v;
                w[axis] += dir * step;
                let nw = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                w.iter_mut().for_each(|x| *x /= nw);
                let lw = eval(w);
                if lw > lm {
                    v = w;
                    lm = lw;
                    improved = true;
                }
            }
        }
        if lm > 1e-6 * scale {
            break;
        }
        if !improved {
            step *= 0.5;
        }
    }
    accept(v, lm)
}

/// Whether `μ` is outside the numerical range, decided through the field of
/// values of `H_a + iH_b`, which is convex: `0 ∉ W(M)` iff some rotation
/// `Re(e^{iθ}M)` is definite. The rotation search is a grid.
pub fn certified_outside(pp: &PoshPencil, mu: C64) -> bool {
    let (al, be) = (mu.re, mu.im);
    let i = c(0.0, 1.0);
    let ij1 = pp.j1.as_mat() * i;
    let ij2 = pp.j2.as_mat() * i;
    let r1 = pp.r1.as_mat();
    let r2 = pp.r2.as_mat();
    let ha = r1 * c(al, 0.0) + &ij1 * c(be, 0.0) + r2;
    let hb = &ij1 * c(al, 0.0) - r1 * c(be, 0.0) + ij2;
    let scale = spectral_norm(&ha) + spectral_norm(&hb);
    (0..72).any(|k| {
        let th = TAU * k as f64 / 72.0;
        let m = &ha * c(th.cos(), 0.0) - &hb * c(th.sin(), 0.0);
        lambda_min(&m) > 1e-10 * scale && is_positive_definite(&m)
    })
}

// ---------------------------------------------------------------------------
// Implication chain
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionVerdict {
    /// `None` when the evidence is inconclusive.
    pub holds: Option<bool>,
    pub evidence: Evidence,
    pub note: String,
}

impl ConditionVerdict {
    fn new(holds: Option<bool>, evidence: Evidence, note: impl Into<String>) -> Self {
        Self {
            holds,
            evidence,
            note: note.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NocommonReport {
    /// `ker R₁ ∩ ker R₂ = {0}`.
    pub kernels_trivial: ConditionVerdict,
    /// No point of the numerical range on `(0, ∞)`.
    pub no_positive_real_points: ConditionVerdict,
    /// Numerical range is not the whole plane.
    pub not_whole_plane: ConditionVerdict,
    /// No common isotropic vector.
    pub no_common_isotropic: ConditionVerdict,
    /// Exact real-case verdict for the common isotropic vector question.
    pub no_common_isotropic_real: Option<ConditionVerdict>,
    pub regular: ConditionVerdict,
    pub warnings: Vec<String>,
}

/// Verdicts for the chain kernel ⇒ no positive real points ⇒ not the whole
/// plane ⇒ no common isotropic vector ⇒ regular.
pub fn nocommon_chain_report(pp: &PoshPencil, sample_budget: usize, seed: u64) -> Result<NocommonReport> {
    let n = pp.n();
    let r1 = pp.r1.as_mat();
    let r2 = pp.r2.as_mat();
    let j1 = pp.j1.as_mat();
    let j2 = pp.j2.as_mat();
    let i = c(0.0, 1.0);
    let mut warnings = Vec::new();
    if n == 2 {
        warnings.push(
            "n = 2: the joint numerical range of three Hermitian matrices need not be convex; definite-combination evidence is weaker".into(),
        );
    }
    let kernel = common_kernel(&[r1, r2])?;
    let a = kernel.ncols() == 0;
    let kernels_trivial = ConditionVerdict::new(
        Some(a),
        Evidence::Exact,
        format!("common kernel of R1, R2 has dimension {}", kernel.ncols()),
    );

    // Positive real points come only from vectors in the common kernel.
    let no_positive_real_points = if a {
        ConditionVerdict::new(Some(true), Evidence::Exact, "implied by trivial kernel intersection")
    } else {
        let sample = sample_in_subspace(&pp.to_pencil(), Some(&kernel), sample_budget, seed)?;
        let hit = sample
            .points
            .iter()
            .find(|z| z.re > 0.0 && z.im.abs() <= 1e-12 * (1.0 + z.norm()));
        match hit {
            Some(z) => ConditionVerdict::new(Some(false), Evidence::Sampled, format!("sampled point {z} on (0, inf)")),
            None => ConditionVerdict::new(None, Evidence::Sampled, "no positive real point among samples"),
        }
    };

    let candidates = [
        c(1.0, 0.0),
        c(0.0, 1.0),
        c(0.0, -1.0),
        c(-1.0, 0.0),
        c(1.0, 1.0),
        c(1.0, -1.0),
        c(-1.0, 1.0),
        c(-1.0, -1.0),
        c(2.0, 0.5),
        c(0.5, 2.0),
    ];
    let not_whole_plane = if no_positive_real_points.holds == Some(true) {
        ConditionVerdict::new(Some(true), Evidence::Exact, "implied by the previous item")
    } else {
        match candidates.iter().find(|&&mu| certified_outside(pp, mu)) {
            Some(mu) => ConditionVerdict::new(Some(true), Evidence::Sampled, format!("{mu} certified outside")),
            None => ConditionVerdict::new(None, Evidence::Sampled, "no candidate point certified outside"),
        }
    };

    let all_kernel = common_kernel(&[r1, r2, j1, j2])?;
    let no_common_isotropic = if a || not_whole_plane.holds == Some(true) {
        ConditionVerdict::new(Some(true), Evidence::Exact, "implied by an earlier item")
    } else if all_kernel.ncols() > 0 {
        ConditionVerdict::new(Some(false), Evidence::Exact, "the four matrices share a kernel vector")
    } else {
        let ij1 = j1 * i;
        let ij2 = j2 * i;
        let triples = [(r1, &ij1, r2), (r1, &ij1, &ij2), (r2, &ij2, r1), (r2, &ij2, &ij1)];
        let found = if n >= 2 {
            triples.iter().find_map(|(a1, a2, a3)| find_definite_combination(a1, a2, a3))
        } else {
            None
        };
        match found {
            Some(d) => ConditionVerdict::new(
                Some(true),
                Evidence::Heuristic,
                format!(
                    "definite combination ({:.4}, {:.4}, {:.4}) with lambda_min {:.3e}",
                    d.alpha, d.beta, d.gamma, d.lambda_min
                ),
            ),
            None => ConditionVerdict::new(None, Evidence::Heuristic, "no definite combination found"),
        }
    };

    let no_common_isotropic_real = pp.is_real().then(|| real_isotropic_verdict(pp, &kernel));

    let regular = match kronecker_structure(&pp.to_pencil(), &RankPolicy::default()) {
        Ok(ks) => ConditionVerdict::new(Some(ks.regular), Evidence::Exact, "Kronecker structure"),
        Err(_) => {
            let probe = regularity_probe(&pp.to_pencil());
            ConditionVerdict::new(Some(probe.regular), Evidence::Heuristic, "random-shift probe")
        }
    };

    Ok(NocommonReport {
        kernels_trivial,
        no_positive_real_points,
        not_whole_plane,
        no_common_isotropic,
        no_common_isotropic_real,
        regular,
        warnings,
    })
}

/// Real case: a real vector in `ker R₁ ∩ ker R₂` is a common isotropic vector
/// because real skew forms vanish on real vectors.
fn real_isotropic_verdict(pp: &PoshPencil, kernel: &Mat) -> ConditionVerdict {
    if kernel.ncols() == 0 {
        return ConditionVerdict::new(Some(true), Evidence::Exact, "common kernel of R1, R2 is trivial");
    }
    let v = kernel.column(0);
    let re: DVector<C64> = v.map(|z| c(z.re, 0.0));
    let im: DVector<C64> = v.map(|z| c(z.im, 0.0));
    let x = if re.norm() >= im.norm() { re } else { im };
    let x = &x / c(x.norm(), 0.0);
    let worst = [&pp.j1, &pp.r1, &pp.j2, &pp.r2]
        .iter()
        .map(|m| quad_form(m.as_mat(), &x).norm())
        .fold(0.0, f64::max);
    ConditionVerdict::new(
        Some(false),
        Evidence::Exact,
        format!("real kernel vector is isotropic (max |x*Ax| = {worst:.2e})"),
    )
}
