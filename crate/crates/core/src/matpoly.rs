//! Matrix polynomials with positive semidefinite Hermitian coefficients and
//! their posH linearizations.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kcf::{structural_index, RankPolicy};
use crate::matrix::{block_diag, c, hermitian_eigenvalues, is_hermitian, is_positive_definite, quad_form, spectral_norm, Mat, C64, EPS};
use crate::numrange::{chunk_rng, definiteness_threshold, unit_vector, PacmanRegion, Sign, Threshold};
use crate::oracles::companion_roots;
use crate::pencil::{default_psd_tolerance, generalized_eigenvalues, Eigenvalue, PoshPencil};

/// `P(λ) = Σ λⁱ Aᵢ`, coefficients stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    coefficients: Vec<Mat>,
}

impl MatrixPolynomial {
    pub fn new(coefficients: Vec<Mat>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::Precondition("degree must be at least 1".into()));
        }
        let n = coefficients[0].nrows();
        for (i, a) in coefficients.iter().enumerate() {
            if a.shape() != (n, n) {
                return Err(Error::Dimension(format!("A{i} is {}x{}, expected {n}x{n}", a.nrows(), a.ncols())));
            }
            if let Some(pos) = a.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite { row: pos % n, col: pos / n });
            }
        }
        Ok(Self { coefficients })
    }

    /// Scalar polynomial from real ascending coefficients.
    pub fn scalar(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&a| Mat::from_element(1, 1, c(a, 0.0))).collect())
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn n(&self) -> usize {
        self.coefficients[0].nrows()
    }

    pub fn coefficients(&self) -> &[Mat] {
        &self.coefficients
    }

    pub fn coefficient(&self, i: usize) -> &Mat {
        &self.coefficients[i]
    }

    pub fn evaluate(&self, z: C64) -> Mat {
        let mut acc = self.coefficients[self.degree()].clone();
        for a in self.coefficients.iter().rev().skip(1) {
            acc = acc * z + a;
        }
        acc
    }

    /// Each coefficient Hermitian with `λ_min ≥ −tol` (default tolerance per
    /// coefficient when `None`).
    pub fn psd_validate(&self, tol: Option<f64>) -> Result<()> {
        for (i, a) in self.coefficients.iter().enumerate() {
            if !is_hermitian(a) {
                return Err(Error::Precondition(format!("A{i} is not Hermitian")));
            }
            let t = tol.unwrap_or_else(|| default_psd_tolerance(a));
            let lm = hermitian_eigenvalues(a).first().copied().unwrap_or(0.0);
            if lm < -t {
                return Err(Error::Precondition(format!(
                    "A{i} is not positive semidefinite: lambda_min = {lm:.3e}, tolerance {t:.3e}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.coefficients.iter().all(|a| a.iter().all(|z| z.im == 0.0))
    }
}

fn place(m: &mut Mat, bi: usize, bj: usize, n: usize, block: &Mat) {
    m.view_mut((bi * n, bj * n), (n, n)).copy_from(block);
}

/// `[[0, I], [−I, 0]]` at block position `(k, k)` times `sign`.
fn place_symplectic(m: &mut Mat, k: usize, n: usize, sign: f64) {
    let id = Mat::identity(n, n) * c(sign, 0.0);
    place(m, k, k + 1, n, &id);
    place(m, k + 1, k, n, &(-id));
}

/// Block-symmetric posH linearization for odd degree `d = 2δ − 1`.
pub fn linearize_odd(p: &MatrixPolynomial) -> Result<PoshPencil> {
    let d = p.degree();
    if d.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "degree {d} is even; use the even-degree linearization"
        )));
    }
    p.psd_validate(None)?;
    let n = p.n();
    let delta = d.div_ceil(2);
    let size = d * n;
    let mut j1 = Mat::zeros(size, size);
    let mut j2 = Mat::zeros(size, size);
    let mut r1 = Mat::zeros(size, size);
    let mut r2 = Mat::zeros(size, size);
    for j in 1..delta {
        let k = 2 * (j - 1);
        place_symplectic(&mut j1, k, n, 1.0);
        place_symplectic(&mut j2, k + 1, n, -1.0);
        place(&mut r1, k, k, n, p.coefficient(2 * j - 1));
        place(&mut r2, k, k, n, p.coefficient(2 * j - 2));
    }
    place(&mut r1, d - 1, d - 1, n, p.coefficient(d));
    place(&mut r2, d - 1, d - 1, n, p.coefficient(d - 1));
    PoshPencil::from_parts(j1, r1, j2, r2, None)
}

/// Block-symmetric posH linearization for even degree `d = 2δ`, which needs
/// `A₀ ≻ 0` for the `A₀⁻¹` block.
pub fn linearize_even(p: &MatrixPolynomial) -> Result<PoshPencil> {
    let d = p.degree();
    if d % 2 == 1 {
        return Err(Error::Precondition(format!(
            "degree {d} is odd; use the odd-degree linearization"
        )));
    }
    p.psd_validate(None)?;
    let a0 = p.coefficient(0);
    if !is_positive_definite(a0) {
        return Err(Error::Precondition("A0 must be invertible (positive definite) for even degree".into()));
    }
    let n = p.n();
    let delta = d / 2;
    let size = d * n;
    let a0_inv = a0
        .clone()
        .cholesky()
        .map(|ch| ch.inverse())
        .ok_or_else(|| Error::Precondition("A0 is not positive definite".into()))?;
    let a0_inv = crate::oracles::hermitize(&a0_inv);
    let mut j1 = Mat::zeros(size, size);
    let mut j2 = Mat::zeros(size, size);
    let mut r1 = Mat::zeros(size, size);
    let mut r2 = Mat::zeros(size, size);
    place(&mut r1, 0, 0, n, &a0_inv);
    for j in 1..delta {
        place_symplectic(&mut j1, 2 * j - 1, n, -1.0);
        place(&mut r1, 2 * j - 1, 2 * j - 1, n, p.coefficient(2 * j));
    }
    place(&mut r1, d - 1, d - 1, n, p.coefficient(d));
    for j in 1..=delta {
        place_symplectic(&mut j2, 2 * j - 2, n, 1.0);
        place(&mut r2, 2 * j - 1, 2 * j - 1, n, p.coefficient(2 * j - 1));
    }
    PoshPencil::from_parts(j1, r1, j2, r2, None)
}

/// Odd or even linearization by degree.
pub fn linearize(p: &MatrixPolynomial) -> Result<PoshPencil> {
    if p.degree() % 2 == 1 {
        linearize_odd(p)
    } else {
        linearize_even(p)
    }
}

/// Cubic linearization `λ[[0,−A₃,0],[A₃,A₂,0],[0,0,A₀]] + [[A₃,0,0],[0,A₁,A₀],[0,−A₀,0]]`.
/// The returned parts are the split into `J₁, R₁, J₂, R₂`.
pub fn linearize_cubic(p: &MatrixPolynomial) -> Result<PoshPencil> {
    if p.degree() != 3 {
        return Err(Error::Precondition(format!("expected a cubic, got degree {}", p.degree())));
    }
    p.psd_validate(None)?;
    let a = p.coefficients();
    if !is_positive_definite(&a[0]) || !is_positive_definite(&a[3]) {
        return Err(Error::Precondition("A0 and A3 must be positive definite".into()));
    }
    let n = p.n();
    let z = Mat::zeros(n, n);
    let mut j1 = Mat::zeros(3 * n, 3 * n);
    place(&mut j1, 0, 1, n, &(-&a[3]));
    place(&mut j1, 1, 0, n, &a[3]);
    let mut j2 = Mat::zeros(3 * n, 3 * n);
    place(&mut j2, 1, 2, n, &a[0]);
    place(&mut j2, 2, 1, n, &(-&a[0]));
    let r1 = block_diag(&[z.clone(), a[2].clone(), a[0].clone()]);
    let r2 = block_diag(&[a[3].clone(), a[1].clone(), z]);
    PoshPencil::from_parts(j1, r1, j2, r2, None)
}

/// Eigenvalues of the polynomial through its posH linearization.
pub fn polynomial_eigenvalues(p: &MatrixPolynomial) -> Result<Vec<Eigenvalue>> {
    generalized_eigenvalues(&linearize(p)?.to_pencil())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolynomialIndex {
    pub computed: usize,
    pub bound: usize,
}

/// Index of the polynomial read off its linearization.
pub fn polynomial_index(p: &MatrixPolynomial, policy: &RankPolicy) -> Result<PolynomialIndex> {
    let lin = linearize(p)?;
    let computed = structural_index(&lin.to_pencil(), policy)?;
    let out = PolynomialIndex {
        computed,
        bound: p.degree(),
    };
    if out.computed > out.bound {
        return Err(Error::Internal(format!(
            "computed index {} exceeds the degree bound {}",
            out.computed, out.bound
        )));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Numerical range of the polynomial
// ---------------------------------------------------------------------------

/// Roots of `x*P(λ)x` with each coefficient clamped to be nonnegative. Leading
/// and trailing coefficients below `1e−14` of the largest are dropped; trailing
/// zeros contribute roots at the origin.
pub fn rayleigh_roots(p: &MatrixPolynomial, x: &DVector<C64>) -> Vec<C64> {
    let a: Vec<f64> = p.coefficients().iter().map(|m| quad_form(m, x).re.max(0.0)).collect();
    let amax = a.iter().copied().fold(0.0, f64::max);
    if amax == 0.0 {
        return Vec::new();
    }
    let cut = 1e-14 * amax;
    let lo = a.iter().position(|&v| v > cut).unwrap_or(0);
    let hi = a.iter().rposition(|&v| v > cut).unwrap_or(0);
    let mut roots = vec![c(0.0, 0.0); lo];
    let mid: Vec<C64> = a[lo..=hi].iter().map(|&v| c(v, 0.0)).collect();
    roots.extend(companion_roots(&mid));
    roots
}

/// Rayleigh roots of `n_samples` random unit vectors, in draw order.
pub fn sample_polynomial_numrange(p: &MatrixPolynomial, n_samples: usize, seed: u64) -> Vec<C64> {
    const CHUNK: usize = 256;
    let n = p.n();
    (0..n_samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|ch| {
            let mut r = chunk_rng(seed, ch as u64);
            let count = CHUNK.min(n_samples - ch * CHUNK);
            (0..count)
                .flat_map(|_| rayleigh_roots(p, &unit_vector(n, &mut r)))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

// ---------------------------------------------------------------------------
// Cubic stability
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CubicConclusion {
    LhpCertified,
    RegionExcludedOnly,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicStabilityReport {
    pub beta_star: Threshold,
    pub pos2_holds: bool,
    pub hypotheses_hold: bool,
    pub conclusion: CubicConclusion,
    /// The symmetric region `{Re z > 0, |Im z| < β*, |arg z| < arctan β*}` as
    /// its two halves.
    pub excluded_regions: Vec<PacmanRegion>,
}

fn psd_within(h: &Mat, tol: f64) -> bool {
    hermitian_eigenvalues(h).first().copied().unwrap_or(0.0) >= -tol
}

/// Sufficient conditions for a cubic `A₃λ³ + A₂λ² + A₁λ + A₀` to have its
/// spectrum in the closed left half-plane.
pub fn cubic_stability(p: &MatrixPolynomial) -> Result<CubicStabilityReport> {
    if p.degree() != 3 {
        return Err(Error::Precondition(format!("expected a cubic, got degree {}", p.degree())));
    }
    let a = p.coefficients();
    if !a.iter().all(is_hermitian) {
        return Err(Error::Precondition("cubic coefficients must be Hermitian".into()));
    }
    let tol = a.iter().map(default_psd_tolerance).fold(0.0, f64::max);
    let hypotheses_hold = is_positive_definite(&a[3])
        && is_positive_definite(&a[2])
        && is_positive_definite(&a[0])
        && psd_within(&a[1], tol)
        && is_positive_definite(&(&a[2] + &a[1]));
    let pos2_holds = psd_within(&(&a[2] - &a[3]), tol) && psd_within(&(&a[1] - &a[0]), tol);
    let beta_star = if hypotheses_hold {
        let n = p.n();
        let h0 = block_diag(&[a[3].clone(), &a[1] + &a[2]]);
        let mut k = Mat::zeros(2 * n, 2 * n);
        place(&mut k, 0, 1, n, &(&a[3] * c(0.0, -1.0)));
        place(&mut k, 1, 0, n, &(&a[3] * c(0.0, 1.0)));
        let s = crate::matrix::singular_values(&k);
        let smin_plus = s.iter().rev().copied().find(|&v| v > EPS * spectral_norm(&k)).unwrap_or(0.0);
        let cap = 1.0 + 2.0 * spectral_norm(&h0) / smin_plus.max(EPS);
        definiteness_threshold(&h0, &k, cap, 1e-12)
    } else {
        Threshold::Undefined
    };
    let conclusion = match (hypotheses_hold, pos2_holds) {
        (true, true) => CubicConclusion::LhpCertified,
        (true, false) => CubicConclusion::RegionExcludedOnly,
        _ => CubicConclusion::Inconclusive,
    };
    let excluded_regions = match beta_star.value() {
        Some(b) if b > 0.0 => vec![PacmanRegion::new(b, Sign::Plus), PacmanRegion::new(b, Sign::Minus)],
        _ => Vec::new(),
    };
    Ok(CubicStabilityReport {
        beta_star,
        pos2_holds,
        hypotheses_hold,
        conclusion,
        excluded_regions,
    })
}

/// Left-hand side of the cubic quadratic-form condition with `x = (x₁, x₂, x₃)`:
/// `−(x₂*A₂x₂ + x₃*A₀x₃)(x₁*A₃x₁ + x₂*A₁x₂) + 4 Re(x₂*A₃x₁) Re(x₂*A₀x₃)`.
pub fn cubic_form_value(p: &MatrixPolynomial, x1: &DVector<C64>, x2: &DVector<C64>, x3: &DVector<C64>) -> f64 {
    let a = p.coefficients();
    let q = |m: &Mat, u: &DVector<C64>| quad_form(m, u).re;
    let b = |m: &Mat, u: &DVector<C64>, v: &DVector<C64>| (u.adjoint() * m * v)[(0, 0)].re;
    -(q(&a[2], x2) + q(&a[0], x3)) * (q(&a[3], x1) + q(&a[1], x2)) + 4.0 * b(&a[3], x2, x1) * b(&a[0], x2, x3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MgtVerdict {
    LhpCertified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MgtReport {
    pub verdict: MgtVerdict,
    pub cubic: CubicStabilityReport,
}

/// `λ³I + aλ²I + bλT + cT`: certified when `a > 1` and `b > c`.
pub fn mgt_stability(a: f64, b: f64, cc: f64, t: &Mat) -> Result<MgtReport> {
    if !(a > 0.0 && b > 0.0 && cc > 0.0) {
        return Err(Error::Precondition("a, b and c must be positive".into()));
    }
    if !is_hermitian(t) || !is_positive_definite(t) {
        return Err(Error::Precondition("T must be Hermitian positive definite".into()));
    }
    let p = crate::oracles::mgt_polynomial(a, b, cc, t)?;
    let cubic = cubic_stability(&p)?;
    let verdict = if a > 1.0 && b > cc {
        debug_assert_eq!(cubic.conclusion, CubicConclusion::LhpCertified);
        MgtVerdict::LhpCertified
    } else {
        MgtVerdict::Inconclusive
    };
    Ok(MgtReport { verdict, cubic })
}
