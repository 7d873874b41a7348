//! Independent references and seeded instance generators.
//!
//! Nothing here calls the staircase or the QZ code: roots come from
//! nalgebra's Schur form and assembled pencils carry their ground truth.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dh::DhVariant;
use crate::error::{Error, Result};
use crate::kcf::{FiniteEigenstructure, KroneckerStructure};
use crate::matpoly::{linearize_cubic, MatrixPolynomial};
use crate::matrix::{block_diag, c, spectral_norm, ComplexMatrix, Mat, C64};
use crate::pencil::{validate_posh, Pencil, PoshPencil};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One canonical Kronecker block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockSpec {
    /// `L_ε`, ε×(ε+1).
    RightSingular(usize),
    /// `L_ηᵀ`, (η+1)×η.
    LeftSingular(usize),
    /// `λI − J_ρ(λ₀)`.
    FiniteJordan(C64, usize),
    /// `λN_σ − I`.
    Infinite(usize),
}

impl BlockSpec {
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            BlockSpec::RightSingular(e) => (e, e + 1),
            BlockSpec::LeftSingular(e) => (e + 1, e),
            BlockSpec::FiniteJordan(_, r) => (r, r),
            BlockSpec::Infinite(s) => (s, s),
        }
    }

    /// `(E, A)` of the block in the `λE − A` convention.
    pub fn coefficients(&self) -> (Mat, Mat) {
        let one = c(1.0, 0.0);
        match *self {
            BlockSpec::RightSingular(e) => {
                let mut ee = Mat::zeros(e, e + 1);
                let mut aa = Mat::zeros(e, e + 1);
                for i in 0..e {
                    ee[(i, i)] = one;
                    aa[(i, i + 1)] = one;
                }
                (ee, aa)
            }
            BlockSpec::LeftSingular(e) => {
                let (ee, aa) = BlockSpec::RightSingular(e).coefficients();
                (ee.transpose(), aa.transpose())
            }
            BlockSpec::FiniteJordan(z, r) => {
                let mut aa = Mat::identity(r, r) * z;
                for i in 0..r.saturating_sub(1) {
                    aa[(i, i + 1)] = one;
                }
                (Mat::identity(r, r), aa)
            }
            BlockSpec::Infinite(s) => {
                let mut ee = Mat::zeros(s, s);
                for i in 0..s.saturating_sub(1) {
                    ee[(i, i + 1)] = one;
                }
                (ee, Mat::identity(s, s))
            }
        }
    }
}

/// Ground-truth structure of a block list, eigenvalues grouped exactly.
pub fn structure_of(blocks: &[BlockSpec]) -> KroneckerStructure {
    let mut right = Vec::new();
    let mut left = Vec::new();
    let mut inf = Vec::new();
    let mut finite: Vec<FiniteEigenstructure> = Vec::new();
    for b in blocks {
        match *b {
            BlockSpec::RightSingular(e) => right.push(e),
            BlockSpec::LeftSingular(e) => left.push(e),
            BlockSpec::Infinite(s) => inf.push(s),
            BlockSpec::FiniteJordan(z, r) => match finite.iter_mut().find(|f| f.value == z) {
                Some(f) => f.partial_multiplicities.push(r),
                None => finite.push(FiniteEigenstructure {
                    value: z,
                    partial_multiplicities: vec![r],
                }),
            },
        }
    }
    KroneckerStructure::from_blocks(right, left, finite, inf)
}

/// Random Kronecker block list that satisfies the dH conditions for
/// `variant`, with total size at most `max_dim`. With `self_conjugate` every
/// non-real eigenvalue comes with its conjugate and the same block sizes.
pub fn random_dh_block_specs(
    variant: DhVariant,
    max_dim: usize,
    self_conjugate: bool,
    rng: &mut Rng64,
) -> Vec<BlockSpec> {
    let mut blocks = Vec::new();
    let mut used = 0;
    let mut values: Vec<C64> = Vec::new();
    let general = variant == DhVariant::GeneralQ;
    for _ in 0..20 {
        if used >= max_dim {
            break;
        }
        let room = max_dim - used;
        let mut add: Vec<BlockSpec> = match rng.random_range(0..5) {
            0 | 1 => {
                let alpha = -rng.random_range(0.3..3.0);
                let beta = if rng.random_bool(0.4) { 0.0 } else { rng.random_range(-3.0..3.0) };
                let z = values
                    .iter()
                    .copied()
                    .find(|v| v.re < 0.0 && rng.random_bool(0.3))
                    .unwrap_or(c(alpha, beta));
                let size = rng.random_range(1..=3);
                let mut v = vec![BlockSpec::FiniteJordan(z, size)];
                if self_conjugate && z.im != 0.0 {
                    v.push(BlockSpec::FiniteJordan(z.conj(), size));
                }
                v
            }
            2 => {
                let beta = if rng.random_bool(0.4) { 0.0 } else { rng.random_range(-3.0..3.0) };
                let z = c(0.0, beta);
                let size = if general && beta == 0.0 && rng.random_bool(0.5) { 2 } else { 1 };
                let mut v = vec![BlockSpec::FiniteJordan(z, size)];
                if self_conjugate && beta != 0.0 {
                    v.push(BlockSpec::FiniteJordan(z.conj(), 1));
                }
                v
            }
            3 => vec![BlockSpec::Infinite(rng.random_range(1..=2))],
            _ => {
                let eps = if general { rng.random_range(0..=1) } else { 0 };
                vec![BlockSpec::RightSingular(eps), BlockSpec::LeftSingular(0)]
            }
        };
        let size: usize = add.iter().map(|b| b.shape().0).sum();
        if size == 0 || size > room {
            continue;
        }
        let clash = add.iter().any(|b| match b {
            BlockSpec::FiniteJordan(z, _) => values.iter().any(|v| v != z && (v - z).norm() < 0.5),
            _ => false,
        });
        if clash {
            continue;
        }
        for b in &add {
            if let BlockSpec::FiniteJordan(z, _) = b {
                if !values.contains(z) {
                    values.push(*z);
                }
            }
        }
        used += size;
        blocks.append(&mut add);
    }
    if blocks.is_empty() {
        blocks.push(BlockSpec::FiniteJordan(c(-1.0, 0.0), 1));
    }
    blocks
}

/// Haar-distributed unitary matrix.
pub fn random_unitary(n: usize, rng: &mut Rng64) -> Mat {
    q_factor(gaussian_matrix(n, n, rng))
}

/// Haar-distributed real orthogonal matrix.
pub fn random_orthogonal(n: usize, rng: &mut Rng64) -> Mat {
    q_factor(real_gaussian_matrix(n, n, rng)).map(|z| c(z.re, 0.0))
}

fn q_factor(g: Mat) -> Mat {
    let n = g.nrows();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng64) -> Mat {
    Mat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn real_gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng64) -> Mat {
    Mat::from_fn(rows, cols, |_, _| c(rng.sample(StandardNormal), 0.0))
}

/// `U·diag(σ)·V*` with `σ ∈ [1, cap]`, so the condition number is at most `cap`.
pub fn conditioned_matrix(n: usize, cap: f64, rng: &mut Rng64) -> Mat {
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    with_singular_values(u, v, cap, rng)
}

/// Real variant of [`conditioned_matrix`].
pub fn real_conditioned_matrix(n: usize, cap: f64, rng: &mut Rng64) -> Mat {
    let u = random_orthogonal(n, rng);
    let v = random_orthogonal(n, rng);
    with_singular_values(u, v, cap, rng)
}

fn with_singular_values(u: Mat, v: Mat, cap: f64, rng: &mut Rng64) -> Mat {
    let n = u.nrows();
    let mut s = Mat::zeros(n, n);
    for i in 0..n {
        let t: f64 = rng.random();
        s[(i, i)] = c(1.0 + (cap - 1.0).max(0.0) * t, 0.0);
    }
    u * s * v.adjoint()
}

/// Random Hermitian positive semidefinite matrix of the given rank.
pub fn random_psd(n: usize, rank: usize, real: bool, rng: &mut Rng64) -> Mat {
    let x = if real {
        real_gaussian_matrix(n, rank, rng)
    } else {
        gaussian_matrix(n, rank, rng)
    };
    let h = &x * x.adjoint();
    hermitize(&h)
}

/// Random skew-Hermitian matrix.
pub fn random_skew(n: usize, real: bool, rng: &mut Rng64) -> Mat {
    let x = if real {
        real_gaussian_matrix(n, n, rng)
    } else {
        gaussian_matrix(n, n, rng)
    };
    skewize(&((&x - x.adjoint()) * c(0.5, 0.0)))
}

/// Exact Hermitian copy built from the upper triangle.
pub fn hermitize(h: &Mat) -> Mat {
    let n = h.nrows();
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = c(h[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            out[(i, j)] = h[(i, j)];
            out[(j, i)] = h[(i, j)].conj();
        }
    }
    out
}

/// Exact skew-Hermitian copy built from the upper triangle.
pub fn skewize(s: &Mat) -> Mat {
    let n = s.nrows();
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = c(0.0, s[(i, i)].im);
        for j in (i + 1)..n {
            out[(i, j)] = s[(i, j)];
            out[(j, i)] = -s[(i, j)].conj();
        }
    }
    out
}

/// Congruence `S* M S` with the structure restored exactly.
pub fn congruence_herm(s: &Mat, m: &Mat) -> Mat {
    hermitize(&(s.adjoint() * m * s))
}

pub fn congruence_skew(s: &Mat, m: &Mat) -> Mat {
    skewize(&(s.adjoint() * m * s))
}

/// Assembled pencil with its ground truth.
#[derive(Debug, Clone)]
pub struct AssembledPencil {
    pub pencil: Pencil,
    pub truth: KroneckerStructure,
    pub blocks: Vec<BlockSpec>,
}

/// `S·diag(blocks)·T` in the `λE − A` convention. `condition_cap = 1` gives
/// `S = T = I`.
pub fn assemble_pencil(blocks: &[BlockSpec], condition_cap: f64, seed: u64) -> Result<AssembledPencil> {
    let (rows, cols) = blocks.iter().fold((0, 0), |(r, c0), b| {
        let (br, bc) = b.shape();
        (r + br, c0 + bc)
    });
    if rows.max(cols) > 512 {
        return Err(Error::SizeCap {
            size: rows.max(cols),
            cap: 512,
        });
    }
    let mut es = Vec::new();
    let mut as_ = Vec::new();
    for b in blocks {
        let (e, a) = b.coefficients();
        es.push(e);
        as_.push(a);
    }
    let e = block_diag(&es);
    let a = block_diag(&as_);
    let (e, a) = if condition_cap <= 1.0 {
        (e, a)
    } else {
        let mut r = rng(seed);
        let s = conditioned_matrix(rows, condition_cap, &mut r);
        let t = conditioned_matrix(cols, condition_cap, &mut r);
        (&s * e * &t, &s * a * &t)
    };
    Ok(AssembledPencil {
        pencil: Pencil::minus(e, a)?,
        truth: structure_of(blocks),
        blocks: blocks.to_vec(),
    })
}

/// Random block list with at most `max_dim` rows and columns. Finite
/// eigenvalues are drawn from a pool with mutual distance at least
/// `separation`; Jordan and infinite blocks have size at most 4.
pub fn random_block_specs(max_dim: usize, separation: f64, rng: &mut Rng64) -> Vec<BlockSpec> {
    let mut pool: Vec<C64> = Vec::new();
    let pool_size = rng.random_range(1..=3);
    let mut guard = 0;
    while pool.len() < pool_size && guard < 200 {
        guard += 1;
        let z = match rng.random_range(0..4) {
            0 => c(0.0, 0.0),
            1 => c(rng.random_range(-3.0..3.0), 0.0),
            2 => c(0.0, rng.random_range(-3.0..3.0)),
            _ => c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
        };
        if pool.iter().all(|p| (p - z).norm() >= separation) {
            pool.push(z);
        }
    }
    let mut blocks = Vec::new();
    let (mut rows, mut cols) = (0usize, 0usize);
    let target = rng.random_range(1..=6);
    for _ in 0..(4 * target) {
        if blocks.len() >= target {
            break;
        }
        let b = match rng.random_range(0..8) {
            0 => BlockSpec::RightSingular(rng.random_range(0..=3)),
            1 => BlockSpec::LeftSingular(rng.random_range(0..=3)),
            2 | 3 => BlockSpec::Infinite(rng.random_range(1..=4)),
            _ => BlockSpec::FiniteJordan(pool[rng.random_range(0..pool.len())], rng.random_range(1..=4)),
        };
        let (br, bc) = b.shape();
        if rows + br <= max_dim && cols + bc <= max_dim && (br + bc) > 0 {
            rows += br;
            cols += bc;
            blocks.push(b);
        }
    }
    if blocks.is_empty() {
        blocks.push(BlockSpec::FiniteJordan(pool[0], 1));
    }
    blocks.shuffle(rng);
    blocks
}

// ---------------------------------------------------------------------------
// Skew-Hermitian building blocks
// ---------------------------------------------------------------------------

/// Flip (sip) matrix.
fn flip(k: usize) -> Mat {
    Mat::from_fn(k, k, |i, j| if i + j + 1 == k { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// Skew-Hermitian pencil `λJ₁ + J₂` with a single infinite block of size `k`:
/// `J₁ = i·F·N_k`, `J₂ = i·F`.
pub fn skew_infinite_block(k: usize) -> (Mat, Mat) {
    let (nk, _) = BlockSpec::Infinite(k).coefficients();
    let f = flip(k);
    let i = c(0.0, 1.0);
    (skewize(&(&f * nk * i)), skewize(&(f * i)))
}

/// Skew-Hermitian pencil `i·[[0, L_ε(λ)], [L_ε(λ)ᵀ, 0]]`, size `2ε+1`, with one
/// right and one left minimal index equal to `ε`.
pub fn skew_singular_pair(eps: usize) -> (Mat, Mat) {
    let (e, a) = BlockSpec::RightSingular(eps).coefficients();
    let n = 2 * eps + 1;
    let mut j1 = Mat::zeros(n, n);
    let mut j2 = Mat::zeros(n, n);
    let i = c(0.0, 1.0);
    j1.view_mut((0, eps), (eps, eps + 1)).copy_from(&(&e * i));
    j1.view_mut((eps, 0), (eps + 1, eps)).copy_from(&(e.transpose() * i));
    j2.view_mut((0, eps), (eps, eps + 1)).copy_from(&(&a * (-i)));
    j2.view_mut((eps, 0), (eps + 1, eps)).copy_from(&(a.transpose() * (-i)));
    (skewize(&j1), skewize(&j2))
}

/// Random singular posH pencil. The singular part is a direct sum of skew
/// pairs with minimal indices `eps` on which both `R`s vanish; the rest is a
/// random regular posH block of size `regular`. Everything is mixed by a
/// random congruence with condition at most `cap`.
pub fn random_singular_posh(eps: &[usize], regular: usize, cap: f64, real: bool, rng: &mut Rng64) -> Result<PoshPencil> {
    let mut j1s = Vec::new();
    let mut j2s = Vec::new();
    let mut zs = Vec::new();
    for &e in eps {
        let (a, b) = skew_singular_pair(e);
        zs.push(Mat::zeros(a.nrows(), a.nrows()));
        j1s.push(a);
        j2s.push(b);
    }
    let (j1r, r1r, j2r, r2r) = separated_regular_block(regular, real, rng);
    j1s.push(j1r);
    j2s.push(j2r);
    let r1 = block_diag(&[zs.clone(), vec![r1r]].concat());
    let r2 = block_diag(&[zs, vec![r2r]].concat());
    let j1 = block_diag(&j1s);
    let j2 = block_diag(&j2s);
    let n = j1.nrows();
    let s = if real {
        real_conditioned_matrix(n, cap, rng)
    } else {
        conditioned_matrix(n, cap, rng)
    };
    PoshPencil::from_parts(
        congruence_skew(&s, &j1),
        congruence_herm(&s, &r1),
        congruence_skew(&s, &j2),
        congruence_herm(&s, &r2),
        None,
    )
}

/// Regular posH block whose coefficients `J₁ + R₁` and `J₂ + R₂` have every
/// singular value either exactly zero or at least 0.05, with norms at most 20.
/// The singular skew pairs have unit entries, so on their scale no eigenvalue
/// sits near infinity or near zero without being exactly there.
fn separated_regular_block(k: usize, real: bool, rng: &mut Rng64) -> (Mat, Mat, Mat, Mat) {
    let separated = |m: &Mat| {
        let s = crate::matrix::singular_values(m);
        let top = s.first().copied().unwrap_or(0.0);
        top <= 20.0 && s.iter().all(|&x| x <= 1e-12 * top || x >= 0.05)
    };
    loop {
        let rr = rng.random_range(1..=k.max(1)).min(k);
        let j1 = random_skew(k, real, rng);
        let j2 = random_skew(k, real, rng);
        let r1 = random_psd(k, rr, real, rng);
        let r2 = random_psd(k, k, real, rng);
        if separated(&(&j1 + &r1)) && separated(&(&j2 + &r2)) {
            return (j1, r1, j2, r2);
        }
    }
}

/// Random posH pencil built over a skew pencil `λJ₁ + J₂` whose index is
/// exactly `kappa` and whose right minimal indices are at most `kappa − 1`.
pub fn random_posh_over_skew(kappa: usize, max_dim: usize, rng: &mut Rng64) -> Result<(PoshPencil, usize)> {
    let mut j1s = Vec::new();
    let mut j2s = Vec::new();
    let (a, b) = skew_infinite_block(kappa);
    j1s.push(a);
    j2s.push(b);
    let mut used = kappa;
    for _ in 0..3 {
        match rng.random_range(0..3) {
            0 => {
                let k = rng.random_range(1..=kappa);
                if used + k <= max_dim {
                    let (a, b) = skew_infinite_block(k);
                    j1s.push(a);
                    j2s.push(b);
                    used += k;
                }
            }
            1 => {
                let e = rng.random_range(0..kappa);
                if used + 2 * e < max_dim {
                    let (a, b) = skew_singular_pair(e);
                    j1s.push(a);
                    j2s.push(b);
                    used += 2 * e + 1;
                }
            }
            _ => {
                let k = rng.random_range(1..=2);
                if used + k <= max_dim {
                    // Hermitian definite lead keeps this part regular and finite.
                    j1s.push(random_psd(k, k, false, rng) * c(0.0, 1.0));
                    j2s.push(random_skew(k, false, rng));
                    used += k;
                }
            }
        }
    }
    let j1 = skewize(&block_diag(&j1s));
    let j2 = skewize(&block_diag(&j2s));
    let n = j1.nrows();
    let r1 = random_psd(n, rng.random_range(0..=n), false, rng);
    let r2 = random_psd(n, rng.random_range(0..=n), false, rng);
    let s = conditioned_matrix(n, 10.0, rng);
    let pp = PoshPencil::from_parts(
        congruence_skew(&s, &j1),
        congruence_herm(&s, &r1),
        congruence_skew(&s, &j2),
        congruence_herm(&s, &r2),
        None,
    )?;
    Ok((pp, kappa))
}

/// Random posH pencil with `R₁ + R₂ ≻ 0`.
pub fn random_posh_definite(n: usize, real: bool, rng: &mut Rng64) -> Result<PoshPencil> {
    let r1 = random_psd(n, rng.random_range(1..=n), real, rng);
    let r2 = random_psd(n, n, real, rng);
    let j1 = random_skew(n, real, rng);
    let j2 = random_skew(n, real, rng);
    PoshPencil::from_parts(j1, r1, j2, r2, None)
}

/// General random posH pencil: PSD parts of random rank (possibly zero).
pub fn random_posh(n: usize, real: bool, rng: &mut Rng64) -> Result<PoshPencil> {
    let r1 = random_psd(n, rng.random_range(0..=n), real, rng);
    let r2 = random_psd(n, rng.random_range(0..=n), real, rng);
    let s1: f64 = rng.random_range(0.0..2.0);
    let s2: f64 = rng.random_range(0.0..2.0);
    let j1 = random_skew(n, real, rng) * c(s1, 0.0);
    let j2 = random_skew(n, real, rng) * c(s2, 0.0);
    PoshPencil::from_parts(skewize(&j1), r1, skewize(&j2), r2, None)
}

/// posH pencil with a known simple eigenvalue `alpha > 0`: the scalar block
/// `i(λ − α)` with zero Hermitian parts, plus a random block with
/// `R₁ + R₂ ≻ 0`, mixed by a congruence.
pub fn random_posh_with_positive_eigenvalue(n: usize, alpha: f64, rng: &mut Rng64) -> Result<PoshPencil> {
    let rest = random_posh_definite(n - 1, false, rng)?;
    let z = Mat::zeros(1, 1);
    let j1 = block_diag(&[Mat::from_element(1, 1, c(0.0, 1.0)), rest.j1.as_mat().clone()]);
    let j2 = block_diag(&[Mat::from_element(1, 1, c(0.0, -alpha)), rest.j2.as_mat().clone()]);
    let r1 = block_diag(&[z.clone(), rest.r1.as_mat().clone()]);
    let r2 = block_diag(&[z, rest.r2.as_mat().clone()]);
    let s = conditioned_matrix(n, 10.0, rng);
    PoshPencil::from_parts(
        congruence_skew(&s, &j1),
        congruence_herm(&s, &r1),
        congruence_skew(&s, &j2),
        congruence_herm(&s, &r2),
        None,
    )
}

/// Random psd-validated polynomial of degree `d` in dimension `n`. When
/// `definite_ends` is set, `A₀` and `A_d` are positive definite.
pub fn random_psd_polynomial(n: usize, d: usize, definite_ends: bool, rng: &mut Rng64) -> Result<MatrixPolynomial> {
    let coeffs: Vec<Mat> = (0..=d)
        .map(|i| {
            let rank = if definite_ends && (i == 0 || i == d) {
                n
            } else {
                rng.random_range(0..=n)
            };
            random_psd(n, rank, false, rng)
        })
        .collect();
    MatrixPolynomial::new(coeffs)
}

// ---------------------------------------------------------------------------
// Routh–Hurwitz
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouthVerdict {
    StrictLhp,
    ClosedLhpMarginal,
    Unstable,
}

/// Routh–Hurwitz classification of `a₀ + a₁λ + … + a_dλ^d` (ascending
/// coefficients).
pub fn routh_hurwitz(coeffs: &[f64]) -> Result<RouthVerdict> {
    let mut a: Vec<f64> = coeffs.to_vec();
    while a.len() > 1 && *a.last().unwrap() == 0.0 {
        a.pop();
    }
    let lead = *a.last().ok_or_else(|| Error::Precondition("empty polynomial".into()))?;
    if lead == 0.0 {
        return Err(Error::Precondition("zero leading coefficient".into()));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Precondition("non-finite coefficient".into()));
    }
    if lead < 0.0 {
        a.iter_mut().for_each(|x| *x = -*x);
    }
    // Roots at the origin lie on the imaginary axis.
    let zeros_at_origin = a.iter().take_while(|&&x| x == 0.0).count();
    let a: Vec<f64> = a[zeros_at_origin..].to_vec();
    let d = a.len() - 1;
    if d == 0 {
        return Ok(if zeros_at_origin > 0 {
            RouthVerdict::ClosedLhpMarginal
        } else {
            RouthVerdict::StrictLhp
        });
    }
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let zero_tol = 1e-12;
    let width = d / 2 + 1;
    let row_from = |start: usize| -> Vec<f64> {
        (0..width)
            .map(|k| {
                let p = d as isize - start as isize - 2 * k as isize;
                if p >= 0 {
                    a[p as usize]
                } else {
                    0.0
                }
            })
            .collect()
    };
    let mut rows: Vec<Vec<f64>> = vec![row_from(0), row_from(1)];
    let mut special = false;
    for level in 1..=d {
        let prev = rows[level - 1].clone();
        let mut cur = rows[level].clone();
        let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let (cs, ps) = (norm(&cur), norm(&prev));
        if cs <= zero_tol * ps {
            // Whole row vanishes: use the derivative of the auxiliary
            // polynomial built from the previous row. Its roots are symmetric
            // about the origin.
            special = true;
            let q = d - level + 1;
            cur = (0..width)
                .map(|k| {
                    let power = q as isize - 2 * k as isize;
                    if power > 0 {
                        prev[k] * power as f64
                    } else {
                        0.0
                    }
                })
                .collect();
        } else if cur[0].abs() <= zero_tol * cs.max(ps) {
            special = true;
            cur[0] = 1e-9 * scale;
        }
        rows[level] = cur.clone();
        if level < d {
            let next: Vec<f64> = (0..width)
                .map(|k| {
                    let p1 = prev.get(k + 1).copied().unwrap_or(0.0);
                    let c1 = cur.get(k + 1).copied().unwrap_or(0.0);
                    (cur[0] * p1 - prev[0] * c1) / cur[0]
                })
                .collect();
            rows.push(next);
        }
    }
    // Sign changes in the first column count right-half-plane roots. With no
    // change, a special case means roots on the imaginary axis.
    let first: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    if sign_changes(&first) > 0 {
        return Ok(RouthVerdict::Unstable);
    }
    if special || zeros_at_origin > 0 {
        return Ok(RouthVerdict::ClosedLhpMarginal);
    }
    Ok(RouthVerdict::StrictLhp)
}

fn sign_changes(v: &[f64]) -> usize {
    let signs: Vec<f64> = v.iter().copied().filter(|x| *x != 0.0).collect();
    signs.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
}

/// Roots of a complex polynomial given by ascending coefficients, via the
/// eigenvalues of its companion matrix.
pub fn companion_roots(coeffs: &[C64]) -> Vec<C64> {
    let mut a: Vec<C64> = coeffs.to_vec();
    while a.len() > 1 && a.last().unwrap().norm() == 0.0 {
        a.pop();
    }
    let d = a.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = a[d];
    let m = faer::Mat::<C64>::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -a[i] / lead
        } else if i == j + 1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    m.eigenvalues().expect("companion eigenvalues did not converge")
}

pub fn real_companion_roots(coeffs: &[f64]) -> Vec<C64> {
    companion_roots(&coeffs.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
}

/// Roots of `det P(λ)` by evaluation at `n·d + 1` scaled roots of unity,
/// a discrete Fourier transform back to coefficients, and companion roots.
pub fn scalarized_roots(p: &MatrixPolynomial) -> Result<Vec<C64>> {
    let n = p.n();
    let d = p.degree();
    let nd = n * d;
    if nd > 64 {
        return Err(Error::SizeCap { size: nd, cap: 64 });
    }
    let norms: Vec<f64> = p.coefficients().iter().map(spectral_norm).collect();
    let rho = if norms[0] > 0.0 && norms[d] > 0.0 {
        (norms[0] / norms[d]).powf(1.0 / d as f64)
    } else {
        1.0
    };
    let npts = nd + 1;
    let values: Vec<C64> = (0..npts)
        .map(|k| {
            let z = C64::from_polar(rho, std::f64::consts::TAU * k as f64 / npts as f64);
            p.evaluate(z).determinant()
        })
        .collect();
    let mag_scale: f64 = norms
        .iter()
        .enumerate()
        .map(|(i, s)| s * rho.powi(i as i32))
        .sum::<f64>()
        .powi(n as i32);
    let vmax = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if vmax <= 1e-12 * mag_scale {
        return Err(Error::SingularPencil { probes: npts });
    }
    let mut coeffs: Vec<C64> = (0..npts)
        .map(|j| {
            let s: C64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, -std::f64::consts::TAU * (j * k) as f64 / npts as f64))
                .sum();
            s / npts as f64 / rho.powi(j as i32)
        })
        .collect();
    // Drop leading coefficients that are interpolation noise.
    let cmax = coeffs
        .iter()
        .enumerate()
        .map(|(j, c0)| c0.norm() * rho.powi(j as i32))
        .fold(0.0f64, f64::max);
    while coeffs.len() > 1 {
        let j = coeffs.len() - 1;
        if coeffs[j].norm() * rho.powi(j as i32) <= 1e-11 * cmax {
            coeffs.pop();
        } else {
            break;
        }
    }
    Ok(companion_roots(&coeffs))
}

// ---------------------------------------------------------------------------
// Named examples
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum PaperExample {
    /// The 3×3 linearization of `λ³ + 1`.
    ExUnstable,
    /// `iλ + (β − iα)` (negated when `β < 0`), eigenvalue `α + iβ`.
    ExJja { alpha: f64, beta: f64 },
    /// Real 2×2 pencil with eigenvalues `α ± iβ`, `β ≥ 0`.
    ExJjb { alpha: f64, beta: f64 },
    /// `λ(J₁ + tR₁) + (J₂ + tR₂)` with the 4×4 matrices of the example.
    Conjecture { t: f64 },
    /// Structured linearization of `λ³I + aλ²I + bλT + cT`.
    Mgt { a: f64, b: f64, c: f64, t: Mat },
    /// `λ diag(M, K − N) + [[D + G, K + N], [−K + N, 0]]`.
    Brake { m: Mat, d: Mat, g: Mat, k: Mat, n: Mat },
}

fn rm(rows: &[&[f64]]) -> Mat {
    ComplexMatrix::from_real_rows(rows).expect("literal matrix").into_inner()
}

impl PaperExample {
    /// Looks an example up by name with default parameters.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let p = |i: usize, dflt: f64| params.get(i).copied().unwrap_or(dflt);
        match name {
            "ex_unstable" => Ok(PaperExample::ExUnstable),
            "ex_jja" => Ok(PaperExample::ExJja { alpha: p(0, 1.0), beta: p(1, 0.0) }),
            "ex_jjb" => Ok(PaperExample::ExJjb { alpha: p(0, 1.0), beta: p(1, 0.0) }),
            "conjecture" => Ok(PaperExample::Conjecture { t: p(0, 0.0) }),
            "mgt" => Ok(PaperExample::Mgt {
                a: p(0, 2.0),
                b: p(1, 2.0),
                c: p(2, 1.0),
                t: Mat::identity(3, 3),
            }),
            "brake" => {
                let s = p(0, 0.0);
                Ok(PaperExample::Brake {
                    m: Mat::identity(2, 2),
                    d: rm(&[&[0.1, 0.0], &[0.0, 0.1]]),
                    g: rm(&[&[0.0, 1.0], &[-1.0, 0.0]]),
                    k: rm(&[&[2.0, -1.0], &[-1.0, 2.0]]),
                    n: rm(&[&[0.0, s], &[-s, 0.0]]),
                })
            }
            other => Err(Error::Precondition(format!("unknown example `{other}`"))),
        }
    }

    pub fn build(&self) -> Result<PoshPencil> {
        match self {
            PaperExample::ExUnstable => {
                let p = Pencil::plus(
                    rm(&[&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]),
                    rm(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, -1.0, 0.0]]),
                )?;
                validate_posh(&p, None)
            }
            PaperExample::ExJja { alpha, beta } => {
                let sgn = if *beta >= 0.0 { 1.0 } else { -1.0 };
                let one = |z: C64| Mat::from_element(1, 1, z);
                PoshPencil::from_parts(
                    one(c(0.0, sgn)),
                    one(c(0.0, 0.0)),
                    one(c(0.0, -sgn * alpha)),
                    one(c(sgn * beta, 0.0)),
                    None,
                )
            }
            PaperExample::ExJjb { alpha, beta } => {
                if *beta < 0.0 {
                    return Err(Error::Precondition("ex_jjb needs beta >= 0".into()));
                }
                // The off-diagonal sign of J₂ is chosen so that the spectrum
                // is α ± iβ.
                PoshPencil::from_parts(
                    rm(&[&[0.0, 1.0], &[-1.0, 0.0]]),
                    Mat::zeros(2, 2),
                    rm(&[&[0.0, -alpha], &[*alpha, 0.0]]),
                    rm(&[&[*beta, 0.0], &[0.0, *beta]]),
                    None,
                )
            }
            PaperExample::Conjecture { t } => {
                if *t < 0.0 {
                    return Err(Error::Precondition("conjecture needs t >= 0".into()));
                }
                let (j1, j2, r1, r2) = conjecture_matrices();
                PoshPencil::from_parts(j1, r1 * c(*t, 0.0), j2, r2 * c(*t, 0.0), None)
            }
            PaperExample::Mgt { a, b, c: cc, t } => {
                if *a <= 0.0 || *b <= 0.0 || *cc <= 0.0 {
                    return Err(Error::Precondition("mgt needs a, b, c > 0".into()));
                }
                linearize_cubic(&mgt_polynomial(*a, *b, *cc, t)?)
            }
            PaperExample::Brake { m, d, g, k, n } => {
                let z = Mat::zeros(m.nrows(), m.nrows());
                let lead = block_diag(&[m.clone(), k - n]);
                let mut cst = Mat::zeros(2 * m.nrows(), 2 * m.nrows());
                let h = m.nrows();
                cst.view_mut((0, 0), (h, h)).copy_from(&(d + g));
                cst.view_mut((0, h), (h, h)).copy_from(&(k + n));
                cst.view_mut((h, 0), (h, h)).copy_from(&(n - k));
                cst.view_mut((h, h), (h, h)).copy_from(&z);
                validate_posh(&Pencil::plus(lead, cst)?, None)
            }
        }
    }
}

/// `(J₁, J₂, R₁, R₂)` of the example with the 2×2 matrix `J` having `−0.1`
/// on its diagonal.
pub fn conjecture_matrices() -> (Mat, Mat, Mat, Mat) {
    let j = rm(&[&[-0.1, 1.0], &[0.0, -0.1]]);
    let mut j1 = Mat::zeros(4, 4);
    let mut j2 = Mat::zeros(4, 4);
    let i2 = Mat::identity(2, 2);
    j1.view_mut((0, 2), (2, 2)).copy_from(&i2);
    j1.view_mut((2, 0), (2, 2)).copy_from(&(-&i2));
    j2.view_mut((0, 2), (2, 2)).copy_from(&(-&j));
    j2.view_mut((2, 0), (2, 2)).copy_from(&j.adjoint());
    let ones = Mat::from_element(4, 4, c(1.0, 0.0));
    let r2 = Mat::identity(4, 4) * c(4.0, 0.0) + &ones;
    (j1, j2, ones, r2)
}

/// `λ³I + aλ²I + bλT + cT` as a coefficient list.
pub fn mgt_polynomial(a: f64, b: f64, cc: f64, t: &Mat) -> Result<MatrixPolynomial> {
    let n = t.nrows();
    let id = Mat::identity(n, n);
    MatrixPolynomial::new(vec![
        t * c(cc, 0.0),
        t * c(b, 0.0),
        &id * c(a, 0.0),
        id,
    ])
}

/// Ten-by-ten style instance: `R = 0.04·XᵀX` with Gaussian `X`, `J = Y − Yᵀ`
/// with uniform `Y`.
pub fn ex1_like(n: usize, seed: u64) -> Result<PoshPencil> {
    let mut r = rng(seed);
    let x1 = real_gaussian_matrix(n, n, &mut r);
    let x2 = real_gaussian_matrix(n, n, &mut r);
    let u1 = Mat::from_fn(n, n, |_, _| c(r.random::<f64>(), 0.0));
    let u2 = Mat::from_fn(n, n, |_, _| c(r.random::<f64>(), 0.0));
    let r1 = hermitize(&(x1.adjoint() * &x1 * c(0.04, 0.0)));
    let r2 = hermitize(&(x2.adjoint() * &x2 * c(0.04, 0.0)));
    let j1 = skewize(&(&u1 - u1.transpose()));
    let j2 = skewize(&(&u2 - u2.transpose()));
    PoshPencil::from_parts(j1, r1, j2, r2, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routh_examples() {
        assert_eq!(routh_hurwitz(&[1.0, 2.0, 2.0, 1.0]).unwrap(), RouthVerdict::StrictLhp);
        assert_eq!(routh_hurwitz(&[1.0, 1.0, 1.0, 1.0]).unwrap(), RouthVerdict::ClosedLhpMarginal);
        assert_eq!(routh_hurwitz(&[1.0, 0.0, 0.0, 1.0]).unwrap(), RouthVerdict::Unstable);
        assert!(routh_hurwitz(&[0.0]).is_err());
    }

    #[test]
    fn routh_with_zero_root_and_quartic() {
        // λ(λ + 1)
        assert_eq!(routh_hurwitz(&[0.0, 1.0, 1.0]).unwrap(), RouthVerdict::ClosedLhpMarginal);
        // (λ² + 1)(λ² + 2λ + 2)
        assert_eq!(
            routh_hurwitz(&[2.0, 2.0, 3.0, 2.0, 1.0]).unwrap(),
            RouthVerdict::ClosedLhpMarginal
        );
        // (λ − 1)(λ + 2)
        assert_eq!(routh_hurwitz(&[-2.0, 1.0, 1.0]).unwrap(), RouthVerdict::Unstable);
    }

    #[test]
    fn companion_roots_of_cube() {
        let mut r = real_companion_roots(&[1.0, 0.0, 0.0, 1.0]);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] + c(1.0, 0.0)).norm() < 1e-12);
        assert!((r[1].re - 0.5).abs() < 1e-12 && (r[1].im.abs() - 0.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn assembled_identity_transform() {
        let a = assemble_pencil(&[BlockSpec::FiniteJordan(c(-1.0, 0.0), 1)], 1.0, 0).unwrap();
        let (e, aa) = a.pencil.minus_parts();
        assert_eq!(e[(0, 0)], c(1.0, 0.0));
        assert_eq!(aa[(0, 0)], c(-1.0, 0.0));
        assert_eq!(a.truth.finite_eigenstructure[0].partial_multiplicities, vec![1]);
    }

    #[test]
    fn assembled_singular_pair_dims() {
        let a = assemble_pencil(&[BlockSpec::RightSingular(1), BlockSpec::LeftSingular(1)], 100.0, 4).unwrap();
        assert_eq!((a.pencil.rows(), a.pencil.cols()), (3, 3));
        assert_eq!(a.truth.right_minimal_indices, vec![1]);
        assert_eq!(a.truth.left_minimal_indices, vec![1]);
        let b = assemble_pencil(&[BlockSpec::Infinite(3)], 100.0, 5).unwrap();
        assert_eq!(b.truth.index, 3);
    }

    #[test]
    fn real_conditioned_matrix_is_real_and_bounded() {
        let mut r = rng(10);
        for _ in 0..20 {
            let m = real_conditioned_matrix(5, 10.0, &mut r);
            assert!(m.iter().all(|z| z.im == 0.0));
            let s = crate::matrix::singular_values(&m);
            assert!(s[0] / s[4] <= 10.0 + 1e-9);
        }
    }

    #[test]
    fn conditioned_matrix_respects_cap() {
        let mut r = rng(9);
        for _ in 0..20 {
            let m = conditioned_matrix(6, 100.0, &mut r);
            let s = crate::matrix::singular_values(&m);
            assert!(s[0] / s[5] <= 100.0 + 1e-9);
        }
    }

    #[test]
    fn conjecture_transcription() {
        let (j1, j2, r1, r2) = conjecture_matrices();
        assert_eq!(r2[(0, 0)], c(5.0, 0.0));
        assert_eq!(r2[(0, 1)], c(1.0, 0.0));
        assert!(r1.iter().all(|z| *z == c(1.0, 0.0)));
        assert_eq!(j1[(0, 2)], c(1.0, 0.0));
        assert_eq!(j1[(2, 0)], c(-1.0, 0.0));
        assert_eq!(j2[(0, 2)], c(0.1, 0.0));
        assert_eq!(j2[(0, 3)], c(-1.0, 0.0));
        assert_eq!(j2[(3, 0)], c(1.0, 0.0));
        assert_eq!(j2[(2, 0)], c(-0.1, 0.0));
        for t in [0.0, 0.5, 3.0] {
            assert!(PaperExample::Conjecture { t }.build().is_ok());
        }
    }

    #[test]
    fn skew_blocks_are_skew() {
        for k in 1..5 {
            let (a, b) = skew_infinite_block(k);
            assert!(crate::matrix::is_skew_hermitian(&a) && crate::matrix::is_skew_hermitian(&b));
            let (a, b) = skew_singular_pair(k - 1);
            assert!(crate::matrix::is_skew_hermitian(&a) && crate::matrix::is_skew_hermitian(&b));
        }
    }

    #[test]
    fn unknown_example_is_refused() {
        assert!(PaperExample::from_name("nope", &[]).is_err());
    }
}
