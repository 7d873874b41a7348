//! Equivalence to dissipative Hamiltonian pencils `λE − (J − R)Q`.
//!
//! The checker reads only Kronecker data. The realization assembles one
//! small dH block per Kronecker block, so the result is equivalent to any
//! pencil with the given structure.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kcf::{FiniteEigenstructure, KroneckerStructure};
use crate::matrix::{block_diag, c, Mat, C64};
use crate::pencil::DhPencil;

/// Default tolerance on `Re λ` (relative to `1 + |λ|`) for deciding that an
/// eigenvalue lies on the imaginary axis.
pub const AXIS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DhVariant {
    /// `Q` arbitrary with `λE − Q` regular.
    GeneralQ,
    /// `Q = I`.
    QIdentity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DhCondition {
    SpectrumLhp,
    ImaginarySemisimple,
    ZeroMultiplicity,
    IndexBound,
    MinimalIndices,
}

/// The datum responsible for the first violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DhWitness {
    Eigenvalue { value: C64, partial_multiplicity: usize },
    Index(usize),
    RightMinimalIndex(usize),
    LeftMinimalIndex(usize),
    NotSquare { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DhVerdict {
    pub variant: DhVariant,
    pub holds: bool,
    pub violated_conditions: Vec<DhCondition>,
    pub witness: Option<DhWitness>,
}

fn on_axis(z: C64, tol: f64) -> bool {
    z.re.abs() <= tol * (1.0 + z.norm())
}

pub fn check_dh_equivalence(ks: &KroneckerStructure, variant: DhVariant) -> DhVerdict {
    check_dh_equivalence_with(ks, variant, AXIS_TOLERANCE)
}

/// Checks conditions (a)–(d) of the characterization for `variant`, with
/// `axis_tol` deciding membership of the imaginary axis.
pub fn check_dh_equivalence_with(ks: &KroneckerStructure, variant: DhVariant, axis_tol: f64) -> DhVerdict {
    let mut violated = Vec::new();
    let mut witness = None;
    let mut flag = |cond: DhCondition, w: DhWitness, violated: &mut Vec<DhCondition>| {
        if !violated.contains(&cond) {
            violated.push(cond);
        }
        if witness.is_none() {
            witness = Some(w);
        }
    };

    for f in &ks.finite_eigenstructure {
        let z = f.value;
        let largest = f.partial_multiplicities.iter().copied().max().unwrap_or(0);
        let w = DhWitness::Eigenvalue {
            value: z,
            partial_multiplicity: largest,
        };
        if on_axis(z, axis_tol) {
            let is_zero = z.norm() <= axis_tol;
            match variant {
                DhVariant::GeneralQ if is_zero => {
                    if largest > 2 {
                        flag(DhCondition::ZeroMultiplicity, w, &mut violated);
                    }
                }
                _ => {
                    if largest > 1 {
                        flag(DhCondition::ImaginarySemisimple, w, &mut violated);
                    }
                }
            }
        } else if z.re > 0.0 {
            flag(DhCondition::SpectrumLhp, w, &mut violated);
        }
    }
    if ks.index > 2 {
        flag(DhCondition::IndexBound, DhWitness::Index(ks.index), &mut violated);
    }
    if ks.rows != ks.cols {
        flag(
            DhCondition::MinimalIndices,
            DhWitness::NotSquare {
                rows: ks.rows,
                cols: ks.cols,
            },
            &mut violated,
        );
    }
    if let Some(&eta) = ks.left_minimal_indices.iter().find(|&&eta| eta > 0) {
        flag(DhCondition::MinimalIndices, DhWitness::LeftMinimalIndex(eta), &mut violated);
    }
    let right_cap = match variant {
        DhVariant::GeneralQ => 1,
        DhVariant::QIdentity => 0,
    };
    if let Some(&eps) = ks.right_minimal_indices.iter().find(|&&eps| eps > right_cap) {
        flag(DhCondition::MinimalIndices, DhWitness::RightMinimalIndex(eps), &mut violated);
    }
    DhVerdict {
        variant,
        holds: violated.is_empty(),
        violated_conditions: violated,
        witness,
    }
}

/// True when eigenvalues are closed under conjugation with matching
/// partial multiplicities.
pub fn is_self_conjugate(ks: &KroneckerStructure, tol: f64) -> bool {
    ks.finite_eigenstructure.iter().all(|f| {
        if f.value.im.abs() <= tol * (1.0 + f.value.norm()) {
            return true;
        }
        ks.finite_eigenstructure.iter().any(|g| {
            (g.value - f.value.conj()).norm() <= tol * (1.0 + f.value.norm())
                && g.partial_multiplicities == f.partial_multiplicities
        })
    })
}

/// One block `(E, J, R, Q)`.
struct Block {
    e: Mat,
    j: Mat,
    r: Mat,
    q: Mat,
}

impl Block {
    fn from_real(e: &[f64], j: &[f64], r: &[f64], q: &[f64], k: usize) -> Self {
        let m = |v: &[f64]| Mat::from_row_slice(k, k, &v.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        Self {
            e: m(e),
            j: m(j),
            r: m(r),
            q: m(q),
        }
    }

    fn standard(j: Mat, r: Mat) -> Self {
        let k = j.nrows();
        Self {
            e: Mat::identity(k, k),
            j,
            r,
            q: Mat::identity(k, k),
        }
    }
}

/// `λI − M` with `M` upper bidiagonal, `α + iβ` on the diagonal and `α` above
/// it, split as `J = (M − M*)/2`, `R = −(M + M*)/2`.
fn jordan_lhp(alpha: f64, beta: f64, size: usize) -> Block {
    let mut j = Mat::zeros(size, size);
    let mut r = Mat::zeros(size, size);
    for i in 0..size {
        j[(i, i)] = c(0.0, beta);
        r[(i, i)] = c(-alpha, 0.0);
        if i + 1 < size {
            j[(i, i + 1)] = c(0.5 * alpha, 0.0);
            j[(i + 1, i)] = c(-0.5 * alpha, 0.0);
            r[(i, i + 1)] = c(-0.5 * alpha, 0.0);
            r[(i + 1, i)] = c(-0.5 * alpha, 0.0);
        }
    }
    Block::standard(j, r)
}

/// Real Jordan block for `α ± iβ`: block bidiagonal with
/// `Λ = [[α, β], [−β, α]]` on the diagonal and `αI₂` above it.
fn jordan_lhp_real_pair(alpha: f64, beta: f64, size: usize) -> Block {
    let k = 2 * size;
    let mut m = Mat::zeros(k, k);
    for b in 0..size {
        let o = 2 * b;
        m[(o, o)] = c(alpha, 0.0);
        m[(o + 1, o + 1)] = c(alpha, 0.0);
        m[(o, o + 1)] = c(beta, 0.0);
        m[(o + 1, o)] = c(-beta, 0.0);
        if b + 1 < size {
            m[(o, o + 2)] = c(alpha, 0.0);
            m[(o + 1, o + 3)] = c(alpha, 0.0);
        }
    }
    let mt = m.transpose();
    let j = Mat::from_fn(k, k, |a, b| (m[(a, b)] - mt[(a, b)]) * 0.5);
    let r = Mat::from_fn(k, k, |a, b| -(m[(a, b)] + mt[(a, b)]) * 0.5);
    Block::standard(j, r)
}

fn imaginary(beta: f64) -> Block {
    Block::standard(Mat::from_element(1, 1, c(0.0, beta)), Mat::zeros(1, 1))
}

fn imaginary_real_pair(beta: f64) -> Block {
    Block::from_real(&[1.0, 0.0, 0.0, 1.0], &[0.0, beta, -beta, 0.0], &[0.0; 4], &[1.0, 0.0, 0.0, 1.0], 2)
}

/// `λI₂ − J₂(0)`, admissible only for arbitrary `Q`.
fn zero_jordan_two() -> Block {
    Block::from_real(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0, -1.0, 0.0], &[0.0; 4], &[0.0, 0.0, 0.0, 1.0], 2)
}

fn infinite(size: usize) -> Block {
    match size {
        1 => Block::from_real(&[0.0], &[0.0], &[1.0], &[1.0], 1),
        _ => Block::from_real(&[0.0, 0.0, 0.0, 1.0], &[0.0, 1.0, -1.0, 0.0], &[0.0; 4], &[1.0, 0.0, 0.0, 1.0], 2),
    }
}

/// Pair of minimal indices `(left 0, right ε)` with `ε ∈ {0, 1}`.
fn singular_pair(eps: usize) -> Block {
    match eps {
        0 => Block::from_real(&[0.0], &[0.0], &[0.0], &[1.0], 1),
        _ => Block::from_real(&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, -1.0, 0.0], &[0.0; 4], &[0.0, 0.0, 0.0, 1.0], 2),
    }
}

/// Builds a dH pencil with Kronecker structure `ks`. The realization is real
/// whenever the structure is self-conjugate.
pub fn realize_dh(ks: &KroneckerStructure, variant: DhVariant) -> Result<DhPencil> {
    realize_dh_with(ks, variant, AXIS_TOLERANCE)
}

pub fn realize_dh_with(ks: &KroneckerStructure, variant: DhVariant, axis_tol: f64) -> Result<DhPencil> {
    let verdict = check_dh_equivalence_with(ks, variant, axis_tol);
    if !verdict.holds {
        return Err(Error::Precondition(format!(
            "structure is not dH-realizable for {variant:?}: violated {:?}, witness {:?}",
            verdict.violated_conditions, verdict.witness
        )));
    }
    let real = is_self_conjugate(ks, axis_tol);

    let (imag, lhp): (Vec<&FiniteEigenstructure>, Vec<&FiniteEigenstructure>) =
        ks.finite_eigenstructure.iter().partition(|f| on_axis(f.value, axis_tol));
    let mut blocks = Vec::new();

    for f in &lhp {
        let (alpha, beta) = (f.value.re, f.value.im);
        let conj_partner = real && beta.abs() > axis_tol * (1.0 + f.value.norm());
        if conj_partner && beta < 0.0 {
            continue;
        }
        for &m in &f.partial_multiplicities {
            if conj_partner {
                blocks.push(jordan_lhp_real_pair(alpha, beta, m));
            } else {
                blocks.push(jordan_lhp(alpha, if real { 0.0 } else { beta }, m));
            }
        }
    }
    for f in &imag {
        let beta = f.value.im;
        let is_zero = f.value.norm() <= axis_tol;
        let conj_partner = real && !is_zero;
        if conj_partner && beta < 0.0 {
            continue;
        }
        for &m in &f.partial_multiplicities {
            match (m, is_zero) {
                (2, true) => blocks.push(zero_jordan_two()),
                _ if is_zero => blocks.push(imaginary(0.0)),
                _ if conj_partner => blocks.push(imaginary_real_pair(beta)),
                _ => blocks.push(imaginary(beta)),
            }
        }
    }
    for &s in &ks.infinite_block_sizes {
        blocks.push(infinite(s));
    }
    for &eps in &ks.right_minimal_indices {
        blocks.push(singular_pair(eps));
    }

    let collect = |f: fn(&Block) -> &Mat| block_diag(&blocks.iter().map(|b| f(b).clone()).collect::<Vec<_>>());
    DhPencil::new(
        collect(|b| &b.e),
        collect(|b| &b.j),
        collect(|b| &b.r),
        collect(|b| &b.q),
    )
}
