//! Pencil representations and the sign-convention adapters.
//!
//! Two conventions are in use. The posH theory writes pencils as
//! `λ·L + C` ([`Convention::Plus`]); the Kronecker machinery writes `λE − A`
//! ([`Convention::Minus`]). [`Pencil::to_plus`] and [`Pencil::to_minus`] are
//! the only places where a coefficient changes sign.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    hermitian_eigenvalues, hermitian_split, is_hermitian, is_skew_hermitian, sigma_min,
    spectral_norm, ComplexMatrix, Mat, C64, EPS,
};
use crate::qz;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `λ·lead + constant`
    Plus,
    /// `λ·lead − constant`
    Minus,
}

/// `P(λ) = λ·lead ± constant`, with the sign given by `convention`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    lead: ComplexMatrix,
    constant: ComplexMatrix,
    convention: Convention,
}

impl Pencil {
    pub fn new(lead: ComplexMatrix, constant: ComplexMatrix, convention: Convention) -> Result<Self> {
        if lead.shape() != constant.shape() {
            return Err(Error::Dimension(format!(
                "lead is {}x{} but constant is {}x{}",
                lead.rows(),
                lead.cols(),
                constant.rows(),
                constant.cols()
            )));
        }
        Ok(Self {
            lead,
            constant,
            convention,
        })
    }

    /// `λE − A` from raw matrices.
    pub fn minus(e: Mat, a: Mat) -> Result<Self> {
        Self::new(ComplexMatrix::new(e)?, ComplexMatrix::new(a)?, Convention::Minus)
    }

    /// `λL + C` from raw matrices.
    pub fn plus(l: Mat, cst: Mat) -> Result<Self> {
        Self::new(ComplexMatrix::new(l)?, ComplexMatrix::new(cst)?, Convention::Plus)
    }

    pub fn lead(&self) -> &ComplexMatrix {
        &self.lead
    }

    pub fn constant(&self) -> &ComplexMatrix {
        &self.constant
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn rows(&self) -> usize {
        self.lead.rows()
    }

    pub fn cols(&self) -> usize {
        self.lead.cols()
    }

    pub fn is_square(&self) -> bool {
        self.lead.is_square()
    }

    /// Same pencil written as `λL + C`.
    pub fn to_plus(&self) -> Pencil {
        match self.convention {
            Convention::Plus => self.clone(),
            Convention::Minus => Pencil {
                lead: self.lead.clone(),
                constant: negate(&self.constant),
                convention: Convention::Plus,
            },
        }
    }

    /// Same pencil written as `λE − A`.
    pub fn to_minus(&self) -> Pencil {
        match self.convention {
            Convention::Minus => self.clone(),
            Convention::Plus => Pencil {
                lead: self.lead.clone(),
                constant: negate(&self.constant),
                convention: Convention::Minus,
            },
        }
    }

    /// `(E, A)` of the `λE − A` form.
    pub fn minus_parts(&self) -> (Mat, Mat) {
        let m = self.to_minus();
        (m.lead.into_inner(), m.constant.into_inner())
    }

    /// `(L, C)` of the `λL + C` form.
    pub fn plus_parts(&self) -> (Mat, Mat) {
        let p = self.to_plus();
        (p.lead.into_inner(), p.constant.into_inner())
    }

    /// Reversal `rev(λE − A) = λA − E`, returned in the input's convention.
    pub fn reversal(&self) -> Pencil {
        let m = self.to_minus();
        let rev = Pencil {
            lead: m.constant,
            constant: m.lead,
            convention: Convention::Minus,
        };
        match self.convention {
            Convention::Minus => rev,
            Convention::Plus => rev.to_plus(),
        }
    }

    /// Conjugate transpose of both coefficients (same convention).
    pub fn adjoint(&self) -> Pencil {
        Pencil {
            lead: self.lead.adjoint(),
            constant: self.constant.adjoint(),
            convention: self.convention,
        }
    }

    /// `P(μ)` as a matrix.
    pub fn evaluate(&self, mu: C64) -> Mat {
        let (l, cst) = self.plus_parts();
        l * mu + cst
    }

    pub fn norms(&self) -> (f64, f64) {
        (spectral_norm(&self.lead), spectral_norm(&self.constant))
    }

    pub fn is_real(&self) -> bool {
        self.lead.is_real() && self.constant.is_real()
    }
}

fn negate(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::new(-m.as_mat().clone()).expect("negation keeps entries finite")
}

/// Default PSD tolerance `64·ε·λ_max(|H|)` for a Hermitian matrix `h`.
pub fn default_psd_tolerance(h: &Mat) -> f64 {
    64.0 * EPS * spectral_norm(h)
}

/// posH pencil `λ(J₁+R₁) + (J₂+R₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoshPencil {
    pub j1: ComplexMatrix,
    pub r1: ComplexMatrix,
    pub j2: ComplexMatrix,
    pub r2: ComplexMatrix,
    pub psd_tolerance: f64,
}

impl PoshPencil {
    /// Validates the four parts. `tol = None` selects the default PSD tolerance
    /// per coefficient.
    pub fn from_parts(j1: Mat, r1: Mat, j2: Mat, r2: Mat, tol: Option<f64>) -> Result<Self> {
        let n = j1.nrows();
        for (name, m) in [("J1", &j1), ("R1", &r1), ("J2", &j2), ("R2", &r2)] {
            if m.shape() != (n, n) {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        for (name, m) in [("J1", &j1), ("J2", &j2)] {
            if !is_skew_hermitian(m) {
                return Err(Error::Precondition(format!("{name} is not skew-Hermitian")));
            }
        }
        for (name, m) in [("R1", &r1), ("R2", &r2)] {
            if !is_hermitian(m) {
                return Err(Error::Precondition(format!("{name} is not Hermitian")));
            }
        }
        let t1 = check_psd("R1", &r1, tol)?;
        let t2 = check_psd("R2", &r2, tol)?;
        Ok(Self {
            j1: ComplexMatrix::new(j1)?,
            r1: ComplexMatrix::new(r1)?,
            j2: ComplexMatrix::new(j2)?,
            r2: ComplexMatrix::new(r2)?,
            psd_tolerance: t1.max(t2),
        })
    }

    pub fn n(&self) -> usize {
        self.j1.rows()
    }

    pub fn to_pencil(&self) -> Pencil {
        Pencil::plus(self.j1.as_mat() + self.r1.as_mat(), self.j2.as_mat() + self.r2.as_mat())
            .expect("parts have equal shapes")
    }

    pub fn is_real(&self) -> bool {
        self.j1.is_real() && self.r1.is_real() && self.j2.is_real() && self.r2.is_real()
    }

    /// `‖J₁‖ + ‖R₁‖ + ‖J₂‖ + ‖R₂‖`, the scale used by relative tolerances.
    pub fn scale(&self) -> f64 {
        self.j1.norm2() + self.r1.norm2() + self.j2.norm2() + self.r2.norm2()
    }

    /// `λJ₁ + J₂`.
    pub fn skew_pencil(&self) -> Pencil {
        Pencil::plus(self.j1.as_mat().clone(), self.j2.as_mat().clone()).expect("square parts")
    }
}

fn check_psd(name: &'static str, h: &Mat, tol: Option<f64>) -> Result<f64> {
    let tolerance = tol.unwrap_or_else(|| default_psd_tolerance(h));
    let lambda_min = hermitian_eigenvalues(h).first().copied().unwrap_or(0.0);
    if lambda_min < -tolerance {
        return Err(Error::NotPosh {
            coefficient: name,
            lambda_min,
            tolerance,
        });
    }
    Ok(tolerance)
}

/// Splits both coefficients of a square pencil and checks the Hermitian
/// parts for positive semidefiniteness.
pub fn validate_posh(p: &Pencil, tol: Option<f64>) -> Result<PoshPencil> {
    if !p.is_square() {
        return Err(Error::Dimension(format!(
            "posH pencils are square, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let plus = p.to_plus();
    let s1 = hermitian_split(plus.lead())?;
    let s2 = hermitian_split(plus.constant())?;
    let t1 = check_psd("R1", s1.herm.as_mat(), tol)?;
    let t2 = check_psd("R2", s2.herm.as_mat(), tol)?;
    Ok(PoshPencil {
        j1: s1.skew,
        r1: s1.herm,
        j2: s2.skew,
        r2: s2.herm,
        psd_tolerance: t1.max(t2),
    })
}

/// Dissipative Hamiltonian pencil `λE − (J − R)Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DhPencil {
    pub e: ComplexMatrix,
    pub j: ComplexMatrix,
    pub r: ComplexMatrix,
    pub q: ComplexMatrix,
}

/// Outcome of [`DhPencil::check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DhValidation {
    pub j_skew: bool,
    pub r_hermitian: bool,
    pub r_lambda_min: f64,
    pub qe_hermitian_defect: f64,
    pub qe_lambda_min: f64,
    pub valid: bool,
}

impl DhPencil {
    pub fn new(e: Mat, j: Mat, r: Mat, q: Mat) -> Result<Self> {
        let n = e.nrows();
        for (name, m) in [("E", &e), ("J", &j), ("R", &r), ("Q", &q)] {
            if m.shape() != (n, n) {
                return Err(Error::Dimension(format!("{name} must be {n}x{n}")));
            }
        }
        Ok(Self {
            e: ComplexMatrix::new(e)?,
            j: ComplexMatrix::new(j)?,
            r: ComplexMatrix::new(r)?,
            q: ComplexMatrix::new(q)?,
        })
    }

    pub fn n(&self) -> usize {
        self.e.rows()
    }

    /// `λE − (J − R)Q` in the minus convention.
    pub fn to_pencil(&self) -> Pencil {
        let a = (self.j.as_mat() - self.r.as_mat()) * self.q.as_mat();
        Pencil::minus(self.e.as_mat().clone(), a).expect("square parts")
    }

    /// Checks the structural invariants with relative tolerance `rel_tol`.
    pub fn check(&self, rel_tol: f64) -> DhValidation {
        let j_skew = is_skew_hermitian(self.j.as_mat());
        let r_hermitian = is_hermitian(self.r.as_mat());
        let r_lambda_min = hermitian_eigenvalues(self.r.as_mat()).first().copied().unwrap_or(0.0);
        let qe = self.q.adjoint().into_inner() * self.e.as_mat();
        let qe_norm = spectral_norm(&qe);
        let qe_hermitian_defect = spectral_norm(&(&qe - qe.adjoint()));
        let qe_lambda_min = hermitian_eigenvalues(&qe).first().copied().unwrap_or(0.0);
        let r_norm = self.r.norm2();
        let valid = j_skew
            && r_hermitian
            && r_lambda_min >= -rel_tol * r_norm
            && qe_hermitian_defect <= rel_tol * qe_norm.max(f64::MIN_POSITIVE)
            && qe_lambda_min >= -rel_tol * qe_norm;
        DhValidation {
            j_skew,
            r_hermitian,
            r_lambda_min,
            qe_hermitian_defect,
            qe_lambda_min,
            valid,
        }
    }
}

/// A generalized eigenvalue; the point at infinity is its own variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eigenvalue {
    Finite(C64),
    Infinite,
}

impl Eigenvalue {
    pub fn finite(self) -> Option<C64> {
        match self {
            Eigenvalue::Finite(z) => Some(z),
            Eigenvalue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Eigenvalue::Infinite)
    }
}

/// Result of the random-shift regularity probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityProbe {
    pub regular: bool,
    pub shifts: Vec<C64>,
    /// `σ_min(μE − A) / (|μ|‖E‖ + ‖A‖)` at each shift.
    pub relative_sigma_min: Vec<f64>,
    pub threshold: f64,
}

pub const PROBE_SHIFTS: usize = 3;
pub const PROBE_THRESHOLD: f64 = 1e-10;
const PROBE_SEED: u64 = 0x5e_ed0f_9ec1;

/// Decides regularity by testing `μE − A` for rank deficiency at three random
/// shifts drawn from a disk whose radius follows the coefficient norms.
pub fn regularity_probe(p: &Pencil) -> RegularityProbe {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let (e, a) = p.minus_parts();
    if !p.is_square() {
        return RegularityProbe {
            regular: false,
            shifts: Vec::new(),
            relative_sigma_min: Vec::new(),
            threshold: PROBE_THRESHOLD,
        };
    }
    if p.rows() == 0 {
        return RegularityProbe {
            regular: true,
            shifts: Vec::new(),
            relative_sigma_min: Vec::new(),
            threshold: PROBE_THRESHOLD,
        };
    }
    let ne = spectral_norm(&e);
    let na = spectral_norm(&a);
    let radius = if ne > 0.0 && na > 0.0 { na / ne } else { 1.0 };
    let mut shifts = Vec::with_capacity(PROBE_SHIFTS);
    let mut rel = Vec::with_capacity(PROBE_SHIFTS);
    for _ in 0..PROBE_SHIFTS {
        let r: f64 = rng.random::<f64>().sqrt();
        let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let mu = C64::from_polar(r * radius, theta);
        let m = &e * mu - &a;
        let denom = mu.norm() * ne + na;
        let s = sigma_min(&m);
        shifts.push(mu);
        rel.push(if denom > 0.0 { s / denom } else { 0.0 });
    }
    let regular = rel.iter().any(|&s| s > PROBE_THRESHOLD);
    RegularityProbe {
        regular,
        shifts,
        relative_sigma_min: rel,
        threshold: PROBE_THRESHOLD,
    }
}

/// All `n` generalized eigenvalues of a square regular pencil.
pub fn generalized_eigenvalues(p: &Pencil) -> Result<Vec<Eigenvalue>> {
    if !p.is_square() {
        return Err(Error::Dimension(format!(
            "generalized eigenvalues need a square pencil, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let probe = regularity_probe(p);
    if !probe.regular {
        return Err(Error::SingularPencil {
            probes: probe.shifts.len(),
        });
    }
    let (e, a) = p.minus_parts();
    qz::eigenvalues(&e, &a)
}

/// Finite eigenvalues only.
pub fn finite_eigenvalues(p: &Pencil) -> Result<Vec<C64>> {
    Ok(generalized_eigenvalues(p)?
        .into_iter()
        .filter_map(Eigenvalue::finite)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn real(rows: &[&[f64]]) -> Mat {
        ComplexMatrix::from_real_rows(rows).unwrap().into_inner()
    }

    fn unstable() -> Pencil {
        Pencil::plus(
            real(&[&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]),
            real(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, -1.0, 0.0]]),
        )
        .unwrap()
    }

    #[test]
    fn conventions_are_involutive() {
        let p = Pencil::minus(real(&[&[1.0, 2.0], &[3.0, 4.0]]), real(&[&[0.5, -1.0], &[2.0, 0.0]])).unwrap();
        assert_eq!(p.to_plus().to_minus(), p);
        let q = unstable();
        assert_eq!(q.to_minus().to_plus(), q);
    }

    #[test]
    fn reversal_scalar_and_involution() {
        let p = Pencil::minus(real(&[&[1.0]]), real(&[&[2.0]])).unwrap();
        let r = p.reversal();
        assert_eq!(r.lead()[(0, 0)], c(2.0, 0.0));
        assert_eq!(r.constant()[(0, 0)], c(1.0, 0.0));
        assert_eq!(unstable().reversal().reversal(), unstable());
    }

    #[test]
    fn validate_unstable_example() {
        let pp = validate_posh(&unstable(), None).unwrap();
        let d1 = real(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        let d2 = real(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert_eq!(*pp.r1.as_mat(), d1);
        assert_eq!(*pp.r2.as_mat(), d2);
    }

    #[test]
    fn validate_rejects_negative_lead() {
        let p = Pencil::plus(real(&[&[-1.0]]), real(&[&[0.0]])).unwrap();
        match validate_posh(&p, None) {
            Err(Error::NotPosh {
                coefficient,
                lambda_min,
                ..
            }) => {
                assert_eq!(coefficient, "R1");
                assert_eq!(lambda_min, -1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_identity_pencil() {
        let p = Pencil::plus(Mat::identity(3, 3), Mat::identity(3, 3)).unwrap();
        let pp = validate_posh(&p, None).unwrap();
        assert!(pp.j1.iter().all(|z| *z == c(0.0, 0.0)));
        assert!(pp.j2.iter().all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn eigenvalues_of_diagonal_and_infinite() {
        let p = Pencil::minus(Mat::identity(2, 2), real(&[&[-1.0, 0.0], &[0.0, -2.0]])).unwrap();
        let mut ev: Vec<f64> = finite_eigenvalues(&p).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        assert!((ev[0] + 2.0).abs() < 1e-14 && (ev[1] + 1.0).abs() < 1e-14);
        let inf = Pencil::plus(real(&[&[0.0]]), real(&[&[1.0]])).unwrap();
        assert_eq!(generalized_eigenvalues(&inf).unwrap(), vec![Eigenvalue::Infinite]);
    }

    #[test]
    fn singular_pencil_is_rejected() {
        let p = Pencil::minus(real(&[&[1.0, 0.0], &[0.0, 0.0]]), real(&[&[1.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert!(!regularity_probe(&p).regular);
        assert!(matches!(generalized_eigenvalues(&p), Err(Error::SingularPencil { .. })));
    }

    #[test]
    fn dimension_mismatch() {
        let r = Pencil::plus(Mat::identity(2, 2), Mat::identity(3, 3));
        assert!(matches!(r, Err(Error::Dimension(_))));
    }
}
