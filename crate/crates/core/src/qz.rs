//! Complex QZ iteration for `λE − A`.
//!
//! Reduction: QR of `E`, Hessenberg-triangular form by Givens rotations, then
//! implicit single-shift sweeps with Wilkinson-type shifts taken from the
//! trailing 2×2 pencil. Zero diagonal entries of the triangular factor are
//! chased to the bottom of the active window and deflated as infinite
//! eigenvalues. Only eigenvalues are produced; the unitary factors are not
//! accumulated.

use crate::error::{Error, Result};
use crate::matrix::{c, Mat, C64, EPS};
use crate::pencil::Eigenvalue;

#[derive(Debug, Clone, Copy)]
struct Rot {
    c: f64,
    s: C64,
}

impl Rot {
    /// Rotation with `[c s; -s̄ c]·[f; g] = [r; 0]`.
    fn zeroing(f: C64, g: C64) -> Rot {
        let fa = f.norm();
        let ga = g.norm();
        if ga == 0.0 {
            return Rot { c: 1.0, s: c(0.0, 0.0) };
        }
        if fa == 0.0 {
            return Rot { c: 0.0, s: c(1.0, 0.0) };
        }
        let n = fa.hypot(ga);
        Rot {
            c: fa / n,
            s: (f / fa) * g.conj() / n,
        }
    }

    /// Left-multiplies rows `p`, `q` over columns `cols`.
    fn rows(&self, m: &mut Mat, p: usize, q: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let x = m[(p, j)];
            let y = m[(q, j)];
            m[(p, j)] = x * self.c + self.s * y;
            m[(q, j)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Right-multiplies columns `p`, `q` over rows `rows` by
    /// `[c s̄; -s c]`.
    fn cols(&self, m: &mut Mat, p: usize, q: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let x = m[(i, p)];
            let y = m[(i, q)];
            m[(i, p)] = x * self.c - self.s * y;
            m[(i, q)] = self.s.conj() * x + y * self.c;
        }
    }

    /// Column rotation that annihilates `x_p` in the row vector `[x_p, x_q]`.
    fn zeroing_row(xp: C64, xq: C64) -> Rot {
        Rot::zeroing(xq.conj(), xp.conj())
    }
}

fn frob(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Generalized eigenvalues of `λE − A` (square, assumed regular).
pub fn eigenvalues(e: &Mat, a: &Mat) -> Result<Vec<Eigenvalue>> {
    let n = e.nrows();
    if e.shape() != a.shape() || e.ncols() != n {
        return Err(Error::Dimension("QZ needs square coefficients of equal size".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let ne = frob(e);
    let na = frob(a);
    if ne == 0.0 {
        return Ok(vec![Eigenvalue::Infinite; n]);
    }
    // Normalize both coefficients; eigenvalues scale back by na/ne.
    let (sa, se) = (if na > 0.0 { na } else { 1.0 }, ne);
    let mut h = a / c(sa, 0.0);
    let mut t = e / c(se, 0.0);
    let back = sa / se;

    // T ← Qᴴ T upper triangular, H ← Qᴴ H.
    let qr = t.clone().qr();
    let q = qr.q();
    t = qr.r();
    h = q.adjoint() * h;
    for j in 0..n {
        for i in (j + 1)..n {
            t[(i, j)] = c(0.0, 0.0);
        }
    }

    hessenberg_triangular(&mut h, &mut t);
    let raw = qz_iterate(&mut h, &mut t)?;
    Ok(raw
        .into_iter()
        .map(|ev| match ev {
            Eigenvalue::Finite(z) => Eigenvalue::Finite(z * back),
            Eigenvalue::Infinite => Eigenvalue::Infinite,
        })
        .collect())
}

fn hessenberg_triangular(h: &mut Mat, t: &mut Mat) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    for j in 0..(n - 2) {
        for i in ((j + 2)..n).rev() {
            let g = Rot::zeroing(h[(i - 1, j)], h[(i, j)]);
            g.rows(h, i - 1, i, j..n);
            g.rows(t, i - 1, i, (i - 1)..n);
            h[(i, j)] = c(0.0, 0.0);
            let z = Rot::zeroing_row(t[(i, i - 1)], t[(i, i)]);
            z.cols(t, i - 1, i, 0..(i + 1));
            z.cols(h, i - 1, i, 0..n);
            t[(i, i - 1)] = c(0.0, 0.0);
        }
    }
}

fn qz_iterate(h: &mut Mat, t: &mut Mat) -> Result<Vec<Eigenvalue>> {
    let n = h.nrows();
    let hnorm = frob(h);
    let tnorm = frob(t);
    let atol = EPS * hnorm;
    let btol = EPS * tnorm;
    let mut out: Vec<Option<Eigenvalue>> = vec![None; n];
    let max_iter = 60 * n.max(1);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut ihi = n - 1;

    loop {
        if ihi == 0 {
            out[0] = Some(one_by_one(h[(0, 0)], t[(0, 0)], btol));
            break;
        }
        // Locate the top of the active window.
        let mut ilo = 0;
        for k in (1..=ihi).rev() {
            let sub = h[(k, k - 1)].norm();
            if sub <= atol || sub <= EPS * (h[(k, k)].norm() + h[(k - 1, k - 1)].norm()) {
                h[(k, k - 1)] = c(0.0, 0.0);
                ilo = k;
                break;
            }
        }
        if ilo == ihi {
            out[ihi] = Some(one_by_one(h[(ihi, ihi)], t[(ihi, ihi)], btol));
            ihi -= 1;
            since_deflation = 0;
            continue;
        }
        // Zero on the diagonal of T inside the window: an infinite eigenvalue.
        if let Some(k) = (ilo..=ihi).find(|&k| t[(k, k)].norm() <= btol) {
            t[(k, k)] = c(0.0, 0.0);
            chase_infinite(h, t, ilo, k, ihi);
            out[ihi] = Some(Eigenvalue::Infinite);
            ihi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > max_iter {
            return Err(Error::Internal(format!(
                "QZ iteration did not converge after {max_iter} sweeps"
            )));
        }
        let shift = if since_deflation % 11 == 10 {
            exceptional_shift(h, t, ihi, since_deflation)
        } else {
            wilkinson_shift(h, t, ihi)
        };
        sweep(h, t, ilo, ihi, shift);
    }
    out.into_iter()
        .map(|e| e.ok_or_else(|| Error::Internal("QZ left an eigenvalue unassigned".into())))
        .collect()
}

fn one_by_one(hv: C64, tv: C64, btol: f64) -> Eigenvalue {
    if tv.norm() <= btol {
        Eigenvalue::Infinite
    } else {
        Eigenvalue::Finite(hv / tv)
    }
}

/// Moves the zero at `t[k][k]` down to `t[ihi][ihi]` and splits off the
/// trailing 1×1 block.
fn chase_infinite(h: &mut Mat, t: &mut Mat, ilo: usize, k: usize, ihi: usize) {
    let n = h.nrows();
    for j in k..ihi {
        let g = Rot::zeroing(t[(j, j + 1)], t[(j + 1, j + 1)]);
        g.rows(t, j, j + 1, j..n);
        g.rows(h, j, j + 1, j.saturating_sub(1)..n);
        t[(j + 1, j + 1)] = c(0.0, 0.0);
        if j > ilo {
            let z = Rot::zeroing_row(h[(j + 1, j - 1)], h[(j + 1, j)]);
            z.cols(h, j - 1, j, 0..n);
            z.cols(t, j - 1, j, 0..n);
            h[(j + 1, j - 1)] = c(0.0, 0.0);
        }
    }
    let z = Rot::zeroing_row(h[(ihi, ihi - 1)], h[(ihi, ihi)]);
    z.cols(h, ihi - 1, ihi, 0..n);
    z.cols(t, ihi - 1, ihi, 0..n);
    h[(ihi, ihi - 1)] = c(0.0, 0.0);
    t[(ihi, ihi - 1)] = c(0.0, 0.0);
}

/// Eigenvalue of the trailing 2×2 pencil closest to the last diagonal ratio.
fn wilkinson_shift(h: &Mat, t: &Mat, ihi: usize) -> C64 {
    let k = ihi - 1;
    let (h11, h12, h21, h22) = (h[(k, k)], h[(k, ihi)], h[(ihi, k)], h[(ihi, ihi)]);
    let (t11, t12, t22) = (t[(k, k)], t[(k, ihi)], t[(ihi, ihi)]);
    let qa = t11 * t22;
    let qb = -(h11 * t22 + h22 * t11 - t12 * h21);
    let qc = h11 * h22 - h12 * h21;
    let target = h22 / t22;
    let disc = (qb * qb - qa * qc * 4.0).sqrt();
    let d1 = -qb + disc;
    let d2 = -qb - disc;
    let denom = if d1.norm() >= d2.norm() { d1 } else { d2 };
    if denom.norm() == 0.0 || qa.norm() == 0.0 {
        return target;
    }
    let r1 = denom / (qa * 2.0);
    let r2 = (qc * 2.0) / denom;
    if (r1 - target).norm() <= (r2 - target).norm() {
        r1
    } else {
        r2
    }
}

fn exceptional_shift(h: &Mat, t: &Mat, ihi: usize, salt: usize) -> C64 {
    let base = h[(ihi, ihi)] / t[(ihi, ihi)];
    let mag = h[(ihi, ihi - 1)].norm() / t[(ihi - 1, ihi - 1)].norm().max(EPS);
    base + C64::from_polar(mag.max(EPS) * 1.5, 0.7 + salt as f64)
}

fn sweep(h: &mut Mat, t: &mut Mat, ilo: usize, ihi: usize, shift: C64) {
    let n = h.nrows();
    let f = h[(ilo, ilo)] - shift * t[(ilo, ilo)];
    let g = h[(ilo + 1, ilo)];
    let rot = Rot::zeroing(f, g);
    rot.rows(h, ilo, ilo + 1, ilo..n);
    rot.rows(t, ilo, ilo + 1, ilo..n);
    for k in ilo..ihi {
        if k > ilo {
            let g = Rot::zeroing(h[(k, k - 1)], h[(k + 1, k - 1)]);
            g.rows(h, k, k + 1, (k - 1)..n);
            g.rows(t, k, k + 1, k..n);
            h[(k + 1, k - 1)] = c(0.0, 0.0);
        }
        let z = Rot::zeroing_row(t[(k + 1, k)], t[(k + 1, k + 1)]);
        let top = (k + 3).min(ihi + 1).max(k + 2);
        z.cols(h, k, k + 1, 0..top.min(n));
        z.cols(t, k, k + 1, 0..(k + 2));
        t[(k + 1, k)] = c(0.0, 0.0);
    }
}
