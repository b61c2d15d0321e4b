//! Small dense complex linear algebra on top of nalgebra.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Builds a matrix from a row-major slice.
pub fn from_row_major(rows: usize, cols: usize, data: &[Complex64]) -> CMatrix {
    CMatrix::from_row_slice(rows, cols, data)
}

/// Solves `a x = b` by LU with partial pivoting; `None` when singular.
pub fn solve(a: CMatrix, b: &CVector) -> Option<CVector> {
    let x = a.lu().solve(b)?;
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(x)
}

/// In-place LU solve of the row-major `n x n` system `a x = b`, overwriting
/// `b` with `x` and destroying `a`. Returns false on an exactly zero pivot or
/// a non-finite result. No allocation; used in the tracker's inner loop.
pub fn lu_solve_in_place(a: &mut [Complex64], n: usize, b: &mut [Complex64]) -> bool {
    debug_assert_eq!(a.len(), n * n);
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].norm_sqr();
        for r in k + 1..n {
            let v = a[r * n + k].norm_sqr();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return false;
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            b.swap(k, piv);
        }
        let inv = a[k * n + k].inv();
        for r in k + 1..n {
            let factor = a[r * n + k] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let u = a[k * n + j];
                a[r * n + j] -= factor * u;
            }
            let bk = b[k];
            b[r] -= factor * bk;
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in k + 1..n {
            acc -= a[k * n + j] * b[j];
        }
        b[k] = acc / a[k * n + k];
    }
    b.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Smallest over largest singular value, taken over `min(rows, cols)`
/// values. Zero for the zero matrix; one for an empty matrix.
pub fn singular_ratio(a: &CMatrix) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) if max > 0.0 => min / max,
        (Some(_), Some(_)) => 0.0,
        _ => 1.0,
    }
}

/// Numerical rank with relative threshold `rel_tol`.
pub fn rank(a: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(a);
    let Some(&max) = s.first() else { return 0 };
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * max).count()
}

/// Largest `|dz_i| / (1 + |z_i|)`; the componentwise relative step size.
pub fn relative_step(dz: &[Complex64], z: &[Complex64]) -> f64 {
    dz.iter()
        .zip(z)
        .map(|(d, x)| d.norm() / (1.0 + x.norm()))
        .fold(0.0, f64::max)
}

/// Lexicographic order on `(re, im)` pairs, read on a `1e-8` grid first so
/// that roundoff does not flip points sharing a coordinate (conjugate pairs,
/// say); exact values break the remaining ties.
pub fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    let grid = |v: f64| (v * 1e8).round();
    let coarse = a
        .iter()
        .zip(b)
        .map(|(x, y)| grid(x.re).total_cmp(&grid(y.re)).then(grid(x.im).total_cmp(&grid(y.im))))
        .find(|o| *o != Ordering::Equal);
    if let Some(o) = coarse {
        return o;
    }
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

pub fn max_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
