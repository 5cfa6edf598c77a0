//! Small dense linear algebra on `Vec`-backed vectors.
//!
//! Dimensions here never exceed the ambient dimension of a root system
//! (at most a few dozen), so plain Gaussian elimination is used throughout.
//! The elimination routines are generic over any signed ordered field, which
//! covers both [`Rational`](crate::Rational) and the float types.

use num_traits::{Num, Signed};

use crate::scalar::Real;

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn scaled<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// `y += s * x`
pub fn axpy<T: Real>(y: &mut [T], s: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + s * xi;
    }
}

/// Returns `None` for the zero vector.
pub fn normalized<T: Real>(a: &[T]) -> Option<Vec<T>> {
    let n = norm(a);
    if n > T::zero() && n.is_finite() {
        Some(scaled(a, T::one() / n))
    } else {
        None
    }
}

/// Geodesic distance between two unit vectors, via the chord length so that
/// nearby points keep full precision.
pub fn geodesic_distance<T: Real>(a: &[T], b: &[T]) -> T {
    let chord = norm(&sub(a, b));
    let half = (chord / T::lit(2.0)).min(T::one());
    T::lit(2.0) * half.asin()
}

/// Orthonormalizes `vectors` against each other and against the unit vectors
/// in `against`; vectors that become numerically dependent are dropped.
pub fn orthonormal_complement<T: Real>(vectors: &[Vec<T>], against: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let scale = norm(v);
        let mut w = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in against.iter().chain(basis.iter()) {
                let c = dot(&w, u);
                axpy(&mut w, -c, u);
            }
        }
        let n = norm(&w);
        if n > scale * T::lit(1e-10) {
            basis.push(scaled(&w, T::one() / n));
        }
    }
    basis
}

fn abs_of<F: Signed>(x: &F) -> F {
    x.abs()
}

/// Solves `a * X = b` for square `a` (row-major) with partial pivoting.
/// `b` holds one right-hand side per column. Returns `None` when `a` is
/// singular (an exact zero pivot).
pub fn solve<F>(a: &[Vec<F>], b: &[Vec<F>]) -> Option<Vec<Vec<F>>>
where
    F: Num + Signed + PartialOrd + Clone,
{
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| row.iter().chain(rhs.iter()).cloned().collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            abs_of(&aug[i][col])
                .partial_cmp(&abs_of(&aug[j][col]))
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if aug[pivot][col].is_zero() {
            return None;
        }
        aug.swap(col, pivot);
        let p = aug[col][col].clone();
        for k in col..n + m {
            aug[col][k] = aug[col][k].clone() / p.clone();
        }
        for i in 0..n {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for k in col..n + m {
                    let v = aug[col][k].clone() * f.clone();
                    aug[i][k] = aug[i][k].clone() - v;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Exact rank of a set of row vectors.
pub fn rank<F>(rows: &[Vec<F>]) -> usize
where
    F: Num + Signed + PartialOrd + Clone,
{
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if !m[i][col].is_zero() {
                let f = m[i][col].clone() / m[r][col].clone();
                for k in col..cols {
                    let v = m[r][k].clone() * f.clone();
                    m[i][k] = m[i][k].clone() - v;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Least-squares step `argmin |r + J d|` from the normal equations, with a
/// tiny Levenberg shift when `J^T J` is singular. `jac` is column-major: one
/// ambient vector per unknown.
pub fn least_squares_step<T: Real>(jac: &[Vec<T>], residual: &[T]) -> Option<Vec<T>> {
    let k = jac.len();
    let mut normal: Vec<Vec<T>> = (0..k)
        .map(|i| (0..k).map(|j| dot(&jac[i], &jac[j])).collect())
        .collect();
    let rhs: Vec<Vec<T>> = (0..k).map(|i| vec![-dot(&jac[i], residual)]).collect();
    if let Some(x) = solve(&normal, &rhs) {
        if x.iter().all(|r| r[0].is_finite()) {
            return Some(x.into_iter().map(|r| r[0]).collect());
        }
    }
    let trace: T = (0..k).map(|i| normal[i][i]).sum();
    let shift = (trace * T::lit(1e-12)).max(T::min_positive_value());
    for (i, row) in normal.iter_mut().enumerate() {
        row[i] = row[i] + shift;
    }
    solve(&normal, &rhs).map(|x| x.into_iter().map(|r| r[0]).collect())
}
