//! Tension, bitension and shape data of the orbit `Ad(K)H ⊂ S`, computed from
//! the restricted roots alone.
//!
//! With `n = dim Ad(K)H` and the sums running over `Σ⁺ \ Σ_H`:
//!
//! * `τ̃_H = -Σ m(λ) λ / <λ,H>`, and `<τ̃_H, H> = -n`;
//! * `(τ_H)_H = τ̃_H + n H` is the tension (mean curvature) vector in `S`;
//! * `(τ_{2,H})_H = 2n (τ_H)_H - Σ m(λ) <λ,τ̃_H>/<λ,H>² λ^T`, with
//!   `λ^T = λ - <λ,H> H`, vanishes exactly when the orbit is biharmonic.

use serde::{Deserialize, Serialize};

use crate::chamber::{point_from_coordinates, Cell, CellPoint};
use crate::error::{Error, Result};
use crate::linalg;
use crate::realized::Realized;
use crate::scalar::Real;

/// Threshold on `‖(τ_H)_H‖` and `‖(τ_{2,H})_H‖` used for classification.
pub fn classification_threshold<T: Real>() -> T {
    if std::mem::size_of::<T>() >= 8 {
        T::lit(1e-8)
    } else {
        T::lit(1e-3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Minimal,
    ProperBiharmonic,
    Neither,
}

impl Classification {
    pub fn from_norms<T: Real>(tension: T, bitension: T) -> Self {
        let t = classification_threshold::<T>();
        if tension < t {
            Classification::Minimal
        } else if bitension < t {
            Classification::ProperBiharmonic
        } else {
            Classification::Neither
        }
    }

    pub fn is_biharmonic(self) -> bool {
        !matches!(self, Classification::Neither)
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Minimal => "minimal",
            Classification::ProperBiharmonic => "proper_biharmonic",
            Classification::Neither => "neither",
        })
    }
}

/// Eigenvalue of the shape operator `A_{(τ_H)_H}` on the root space of one
/// positive root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeEigen<T> {
    pub root: usize,
    pub eigenvalue: T,
    pub multiplicity: u32,
}

/// Non-vanishing roots with their pairings, checked against the dead band.
struct Active<T> {
    idx: Vec<usize>,
    pairing: Vec<T>,
    dim: u64,
}

fn active_roots<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> Result<Active<T>> {
    let mut idx = Vec::new();
    let mut pairing = Vec::new();
    let mut dim = 0u64;
    for (i, r) in rs.roots().iter().enumerate() {
        if p.vanishing.binary_search(&i).is_ok() {
            continue;
        }
        let c = linalg::dot(r, &p.h);
        if c.abs() <= rs.tol_active() {
            return Err(Error::DeadBand {
                what: format!("positive root #{}", i + 1),
                pairing: c.to_f64_lossy(),
            });
        }
        idx.push(i);
        pairing.push(c);
        dim += rs.multiplicities()[i] as u64;
    }
    Ok(Active { idx, pairing, dim })
}

fn tilde_from<T: Real>(rs: &Realized<T>, a: &Active<T>) -> Vec<T> {
    let mut out = vec![T::zero(); rs.ambient_dim()];
    for (&i, &c) in a.idx.iter().zip(&a.pairing) {
        let m = T::lit(rs.multiplicities()[i] as f64);
        linalg::axpy(&mut out, -m / c, &rs.roots()[i]);
    }
    out
}

fn tangent_from<T: Real>(h: &[T], tilde: &[T], dim: u64) -> Vec<T> {
    let mut out = tilde.to_vec();
    linalg::axpy(&mut out, T::lit(dim as f64), h);
    out
}

/// `Σ m(λ) <λ,v>/<λ,H>² λ^T`
fn weighted_tangent_sum<T: Real>(rs: &Realized<T>, a: &Active<T>, h: &[T], v: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); rs.ambient_dim()];
    for (&i, &c) in a.idx.iter().zip(&a.pairing) {
        let lambda = &rs.roots()[i];
        let m = T::lit(rs.multiplicities()[i] as f64);
        let w = m * linalg::dot(lambda, v) / (c * c);
        linalg::axpy(&mut out, w, lambda);
        linalg::axpy(&mut out, -w * c, h);
    }
    out
}

/// `τ̃_H = -Σ_{λ ∈ Σ⁺ \ Σ_H} m(λ) λ / <λ,H>`
pub fn tension_tilde<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> Result<Vec<T>> {
    let a = active_roots(rs, p)?;
    Ok(tilde_from(rs, &a))
}

/// Tension vector `(τ_H)_H = τ̃_H + n H`; zero iff the orbit is minimal.
pub fn tension_tangent<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> Result<Vec<T>> {
    let a = active_roots(rs, p)?;
    Ok(tangent_from(&p.h, &tilde_from(rs, &a), a.dim))
}

/// Bitension residual `(τ_{2,H})_H`; zero iff the orbit is biharmonic.
pub fn bitension<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> Result<Vec<T>> {
    let a = active_roots(rs, p)?;
    let tilde = tilde_from(rs, &a);
    let tau = tangent_from(&p.h, &tilde, a.dim);
    Ok(bitension_from(rs, &a, &p.h, &tilde, &tau))
}

fn bitension_from<T: Real>(
    rs: &Realized<T>,
    a: &Active<T>,
    h: &[T],
    tilde: &[T],
    tau: &[T],
) -> Vec<T> {
    let mut out = linalg::scaled(tau, T::lit(2.0 * a.dim as f64));
    let s = weighted_tangent_sum(rs, a, h, tilde);
    linalg::axpy(&mut out, -T::one(), &s);
    out
}

/// Residual of the biharmonic equation written with `(τ_H)_H` on both sides:
/// `n (τ_H)_H - Σ m(λ) <λ,(τ_H)_H>/<λ,H>² λ^T`.
pub fn biheqn_residual<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> Result<Vec<T>> {
    let a = active_roots(rs, p)?;
    let tau = tangent_from(&p.h, &tilde_from(rs, &a), a.dim);
    let mut out = linalg::scaled(&tau, T::lit(a.dim as f64));
    let s = weighted_tangent_sum(rs, &a, &p.h, &tau);
    linalg::axpy(&mut out, -T::one(), &s);
    Ok(out)
}

/// Both residual vectors: `(biheqn form, bitension form)`.
///
/// Expanding `(τ_H)_H = τ̃_H + nH` in the first turns it into the second term
/// by term, so the two vectors coincide; they are computed along independent
/// paths and compared in tests.
pub fn residual_vectors<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> Result<(Vec<T>, Vec<T>)> {
    Ok((biheqn_residual(rs, p)?, bitension(rs, p)?))
}

/// Norms `(r1, r2)` of [`residual_vectors`].
pub fn biharmonic_residuals<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> Result<(T, T)> {
    let (a, b) = residual_vectors(rs, p)?;
    Ok((linalg::norm(&a), linalg::norm(&b)))
}

/// Eigenvalues `<λ,(τ_H)_H>/<λ,H>` of the shape operator along the tension
/// vector, one entry per non-vanishing positive root.
///
/// With this sign convention `Σ m(λ)·eigenvalue = -‖(τ_H)_H‖²`.
pub fn shape_spectrum<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> Result<Vec<ShapeEigen<T>>> {
    let a = active_roots(rs, p)?;
    let tau = tangent_from(&p.h, &tilde_from(rs, &a), a.dim);
    Ok(a.idx
        .iter()
        .zip(&a.pairing)
        .map(|(&i, &c)| ShapeEigen {
            root: i,
            eigenvalue: linalg::dot(&rs.roots()[i], &tau) / c,
            multiplicity: rs.multiplicities()[i],
        })
        .collect())
}

/// `F(H) = -Σ_{λ ∈ Σ⁺ \ Σ_H} m(λ) log <λ,H>` at a unit vector of the cell.
pub fn potential_at<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> Result<T> {
    let a = active_roots(rs, p)?;
    let mut f = T::zero();
    for (&i, &c) in a.idx.iter().zip(&a.pairing) {
        if c <= T::zero() {
            return Err(Error::OutsideChamber {
                simple_root: i,
                pairing: c.to_f64_lossy(),
            });
        }
        f = f - T::lit(rs.multiplicities()[i] as f64) * c.ln();
    }
    Ok(f)
}

/// Convex potential on `C^Δ ∩ S` whose spherical gradient is `(τ_H)_H`.
/// Returns `(F(H), grad F)` at `H = normalize(Σ x_i H_{α_i})`.
pub fn minimal_potential<T: Real>(rs: &Realized<T>, cell: &Cell, x: &[T]) -> Result<(T, Vec<T>)> {
    let p = point_from_coordinates(rs, cell, x)?;
    Ok((potential_at(rs, &p)?, tension_tangent(rs, &p)?))
}

/// Riemannian Hessian of the potential on the tangent vectors `basis`:
/// `<u, (Σ m λλᵀ/<λ,H>² + n) v>`.
pub fn potential_hessian<T: Real>(
    rs: &Realized<T>,
    p: &CellPoint<T>,
    basis: &[Vec<T>],
) -> Result<Vec<Vec<T>>> {
    let a = active_roots(rs, p)?;
    let n = T::lit(a.dim as f64);
    let proj: Vec<Vec<T>> = basis
        .iter()
        .map(|u| {
            a.idx
                .iter()
                .map(|&i| linalg::dot(&rs.roots()[i], u))
                .collect()
        })
        .collect();
    let k = basis.len();
    let mut out = vec![vec![T::zero(); k]; k];
    for r in 0..k {
        for s in 0..k {
            let mut v = n * linalg::dot(&basis[r], &basis[s]);
            for (j, (&i, &c)) in a.idx.iter().zip(&a.pairing).enumerate() {
                v = v + T::lit(rs.multiplicities()[i] as f64) * proj[r][j] * proj[s][j] / (c * c);
            }
            out[r][s] = v;
        }
    }
    Ok(out)
}

/// Everything known about one orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport<T> {
    pub point: CellPoint<T>,
    pub dim: u64,
    pub tau_tilde: Vec<T>,
    pub tau_tangent: Vec<T>,
    pub bitension: Vec<T>,
    pub biheqn_residual: Vec<T>,
    pub tension_norm: T,
    pub bitension_norm: T,
    pub shape_spectrum: Vec<ShapeEigen<T>>,
    pub factor_weights: Vec<T>,
    pub classification: Classification,
}

impl<T: Real> OrbitReport<T> {
    pub fn evaluate(rs: &Realized<T>, p: &CellPoint<T>) -> Result<Self> {
        let a = active_roots(rs, p)?;
        let tilde = tilde_from(rs, &a);
        let tau = tangent_from(&p.h, &tilde, a.dim);
        let bi = bitension_from(rs, &a, &p.h, &tilde, &tau);
        let r1 = biheqn_residual(rs, p)?;
        let tension_norm = linalg::norm(&tau);
        let bitension_norm = linalg::norm(&bi);
        Ok(OrbitReport {
            point: p.clone(),
            dim: a.dim,
            shape_spectrum: shape_spectrum(rs, p)?,
            factor_weights: rs.factor_weights(&p.h),
            classification: Classification::from_norms(tension_norm, bitension_norm),
            tau_tilde: tilde,
            tau_tangent: tau,
            bitension: bi,
            biheqn_residual: r1,
            tension_norm,
            bitension_norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chamber::orbit_dimension;
    use crate::rootsys::from_family_spec;

    fn product(n1: u32, n2: u32) -> Realized<f64> {
        from_family_spec("A1xA1", &[n1, n2]).unwrap().realize()
    }

    /// H = cos θ H₁ + sin θ H₂ with unit factor vectors.
    fn at_cos2(rs: &Realized<f64>, cos2: f64) -> CellPoint<f64> {
        let (c, s) = (cos2.sqrt(), (1.0 - cos2).sqrt());
        let r2 = 2f64.sqrt();
        point_from_coordinates(rs, &Cell::full(2), &[r2 * c, r2 * s]).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        linalg::norm(&linalg::sub(a, b)) < tol
    }

    #[test]
    fn a1_orbit_is_minimal() {
        let rs: Realized<f64> = from_family_spec("A1", &[1]).unwrap().realize();
        let p = point_from_coordinates(&rs, &Cell::full(1), &[1.0]).unwrap();
        let tilde = tension_tilde(&rs, &p).unwrap();
        assert!(close(&tilde, &linalg::scaled(&p.h, -1.0), 1e-15));
        assert!(linalg::norm(&tension_tangent(&rs, &p).unwrap()) < 1e-15);
        let (r1, r2) = biharmonic_residuals(&rs, &p).unwrap();
        assert!(r1 < 1e-15 && r2 < 1e-15);
        assert!(shape_spectrum(&rs, &p)
            .unwrap()
            .iter()
            .all(|e| e.eigenvalue.abs() < 1e-15));
    }

    #[test]
    fn product_tension_closed_form() {
        let rs = product(1, 2);
        let theta = 0.7f64;
        let p = at_cos2(&rs, theta.cos().powi(2));
        let s = 0.5f64.sqrt();
        let h1 = [s, -s, 0.0, 0.0];
        let h2 = [0.0, 0.0, s, -s];
        let mut expect = linalg::scaled(&h1, -1.0 / theta.cos());
        linalg::axpy(&mut expect, -2.0 / theta.sin(), &h2);
        assert!(close(&tension_tilde(&rs, &p).unwrap(), &expect, 1e-13));
    }

    #[test]
    fn product_at_minimal_angle() {
        let rs = product(1, 2);
        let p = at_cos2(&rs, 1.0 / 3.0);
        assert!(linalg::norm(&tension_tangent(&rs, &p).unwrap()) < 1e-14);
        assert!(linalg::norm(&bitension(&rs, &p).unwrap()) < 1e-13);
    }

    #[test]
    fn product_at_half_is_proper_biharmonic() {
        let rs = product(1, 2);
        let p = at_cos2(&rs, 0.5);
        let tau = tension_tangent(&rs, &p).unwrap();
        // (1/√2) H₁ - (1/√2) H₂
        assert!(close(&tau, &[0.5, -0.5, -0.5, 0.5], 1e-14));
        assert!((linalg::norm(&tau) - 1.0).abs() < 1e-14);
        assert!(linalg::norm(&bitension(&rs, &p).unwrap()) < 1e-13);
        let rep = OrbitReport::evaluate(&rs, &p).unwrap();
        assert_eq!(rep.classification, Classification::ProperBiharmonic);

        let spec = shape_spectrum(&rs, &p).unwrap();
        assert_eq!(spec.len(), 2);
        assert!((spec[0].eigenvalue - 1.0).abs() < 1e-14 && spec[0].multiplicity == 1);
        assert!((spec[1].eigenvalue + 1.0).abs() < 1e-14 && spec[1].multiplicity == 2);
    }

    #[test]
    fn product_off_solutions_is_not_biharmonic() {
        let rs = product(1, 2);
        let p = at_cos2(&rs, 0.4);
        assert!(linalg::norm(&bitension(&rs, &p).unwrap()) > 1e-3);
        let rep = OrbitReport::evaluate(&rs, &p).unwrap();
        assert_eq!(rep.classification, Classification::Neither);
    }

    #[test]
    fn trace_and_orthogonality_identities() {
        let rs: Realized<f64> = from_family_spec("G2", &[2, 3]).unwrap().realize();
        let p = point_from_coordinates(&rs, &Cell::full(2), &[0.37, 1.4]).unwrap();
        let rep = OrbitReport::evaluate(&rs, &p).unwrap();
        let n = orbit_dimension(&rs, &p) as f64;
        assert_eq!(rep.dim, 15);
        assert!((linalg::dot(&rep.tau_tilde, &p.h) + n).abs() < 1e-12);
        assert!(linalg::dot(&rep.tau_tangent, &p.h).abs() < 1e-12);
        assert!(linalg::dot(&rep.bitension, &p.h).abs() < 1e-11);
        let trace: f64 = rep
            .shape_spectrum
            .iter()
            .map(|e| e.multiplicity as f64 * e.eigenvalue)
            .sum();
        assert!((trace + rep.tension_norm.powi(2)).abs() < 1e-11 * (1.0 + trace.abs()));
        assert!(close(
            &rep.biheqn_residual,
            &rep.bitension,
            1e-11 * linalg::norm(&rep.bitension)
        ));
    }

    #[test]
    fn dead_band_root_is_rejected() {
        let rs: Realized<f64> = from_family_spec("A2", &[1]).unwrap().realize();
        // H almost on the α2 wall but with the wall root marked active
        let h = linalg::normalized(&[2.0, -1.0 + 1e-8, -1.0 - 1e-8]).unwrap();
        let p = CellPoint {
            h,
            cell: Cell::full(2),
            vanishing: vec![],
        };
        assert!(matches!(
            tension_tilde(&rs, &p),
            Err(Error::DeadBand { .. })
        ));
    }

    #[test]
    fn potential_minimum_for_a1() {
        let rs: Realized<f64> = from_family_spec("A1", &[1]).unwrap().realize();
        let (f, g) = minimal_potential(&rs, &Cell::full(1), &[3.0]).unwrap();
        // <λ,H> = √2 at H = λ/‖λ‖
        assert!((f + 2f64.sqrt().ln()).abs() < 1e-15);
        assert!(linalg::norm(&g) < 1e-15);
        assert!(minimal_potential(&rs, &Cell::full(1), &[-1.0]).is_err());
    }

    #[test]
    fn f32_instantiation_agrees_with_f64() {
        let rs = from_family_spec("B2", &[1, 2]).unwrap();
        let r64: Realized<f64> = rs.realize();
        let r32: Realized<f32> = rs.realize();
        let p64 = point_from_coordinates(&r64, &Cell::full(2), &[0.6, 0.9]).unwrap();
        let p32 = point_from_coordinates(&r32, &Cell::full(2), &[0.6f32, 0.9]).unwrap();
        let a = OrbitReport::evaluate(&r64, &p64).unwrap();
        let b = OrbitReport::evaluate(&r32, &p32).unwrap();
        assert_eq!(a.dim, b.dim);
        assert!((a.bitension_norm - b.bitension_norm as f64).abs() < 1e-3 * a.bitension_norm);
    }
}
