//! Products of two minimal orbits.
//!
//! For `Σ = Σ₁ ⊕ Σ₂` and minimal unit vectors `H₁`, `H₂` of the factors with
//! orbit dimensions `n₁`, `n₂`, the orbit of `H = cos θ H₁ + sin θ H₂` is
//! minimal exactly at `cos²θ = n₁/(n₁+n₂)` and biharmonic exactly at
//! `cos²θ ∈ {n₁/(n₁+n₂), 1/2}`.

use serde::{Deserialize, Serialize};

use crate::chamber::{Cell, CellPoint};
use crate::error::{Error, Result};
use crate::linalg;
use crate::orbitgeom::{self, classification_threshold, Classification, OrbitReport};
use crate::rootsys::{direct_sum, RootSystem};
use crate::scalar::{Rational, Real};
use crate::solver::{solve_minimal, SolverOptions};
use crate::Realized;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductAngles {
    pub n1: u64,
    pub n2: u64,
    /// `cos²θ` of the minimal product.
    pub minimal_cos2: Rational,
    /// All `cos²θ` giving a biharmonic product, ascending.
    pub biharmonic_cos2: Vec<Rational>,
    /// The proper biharmonic angle, absent when `n₁ = n₂`.
    pub proper_cos2: Option<Rational>,
}

/// Closed-form angles of the product construction.
pub fn product_angles(n1: u64, n2: u64) -> ProductAngles {
    assert!(n1 >= 1 && n2 >= 1, "orbit dimensions must be positive");
    let minimal = Rational::new(n1 as i64, (n1 + n2) as i64);
    let half = Rational::new(1, 2);
    let mut all = vec![minimal, half];
    all.sort();
    all.dedup();
    ProductAngles {
        n1,
        n2,
        minimal_cos2: minimal,
        biharmonic_cos2: all,
        proper_cos2: (n1 != n2).then_some(half),
    }
}

/// Left-hand side of the proportionality condition along the θ-arc in
/// factorized form, `(n₁ sin²θ - n₂ cos²θ)² (sin²θ - cos²θ) / (cos⁴θ sin⁴θ)`.
/// Along the arc `‖(τ_{2,H})_H‖ = cos θ sin θ |·|`.
pub fn factorized_condition(n1: f64, n2: f64, theta: f64) -> f64 {
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    (n1 * s2 - n2 * c2).powi(2) * (s2 - c2) / (c2 * c2 * s2 * s2)
}

/// A factor of the product: a root system, a cell and its minimal point.
#[derive(Debug, Clone)]
pub struct FactorSpec<T> {
    pub system: RootSystem,
    pub cell: Cell,
    pub point: Vec<T>,
    pub dim: u64,
}

impl<T: Real> FactorSpec<T> {
    /// Finds the minimal point of `cell` in `system`.
    pub fn minimal(system: &RootSystem, cell: &Cell, opts: &SolverOptions) -> Result<Self> {
        let rs: Realized<T> = system.realize();
        let res = solve_minimal(&rs, cell, opts)?;
        let p = res.points.first().ok_or_else(|| Error::SolveFailed {
            cell: format!("{} in {}", cell, system.label()),
            reason: format!("{:?} after {} start(s)", res.status, res.seeds_tried),
        })?;
        Ok(FactorSpec {
            system: system.clone(),
            cell: cell.clone(),
            point: p.report.point.h.clone(),
            dim: p.report.dim,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ProductSpec<T> {
    pub factor1: FactorSpec<T>,
    pub factor2: FactorSpec<T>,
    pub theta: T,
}

impl<T: Real> ProductSpec<T> {
    pub fn system(&self) -> RootSystem {
        direct_sum(&self.factor1.system, &self.factor2.system)
    }

    /// Cell `Δ₁ ∪ Δ₂` of the direct sum.
    pub fn cell(&self) -> Result<Cell> {
        let r1 = self.factor1.system.rank();
        let idx = self
            .factor1
            .cell
            .indices()
            .iter()
            .copied()
            .chain(self.factor2.cell.indices().iter().map(|&i| i + r1))
            .collect();
        Cell::new(idx, r1 + self.factor2.system.rank())
    }

    fn check(&self) -> Result<()> {
        let half_pi = T::lit(std::f64::consts::FRAC_PI_2);
        if !(self.theta > T::zero() && self.theta < half_pi) {
            return Err(Error::Product(format!(
                "theta = {} is outside (0, pi/2)",
                self.theta
            )));
        }
        for (k, f) in [&self.factor1, &self.factor2].into_iter().enumerate() {
            let rs: Realized<T> = f.system.realize();
            let p = CellPoint::from_vector(&rs, &f.point)?;
            if (linalg::norm(&f.point) - T::one()).abs() > T::lit(1e-12) {
                return Err(Error::Product(format!(
                    "factor {} point is not a unit vector",
                    k + 1
                )));
            }
            let rep = OrbitReport::evaluate(&rs, &p)?;
            if rep.tension_norm >= classification_threshold::<T>() {
                return Err(Error::Product(format!(
                    "factor {} point is not minimal (|tau| = {:e})",
                    k + 1,
                    rep.tension_norm
                )));
            }
            if rep.dim != f.dim {
                return Err(Error::Product(format!(
                    "factor {} dimension {} does not match its orbit dimension {}",
                    k + 1,
                    f.dim,
                    rep.dim
                )));
            }
        }
        Ok(())
    }
}

/// `H = cos θ H₁ + sin θ H₂` as a point of the direct sum.
pub fn build_product_point<T: Real>(
    sum: &Realized<T>,
    spec: &ProductSpec<T>,
) -> Result<CellPoint<T>> {
    spec.check()?;
    let mut h = linalg::scaled(&spec.factor1.point, spec.theta.cos());
    h.extend(linalg::scaled(&spec.factor2.point, spec.theta.sin()));
    let p = CellPoint::from_vector(sum, &h)?;
    let want = spec.cell()?;
    if p.cell != want {
        return Err(Error::Product(format!(
            "product point lies in {}, expected {want}",
            p.cell
        )));
    }
    Ok(p)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductCandidate {
    pub cos2: Rational,
    pub theta: f64,
    pub expected: Classification,
    pub report: OrbitReport<f64>,
    /// `‖H‖` restricted to each factor, i.e. the radii of the factor spheres.
    pub factor_radii: [f64; 2],
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductReport {
    pub factor1: String,
    pub factor2: String,
    pub angles: ProductAngles,
    pub candidates: Vec<ProductCandidate>,
    pub pass: bool,
}

impl ProductReport {
    pub fn verdict(&self) -> String {
        match self.angles.proper_cos2 {
            Some(c) => format!("proper biharmonic at cos^2(theta) = {c}"),
            None => "no proper point (equal factor dimensions)".to_string(),
        }
    }
}

/// End-to-end check of the product construction: solves the factor minimal
/// points, places `H` at each closed-form angle and evaluates the residuals
/// through [`orbitgeom`].
pub fn verify_product_theorem(
    rs1: &RootSystem,
    cell1: &Cell,
    rs2: &RootSystem,
    cell2: &Cell,
    opts: &SolverOptions,
) -> Result<ProductReport> {
    let f1 = FactorSpec::<f64>::minimal(rs1, cell1, opts)?;
    let f2 = FactorSpec::<f64>::minimal(rs2, cell2, opts)?;
    let angles = product_angles(f1.dim, f2.dim);
    let sum_system = direct_sum(rs1, rs2);
    let sum: Realized<f64> = sum_system.realize();
    let split = rs1.ambient_dim();
    let mut candidates = Vec::new();
    for &c2 in &angles.biharmonic_cos2 {
        let cos2 = *c2.numer() as f64 / *c2.denom() as f64;
        let theta = cos2.sqrt().acos();
        let spec = ProductSpec {
            factor1: f1.clone(),
            factor2: f2.clone(),
            theta,
        };
        let p = build_product_point(&sum, &spec)?;
        let report = OrbitReport::evaluate(&sum, &p)?;
        let expected = if c2 == angles.minimal_cos2 {
            Classification::Minimal
        } else {
            Classification::ProperBiharmonic
        };
        let radii = [linalg::norm(&p.h[..split]), linalg::norm(&p.h[split..])];
        candidates.push(ProductCandidate {
            ok: report.classification == expected,
            cos2: c2,
            theta,
            expected,
            report,
            factor_radii: radii,
        });
    }
    let pass = candidates.iter().all(|c| c.ok);
    Ok(ProductReport {
        factor1: format!("{} {}", rs1.label(), cell1),
        factor2: format!("{} {}", rs2.label(), cell2),
        angles,
        candidates,
        pass,
    })
}

/// `‖(τ_{2,H})_H‖` along the θ-arc of a product, evaluated through
/// [`orbitgeom`].
pub fn bitension_along_arc(
    sum: &Realized<f64>,
    f1: &FactorSpec<f64>,
    f2: &FactorSpec<f64>,
    theta: f64,
) -> Result<f64> {
    let spec = ProductSpec {
        factor1: f1.clone(),
        factor2: f2.clone(),
        theta,
    };
    let p = build_product_point(sum, &spec)?;
    Ok(linalg::norm(&orbitgeom::bitension(sum, &p)?))
}
