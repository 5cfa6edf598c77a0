use num_traits::Zero;

use crate::linalg;
use crate::rootsys::{Factor, RootSystem};
use crate::scalar::Real;

/// A root system converted to floating point, ready for geometry.
///
/// Besides the float coordinates this keeps, for each positive root, the set
/// of simple roots it involves. A root vanishes on the cell `C^Δ` exactly when
/// that set misses `Δ`, which gives cell-wise vanishing sets without any
/// tolerance.
#[derive(Debug, Clone)]
pub struct Realized<T> {
    label: String,
    ambient_dim: usize,
    rank: usize,
    roots: Vec<Vec<T>>,
    multiplicities: Vec<u32>,
    simple: Vec<Vec<T>>,
    dual: Vec<Vec<T>>,
    support: Vec<Vec<bool>>,
    factors: Vec<Factor>,
    tol_vanish: T,
    tol_active: T,
}

impl<T: Real> Realized<T> {
    pub fn new(rs: &RootSystem) -> Self {
        let roots: Vec<Vec<T>> = rs
            .positive_roots()
            .iter()
            .map(|p| p.root.to_real())
            .collect();
        let support = (0..roots.len())
            .map(|i| rs.coefficients(i).iter().map(|c| !c.is_zero()).collect())
            .collect();
        let mut out = Realized {
            label: rs.label().to_string(),
            ambient_dim: rs.ambient_dim(),
            rank: rs.rank(),
            multiplicities: rs.positive_roots().iter().map(|p| p.multiplicity).collect(),
            simple: rs.simple_roots().iter().map(|a| a.to_real()).collect(),
            dual: rs
                .dual_basis()
                .iter()
                .map(|h| h.iter().map(T::from_rational).collect())
                .collect(),
            support,
            factors: rs.factors().to_vec(),
            roots,
            tol_vanish: T::zero(),
            tol_active: T::zero(),
        };
        out.reset_tolerances();
        out
    }

    fn reset_tolerances(&mut self) {
        let scale = self
            .roots
            .iter()
            .chain(self.simple.iter())
            .map(|r| linalg::norm(r))
            .fold(T::zero(), T::max);
        let (v, a) = T::chamber_tolerances();
        self.tol_vanish = T::lit(v) * scale;
        self.tol_active = T::lit(a) * scale;
    }

    /// Copy with positive root `i` replaced by `scales[i] * λ_i`; simple roots
    /// are scaled along with the positive roots they coincide with.
    pub fn rescaled(&self, scales: &[T]) -> Self {
        assert_eq!(scales.len(), self.roots.len());
        let mut out = self.clone();
        for (j, a) in self.simple.iter().enumerate() {
            if let Some(i) = self.roots.iter().position(|r| r == a) {
                out.simple[j] = linalg::scaled(a, scales[i]);
                out.dual[j] = linalg::scaled(&self.dual[j], T::one() / scales[i]);
            }
        }
        for (r, &s) in out.roots.iter_mut().zip(scales) {
            *r = linalg::scaled(r, s);
        }
        out.reset_tolerances();
        out
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn roots(&self) -> &[Vec<T>] {
        &self.roots
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    pub fn simple_roots(&self) -> &[Vec<T>] {
        &self.simple
    }

    pub fn dual_basis(&self) -> &[Vec<T>] {
        &self.dual
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Pairings below this magnitude count as zero.
    pub fn tol_vanish(&self) -> T {
        self.tol_vanish
    }

    /// Pairings above this magnitude count as strictly positive.
    pub fn tol_active(&self) -> T {
        self.tol_active
    }

    /// Whether positive root `root` involves simple root `simple`.
    pub fn involves(&self, root: usize, simple: usize) -> bool {
        self.support[root][simple]
    }

    /// Squared norm of the projection of `h` onto each irreducible factor.
    pub fn factor_weights(&self, h: &[T]) -> Vec<T> {
        self.factors
            .iter()
            .map(|f| h[f.coords.clone()].iter().map(|&x| x * x).sum())
            .collect()
    }
}
