//! Cells `C^Δ` of the closed fundamental chamber and points on the unit
//! sphere inside them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::realized::Realized;
use crate::scalar::Real;

/// A nonempty set of simple-root indices (0-based, sorted).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cell(Vec<usize>);

impl Cell {
    pub fn new(mut indices: Vec<usize>, rank: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::InvalidCell(
                "empty cell (C^Ø does not meet the sphere)".into(),
            ));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= rank) {
            return Err(Error::InvalidCell(format!(
                "simple root index {} exceeds rank {rank}",
                bad + 1
            )));
        }
        Ok(Cell(indices))
    }

    /// The open chamber: every simple root active.
    pub fn full(rank: usize) -> Self {
        Cell((0..rank).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Dimension of `C^Δ ∩ S`.
    pub fn sphere_dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Parses `1,3` (1-based) or `full`.
    pub fn parse(s: &str, rank: usize) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("full") {
            return Ok(Cell::full(rank));
        }
        let s = s.trim_start_matches('{').trim_end_matches('}');
        let idx = s
            .split(',')
            .map(|t| {
                t.trim()
                    .trim_start_matches(['a', 'α'])
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1)
                    .map(|i| i - 1)
                    .ok_or_else(|| Error::InvalidCell(format!("cannot parse '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Cell::new(idx, rank)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "a{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// All nonempty subsets of the simple roots, by size and then lexicographically.
pub fn cells(rank: usize) -> Vec<Cell> {
    let mut out: Vec<Cell> = (1u64..(1u64 << rank))
        .map(|mask| Cell((0..rank).filter(|&i| mask & (1 << i) != 0).collect()))
        .collect();
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    out
}

/// A unit vector `H` in `C^Δ ∩ S` with its vanishing set `Σ_H ∩ Σ⁺`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellPoint<T> {
    pub h: Vec<T>,
    pub cell: Cell,
    pub vanishing: Vec<usize>,
}

impl<T: Real> CellPoint<T> {
    /// Coordinates `x_i = <α_i, H>` in the dual basis.
    pub fn dual_coordinates(&self, rs: &Realized<T>) -> Vec<T> {
        rs.simple_roots()
            .iter()
            .map(|a| linalg::dot(a, &self.h))
            .collect()
    }

    /// Locates an arbitrary vector of the chamber: normalizes it and computes
    /// its cell and vanishing set.
    pub fn from_vector(rs: &Realized<T>, v: &[T]) -> Result<Self> {
        if v.len() != rs.ambient_dim() {
            return Err(Error::BadPoint(format!(
                "expected {} coordinates, got {}",
                rs.ambient_dim(),
                v.len()
            )));
        }
        let h = linalg::normalized(v).ok_or_else(|| Error::BadPoint("zero vector".into()))?;
        // component outside span(Π)
        let mut proj = vec![T::zero(); h.len()];
        for (a, hd) in rs.simple_roots().iter().zip(rs.dual_basis()) {
            linalg::axpy(&mut proj, linalg::dot(a, &h), hd);
        }
        let off = linalg::norm(&linalg::sub(&h, &proj));
        if off > T::lit(1e-9) {
            return Err(Error::BadPoint(format!(
                "vector has a component of norm {off:e} outside the span of the simple roots"
            )));
        }
        let (cell, vanishing) = vanishing_roots(rs, &h)?;
        Ok(CellPoint { h, cell, vanishing })
    }
}

/// Normalizes `Σ_{i∈Δ} x_i H_{α_i}` to the sphere.
pub fn point_from_coordinates<T: Real>(
    rs: &Realized<T>,
    cell: &Cell,
    x: &[T],
) -> Result<CellPoint<T>> {
    if x.len() != cell.len() {
        return Err(Error::InvalidCell(format!(
            "cell {cell} needs {} coordinates, got {}",
            cell.len(),
            x.len()
        )));
    }
    for (k, &xi) in x.iter().enumerate() {
        if !(xi > T::zero()) || !xi.is_finite() {
            return Err(Error::NonPositiveCoordinate {
                index: k,
                value: xi.to_f64_lossy(),
            });
        }
    }
    let mut v = vec![T::zero(); rs.ambient_dim()];
    for (&i, &xi) in cell.indices().iter().zip(x) {
        linalg::axpy(&mut v, xi, &rs.dual_basis()[i]);
    }
    let h = linalg::normalized(&v).expect("positive combination of a basis is nonzero");
    let (found, vanishing) = vanishing_roots(rs, &h)?;
    if found != *cell {
        return Err(Error::InvalidCell(format!(
            "coordinates place H in cell {found}, not the requested {cell}"
        )));
    }
    Ok(CellPoint {
        h,
        cell: cell.clone(),
        vanishing,
    })
}

/// Cell `Δ(H)` and the indices of positive roots vanishing on `H`.
///
/// Simple-root pairings must be clearly zero (`<= tol_vanish`) or clearly
/// positive (`> tol_active`); anything in between is rejected.
pub fn vanishing_roots<T: Real>(rs: &Realized<T>, h: &[T]) -> Result<(Cell, Vec<usize>)> {
    let mut active = Vec::new();
    for (i, a) in rs.simple_roots().iter().enumerate() {
        let p = linalg::dot(a, h);
        if p < -rs.tol_vanish() {
            return Err(Error::OutsideChamber {
                simple_root: i,
                pairing: p.to_f64_lossy(),
            });
        }
        if p > rs.tol_active() {
            active.push(i);
        } else if p > rs.tol_vanish() {
            return Err(Error::DeadBand {
                what: format!("alpha_{}", i + 1),
                pairing: p.to_f64_lossy(),
            });
        }
    }
    let cell = Cell::new(active, rs.rank())
        .map_err(|_| Error::BadPoint("H pairs to zero with every simple root".into()))?;
    let vanishing = rs
        .roots()
        .iter()
        .enumerate()
        .filter(|(_, r)| linalg::dot(r, h).abs() <= rs.tol_vanish())
        .map(|(i, _)| i)
        .collect();
    Ok((cell, vanishing))
}

/// Positive roots vanishing identically on the cell.
pub fn cell_vanishing<T: Real>(rs: &Realized<T>, cell: &Cell) -> Vec<usize> {
    (0..rs.roots().len())
        .filter(|&i| !cell.indices().iter().any(|&s| rs.involves(i, s)))
        .collect()
}

/// `dim Ad(K)H = Σ_{λ ∈ Σ⁺ \ Σ_H} m(λ)`.
pub fn orbit_dimension<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> u64 {
    rs.multiplicities()
        .iter()
        .enumerate()
        .filter(|(i, _)| p.vanishing.binary_search(i).is_err())
        .map(|(_, &m)| m as u64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::from_family_spec;

    fn a2() -> Realized<f64> {
        from_family_spec("A2", &[1]).unwrap().realize()
    }

    #[test]
    fn cell_enumeration_order() {
        assert_eq!(cells(1), vec![Cell(vec![0])]);
        assert_eq!(
            cells(2),
            vec![Cell(vec![0]), Cell(vec![1]), Cell(vec![0, 1])]
        );
        for r in 1..=8 {
            assert_eq!(cells(r).len(), (1 << r) - 1);
        }
        let c3 = cells(3);
        assert_eq!(c3[3], Cell(vec![0, 1]));
        assert_eq!(c3[6], Cell(vec![0, 1, 2]));
    }

    #[test]
    fn cell_parsing() {
        assert_eq!(Cell::parse("full", 3).unwrap(), Cell::full(3));
        assert_eq!(Cell::parse("3,1", 3).unwrap(), Cell(vec![0, 2]));
        assert!(Cell::parse("4", 3).is_err());
        assert!(Cell::parse("0", 3).is_err());
        assert_eq!(Cell(vec![0, 2]).to_string(), "{a1,a3}");
    }

    #[test]
    fn a1_point() {
        let rs: Realized<f64> = from_family_spec("A1", &[1]).unwrap().realize();
        let p = point_from_coordinates(&rs, &Cell::full(1), &[1.0]).unwrap();
        let s = 0.5f64.sqrt();
        assert!((p.h[0] - s).abs() < 1e-15 && (p.h[1] + s).abs() < 1e-15);
        assert_eq!(orbit_dimension(&rs, &p), 1);
    }

    #[test]
    fn a2_wall_point() {
        let rs = a2();
        let p = point_from_coordinates(&rs, &Cell(vec![0]), &[1.0]).unwrap();
        let s6 = 6f64.sqrt();
        for (x, e) in p.h.iter().zip([2.0 / s6, -1.0 / s6, -1.0 / s6]) {
            assert!((x - e).abs() < 1e-15);
        }
        // α2 = positive root index 2 in the (e1-e2, e1-e3, e2-e3) listing
        assert_eq!(p.vanishing, vec![2]);
        assert_eq!(orbit_dimension(&rs, &p), 2);
        assert_eq!(cell_vanishing(&rs, &Cell(vec![0])), vec![2]);
    }

    #[test]
    fn interior_point_has_no_vanishing_roots() {
        let rs = a2();
        let p = point_from_coordinates(&rs, &Cell::full(2), &[0.3, 1.7]).unwrap();
        assert!(p.vanishing.is_empty());
        assert_eq!(orbit_dimension(&rs, &p), 3);
    }

    #[test]
    fn outside_and_dead_band_are_rejected() {
        let rs = a2();
        let err = vanishing_roots(&rs, &[-0.5f64.sqrt(), 0.5f64.sqrt(), 0.0]).unwrap_err();
        assert!(matches!(err, Error::OutsideChamber { simple_root: 0, .. }));
        let err = point_from_coordinates(&rs, &Cell::full(2), &[1.0, 1e-8]).unwrap_err();
        assert!(matches!(err, Error::DeadBand { .. }), "{err}");
        assert!(point_from_coordinates(&rs, &Cell::full(2), &[1.0, 0.0]).is_err());
    }

    #[test]
    fn product_point_from_angle() {
        let rs: Realized<f64> = from_family_spec("A1xA1", &[1, 2]).unwrap().realize();
        let theta = 0.4f64;
        // ‖H_{α_i}‖ = 1/√2, so unit factor vectors need x_i = √2 · (cos, sin)
        let x = [2f64.sqrt() * theta.cos(), 2f64.sqrt() * theta.sin()];
        let p = point_from_coordinates(&rs, &Cell::full(2), &x).unwrap();
        let w = rs.factor_weights(&p.h);
        assert!((w[0] - theta.cos().powi(2)).abs() < 1e-15);
        assert!((w[1] - theta.sin().powi(2)).abs() < 1e-15);
        assert_eq!(orbit_dimension(&rs, &p), 3);
    }

    #[test]
    fn from_vector_rejects_off_span() {
        let rs = a2();
        assert!(CellPoint::from_vector(&rs, &[1.0, 1.0, 1.0]).is_err());
        let p = CellPoint::from_vector(&rs, &[2.0, -1.0, -1.0]).unwrap();
        assert_eq!(p.cell, Cell(vec![0]));
    }
}
