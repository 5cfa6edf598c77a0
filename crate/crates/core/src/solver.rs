//! Minimal and biharmonic points inside a chamber cell.
//!
//! Iterates live on `C^Δ ∩ S`: steps are taken in the tangent space of the
//! sphere restricted to `span{H_{α_i} : i ∈ Δ}` and retracted by
//! normalization. Minimal points come from Newton's method on the convex
//! potential of [`orbitgeom::potential_at`]; biharmonic points from a
//! multi-start Gauss-Newton iteration on the bitension map with a
//! central-difference Jacobian. [`grid_oracle`] is an exhaustive check that
//! shares no code with either iteration beyond the residual evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chamber::{cell_vanishing, cells, Cell, CellPoint};
use crate::error::{Error, Result};
use crate::linalg;
use crate::orbitgeom::{self, OrbitReport};
use crate::realized::Realized;
use crate::scalar::Real;

/// Minima of `‖(τ_{2,H})_H‖` above this are not reported by [`grid_oracle`].
pub const ORACLE_REPORT_THRESHOLD: f64 = 1e-6;

/// Two converged points closer than this are checked for being one root.
const CLUSTER_RADIUS: f64 = 1e-2;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Residual norm required for convergence.
    pub tol: f64,
    /// Low-discrepancy seeds per cell of positive dimension.
    pub seeds: usize,
    pub max_iter: usize,
    /// Central-difference step for the bitension Jacobian.
    pub fd_step: f64,
    pub max_halvings: u32,
    /// Geodesic distance below which two solutions are the same.
    pub dedup_distance: f64,
    /// Randomly rotates the seed sequence when set.
    pub seed_shift: Option<u64>,
    pub parallel: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            seeds: 32,
            max_iter: 200,
            fd_step: 1e-6,
            max_halvings: 30,
            dedup_distance: 1e-6,
            seed_shift: None,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    NoSolutionFound,
    BoundaryEscape,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolvedPoint<T> {
    pub report: OrbitReport<T>,
    /// Norm of the residual the solver drove to zero.
    pub residual: T,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult<T> {
    pub cell: Cell,
    pub points: Vec<SolvedPoint<T>>,
    pub seeds_tried: usize,
    pub boundary_escapes: usize,
    pub status: SolveStatus,
}

impl<T: Real> SolveResult<T> {
    pub fn is_converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Geometry of one cell: its vertex directions and an orthonormal basis of
/// its linear span.
struct Frame<T> {
    cell: Cell,
    vertices: Vec<Vec<T>>,
    span: Vec<Vec<T>>,
    vanishing: Vec<usize>,
}

impl<T: Real> Frame<T> {
    fn new(rs: &Realized<T>, cell: &Cell) -> Self {
        let vertices: Vec<Vec<T>> = cell
            .indices()
            .iter()
            .map(|&i| linalg::normalized(&rs.dual_basis()[i]).expect("dual vector is nonzero"))
            .collect();
        let span = linalg::orthonormal_complement(&vertices, &[]);
        Frame {
            cell: cell.clone(),
            vertices,
            span,
            vanishing: cell_vanishing(rs, cell),
        }
    }

    /// A unit vector of the cell, or `None` when `v` is not strictly inside.
    fn point(&self, rs: &Realized<T>, v: &[T]) -> Option<CellPoint<T>> {
        let h = linalg::normalized(v)?;
        for &i in self.cell.indices() {
            if !(linalg::dot(&rs.simple_roots()[i], &h) > rs.tol_active()) {
                return None;
            }
        }
        Some(CellPoint {
            h,
            cell: self.cell.clone(),
            vanishing: self.vanishing.clone(),
        })
    }

    fn barycentric(&self, rs: &Realized<T>, b: &[T]) -> Option<CellPoint<T>> {
        let mut v = vec![T::zero(); rs.ambient_dim()];
        for (bi, vert) in b.iter().zip(&self.vertices) {
            linalg::axpy(&mut v, *bi, vert);
        }
        self.point(rs, &v)
    }

    fn barycenter(&self, rs: &Realized<T>) -> CellPoint<T> {
        let k = self.vertices.len();
        self.barycentric(rs, &vec![T::one() / T::lit(k as f64); k])
            .expect("barycenter lies inside the cell")
    }

    fn tangent_basis(&self, h: &[T]) -> Vec<Vec<T>> {
        linalg::orthonormal_complement(&self.span, &[h.to_vec()])
    }

    fn retract(&self, rs: &Realized<T>, p: &CellPoint<T>, step: &[T]) -> Option<CellPoint<T>> {
        let mut v = p.h.clone();
        linalg::axpy(&mut v, T::one(), step);
        self.point(rs, &v)
    }
}

fn combine<T: Real>(basis: &[Vec<T>], coeffs: &[T], scale: T) -> Vec<T> {
    let mut out = vec![T::zero(); basis.first().map_or(0, Vec::len)];
    for (b, &c) in basis.iter().zip(coeffs) {
        linalg::axpy(&mut out, c * scale, b);
    }
    out
}

fn residual_norm<T: Real>(rs: &Realized<T>, p: &CellPoint<T>) -> Option<(Vec<T>, T)> {
    let f = orbitgeom::bitension(rs, p).ok()?;
    let n = linalg::norm(&f);
    n.is_finite().then_some((f, n))
}

struct Polished<T> {
    point: CellPoint<T>,
    residual: T,
    iterations: usize,
    converged: bool,
}

/// Damped Newton on the potential, starting from `start`.
fn newton_minimal<T: Real>(
    rs: &Realized<T>,
    frame: &Frame<T>,
    start: CellPoint<T>,
    opts: &SolverOptions,
) -> Polished<T> {
    let tol = T::lit(opts.tol);
    let mut p = start;
    let mut iterations = 0;
    loop {
        let tau = match orbitgeom::tension_tangent(rs, &p) {
            Ok(t) => t,
            Err(_) => {
                return Polished {
                    residual: T::infinity(),
                    point: p,
                    iterations,
                    converged: false,
                }
            }
        };
        let res = linalg::norm(&tau);
        if res < tol {
            return polish_minimal(rs, frame, p, res, iterations);
        }
        if iterations >= opts.max_iter {
            return Polished {
                converged: false,
                point: p,
                residual: res,
                iterations,
            };
        }
        let Some((basis, delta)) = newton_step(rs, frame, &p, &tau) else {
            return Polished {
                converged: false,
                point: p,
                residual: res,
                iterations,
            };
        };
        let f0 = orbitgeom::potential_at(rs, &p).unwrap_or(T::infinity());
        let slack = T::lit(1e-14) * (T::one() + f0.abs());
        let mut t = T::one();
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            if let Some(c) = frame.retract(rs, &p, &combine(&basis, &delta, t)) {
                let f = orbitgeom::potential_at(rs, &c).unwrap_or(T::infinity());
                let r = orbitgeom::tension_tangent(rs, &c)
                    .map(|v| linalg::norm(&v))
                    .unwrap_or(T::infinity());
                if f < f0 || (f <= f0 + slack && r < res) {
                    accepted = Some(c);
                    break;
                }
            }
            t = t / T::lit(2.0);
        }
        iterations += 1;
        match accepted {
            Some(c) => p = c,
            None => {
                return Polished {
                    converged: false,
                    point: p,
                    residual: res,
                    iterations,
                }
            }
        }
    }
}

fn newton_step<T: Real>(
    rs: &Realized<T>,
    frame: &Frame<T>,
    p: &CellPoint<T>,
    tau: &[T],
) -> Option<(Vec<Vec<T>>, Vec<T>)> {
    let basis = frame.tangent_basis(&p.h);
    if basis.is_empty() {
        return None;
    }
    let g: Vec<Vec<T>> = basis.iter().map(|e| vec![-linalg::dot(e, tau)]).collect();
    let hess = orbitgeom::potential_hessian(rs, p, &basis).ok()?;
    let delta = linalg::solve(&hess, &g)?;
    Some((basis, delta.into_iter().map(|r| r[0]).collect()))
}

/// Full Newton steps past `tol` while the residual keeps dropping. The
/// bitension is the tension times factors of order `n`, so `tol` on the
/// tension alone is not enough.
fn polish_minimal<T: Real>(
    rs: &Realized<T>,
    frame: &Frame<T>,
    mut p: CellPoint<T>,
    mut res: T,
    mut iterations: usize,
) -> Polished<T> {
    for _ in 0..3 {
        let Ok(tau) = orbitgeom::tension_tangent(rs, &p) else {
            break;
        };
        let Some((basis, delta)) = newton_step(rs, frame, &p, &tau) else {
            break;
        };
        let Some(c) = frame.retract(rs, &p, &combine(&basis, &delta, T::one())) else {
            break;
        };
        let Ok(r) = orbitgeom::tension_tangent(rs, &c).map(|v| linalg::norm(&v)) else {
            break;
        };
        if r >= res {
            break;
        }
        p = c;
        res = r;
        iterations += 1;
    }
    Polished {
        converged: true,
        point: p,
        residual: res,
        iterations,
    }
}

enum SeedOutcome<T> {
    Converged(Polished<T>),
    Escaped,
    Stalled,
}

fn fd_jacobian<T: Real>(
    rs: &Realized<T>,
    frame: &Frame<T>,
    p: &CellPoint<T>,
    f0: &[T],
    basis: &[Vec<T>],
    h: T,
) -> Option<Vec<Vec<T>>> {
    basis
        .iter()
        .map(|e| {
            let plus = frame
                .retract(rs, p, &linalg::scaled(e, h))
                .and_then(|q| residual_norm(rs, &q));
            let minus = frame
                .retract(rs, p, &linalg::scaled(e, -h))
                .and_then(|q| residual_norm(rs, &q));
            match (plus, minus) {
                (Some((a, _)), Some((b, _))) => {
                    Some(linalg::scaled(&linalg::sub(&a, &b), T::one() / (h + h)))
                }
                (Some((a, _)), None) => Some(linalg::scaled(&linalg::sub(&a, f0), T::one() / h)),
                (None, Some((b, _))) => Some(linalg::scaled(&linalg::sub(f0, &b), T::one() / h)),
                (None, None) => None,
            }
        })
        .collect()
}

/// Gauss-Newton on `p ↦ (τ_{2,H})_H` from one seed.
fn newton_bitension<T: Real>(
    rs: &Realized<T>,
    frame: &Frame<T>,
    start: CellPoint<T>,
    opts: &SolverOptions,
) -> SeedOutcome<T> {
    let tol = T::lit(opts.tol);
    let h = T::lit(opts.fd_step);
    let mut p = start;
    let Some((mut f, mut r)) = residual_norm(rs, &p) else {
        return SeedOutcome::Escaped;
    };
    let mut iterations = 0;
    // extra steps taken after reaching the tolerance, while they still help
    let mut polish = 0;
    loop {
        if r < tol && (polish >= 3 || iterations >= opts.max_iter) {
            return SeedOutcome::Converged(Polished {
                point: p,
                residual: r,
                iterations,
                converged: true,
            });
        }
        if iterations >= opts.max_iter {
            return SeedOutcome::Stalled;
        }
        let basis = frame.tangent_basis(&p.h);
        if basis.is_empty() {
            return if r < tol {
                SeedOutcome::Converged(Polished {
                    point: p,
                    residual: r,
                    iterations,
                    converged: true,
                })
            } else {
                SeedOutcome::Stalled
            };
        }
        let Some(jac) = fd_jacobian(rs, frame, &p, &f, &basis, h) else {
            return SeedOutcome::Escaped;
        };
        let Some(delta) = linalg::least_squares_step(&jac, &f) else {
            return SeedOutcome::Stalled;
        };
        let mut t = T::one();
        let mut accepted = None;
        let mut any_inside = false;
        for _ in 0..=opts.max_halvings {
            if let Some(c) = frame.retract(rs, &p, &combine(&basis, &delta, t)) {
                any_inside = true;
                if let Some((fc, rc)) = residual_norm(rs, &c) {
                    if rc < r {
                        accepted = Some((c, fc, rc));
                        break;
                    }
                }
            }
            t = t / T::lit(2.0);
        }
        iterations += 1;
        match accepted {
            Some((c, fc, rc)) => {
                if r < tol {
                    polish += 1;
                }
                p = c;
                f = fc;
                r = rc;
            }
            None if r < tol => {
                return SeedOutcome::Converged(Polished {
                    point: p,
                    residual: r,
                    iterations,
                    converged: true,
                })
            }
            None if !any_inside => return SeedOutcome::Escaped,
            None => return SeedOutcome::Stalled,
        }
    }
}

/// Whether two converged points are the same root: the bitension stays at
/// residual level along the geodesic joining them.
fn same_root<T: Real>(
    rs: &Realized<T>,
    frame: &Frame<T>,
    a: &Polished<T>,
    b: &Polished<T>,
    opts: &SolverOptions,
) -> bool {
    let d = linalg::geodesic_distance(&a.point.h, &b.point.h);
    if d < T::lit(opts.dedup_distance) {
        return true;
    }
    if d > T::lit(CLUSTER_RADIUS) {
        return false;
    }
    let level = T::lit(10.0) * a.residual.max(b.residual).max(T::lit(opts.tol));
    (1..16).all(|k| {
        let s = T::lit(k as f64 / 16.0);
        let mut v = linalg::scaled(&a.point.h, T::one() - s);
        linalg::axpy(&mut v, s, &b.point.h);
        frame
            .point(rs, &v)
            .and_then(|q| residual_norm(rs, &q))
            .is_some_and(|(_, n)| n <= level)
    })
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Barycentric seed coordinates for a `k`-vertex cell from the Halton
/// sequence, optionally rotated by a seeded random shift.
pub fn seed_barycentrics(k: usize, count: usize, shift: Option<u64>) -> Vec<Vec<f64>> {
    let dim = k.saturating_sub(1);
    let offsets: Vec<f64> = match shift {
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (0..dim).map(|_| rng.gen::<f64>()).collect()
        }
        None => vec![0.0; dim],
    };
    (1..=count as u64)
        .map(|i| {
            let mut u: Vec<f64> = (0..dim)
                .map(|d| {
                    let x = (radical_inverse(i, PRIMES[d % PRIMES.len()]) + offsets[d]).fract();
                    x.clamp(1e-6, 1.0 - 1e-6)
                })
                .collect();
            u.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            let mut b = Vec::with_capacity(k);
            let mut prev = 0.0;
            for &x in &u {
                b.push((x - prev).max(1e-9));
                prev = x;
            }
            b.push((1.0 - prev).max(1e-9));
            b
        })
        .collect()
}

fn solved<T: Real>(rs: &Realized<T>, p: Polished<T>) -> Result<SolvedPoint<T>> {
    Ok(SolvedPoint {
        report: OrbitReport::evaluate(rs, &p.point)?,
        residual: p.residual,
        iterations: p.iterations,
    })
}

fn check_cell<T: Real>(rs: &Realized<T>, cell: &Cell) -> Result<()> {
    if cell.indices().iter().any(|&i| i >= rs.rank()) {
        return Err(Error::InvalidCell(format!(
            "{cell} exceeds rank {}",
            rs.rank()
        )));
    }
    Ok(())
}

/// The unique minimal orbit in the cell, from the cell barycenter.
pub fn solve_minimal<T: Real>(
    rs: &Realized<T>,
    cell: &Cell,
    opts: &SolverOptions,
) -> Result<SolveResult<T>> {
    check_cell(rs, cell)?;
    let frame = Frame::new(rs, cell);
    let start = frame.barycenter(rs);
    minimal_from_frame(rs, &frame, start, opts)
}

/// As [`solve_minimal`], starting from a given point of the cell.
pub fn solve_minimal_from<T: Real>(
    rs: &Realized<T>,
    start: &CellPoint<T>,
    opts: &SolverOptions,
) -> Result<SolveResult<T>> {
    check_cell(rs, &start.cell)?;
    let frame = Frame::new(rs, &start.cell);
    let start = frame
        .point(rs, &start.h)
        .ok_or_else(|| Error::BadPoint(format!("start is not inside cell {}", start.cell)))?;
    minimal_from_frame(rs, &frame, start, opts)
}

fn minimal_from_frame<T: Real>(
    rs: &Realized<T>,
    frame: &Frame<T>,
    start: CellPoint<T>,
    opts: &SolverOptions,
) -> Result<SolveResult<T>> {
    let out = newton_minimal(rs, frame, start, opts);
    let converged = out.converged;
    let points = if converged {
        vec![solved(rs, out)?]
    } else {
        Vec::new()
    };
    Ok(SolveResult {
        cell: frame.cell.clone(),
        points,
        seeds_tried: 1,
        boundary_escapes: 0,
        status: if converged {
            SolveStatus::Converged
        } else {
            SolveStatus::NoSolutionFound
        },
    })
}

/// All biharmonic points of the cell found from `opts.seeds` low-discrepancy
/// seeds plus the minimal point (harmonic orbits are biharmonic).
pub fn solve_biharmonic<T: Real>(
    rs: &Realized<T>,
    cell: &Cell,
    opts: &SolverOptions,
) -> Result<SolveResult<T>> {
    check_cell(rs, cell)?;
    let frame = Frame::new(rs, cell);
    let minimal = newton_minimal(rs, &frame, frame.barycenter(rs), opts);

    if cell.len() == 1 {
        let p = frame.barycenter(rs);
        let (_, r) =
            residual_norm(rs, &p).ok_or_else(|| Error::BadPoint("bitension undefined".into()))?;
        let ok = r < T::lit(opts.tol);
        return Ok(SolveResult {
            cell: cell.clone(),
            points: if ok {
                vec![solved(
                    rs,
                    Polished {
                        point: p,
                        residual: r,
                        iterations: 0,
                        converged: true,
                    },
                )?]
            } else {
                Vec::new()
            },
            seeds_tried: 1,
            boundary_escapes: 0,
            status: if ok {
                SolveStatus::Converged
            } else {
                SolveStatus::NoSolutionFound
            },
        });
    }

    let mut starts: Vec<Option<CellPoint<T>>> = vec![Some(minimal.point.clone())];
    for b in seed_barycentrics(cell.len(), opts.seeds.max(1), opts.seed_shift) {
        let b: Vec<T> = b.into_iter().map(T::lit).collect();
        starts.push(frame.barycentric(rs, &b));
    }
    let run = |s: &Option<CellPoint<T>>| match s {
        Some(p) => newton_bitension(rs, &frame, p.clone(), opts),
        None => SeedOutcome::Escaped,
    };
    let outcomes: Vec<SeedOutcome<T>> = if opts.parallel {
        starts.par_iter().map(run).collect()
    } else {
        starts.iter().map(run).collect()
    };

    let seeds_tried = outcomes.len();
    let boundary_escapes = outcomes
        .iter()
        .filter(|o| matches!(o, SeedOutcome::Escaped))
        .count();
    let mut converged: Vec<Polished<T>> = outcomes
        .into_iter()
        .filter_map(|o| match o {
            SeedOutcome::Converged(p) => Some(p),
            _ => None,
        })
        .collect();

    // A root at the minimal point has multiplicity >= 2, so Gauss-Newton only
    // gets within sqrt(tol) of it; snap such points onto the Newton minimum.
    if minimal.converged {
        let m = Polished {
            residual: residual_norm(rs, &minimal.point).map_or(T::infinity(), |x| x.1),
            point: minimal.point.clone(),
            iterations: minimal.iterations,
            converged: true,
        };
        if m.residual < T::lit(opts.tol) {
            for c in converged.iter_mut() {
                if same_root(rs, &frame, c, &m, opts) {
                    c.point = m.point.clone();
                    c.residual = m.residual;
                }
            }
        }
    }

    converged.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut unique: Vec<Polished<T>> = Vec::new();
    for c in converged {
        if !unique.iter().any(|u| same_root(rs, &frame, u, &c, opts)) {
            unique.push(c);
        }
    }
    unique.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                a.point
                    .h
                    .partial_cmp(&b.point.h)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });

    let points = unique
        .into_iter()
        .map(|p| solved(rs, p))
        .collect::<Result<Vec<_>>>()?;
    let status = if !points.is_empty() {
        SolveStatus::Converged
    } else if boundary_escapes == seeds_tried {
        SolveStatus::BoundaryEscape
    } else {
        SolveStatus::NoSolutionFound
    };
    Ok(SolveResult {
        cell: cell.clone(),
        points,
        seeds_tried,
        boundary_escapes,
        status,
    })
}

/// Approximate minimizer of `‖(τ_{2,H})_H‖` reported by [`grid_oracle`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleMinimum<T> {
    pub point: CellPoint<T>,
    pub residual: T,
}

/// Exhaustive search for zeros of the bitension over a uniform barycentric
/// grid of the cell, with local refinement. Cells of dimension at most 2.
pub fn grid_oracle<T: Real>(
    rs: &Realized<T>,
    cell: &Cell,
    resolution: usize,
) -> Result<Vec<OracleMinimum<T>>> {
    check_cell(rs, cell)?;
    if cell.len() > 3 {
        return Err(Error::OracleTooLarge(cell.len()));
    }
    let frame = Frame::new(rs, cell);
    let threshold = T::lit(ORACLE_REPORT_THRESHOLD);
    let eval = |b: &[T]| -> Option<(CellPoint<T>, Vec<T>, T)> {
        let p = frame.barycentric(rs, b)?;
        let (f, n) = residual_norm(rs, &p)?;
        Some((p, f, n))
    };
    let mut found: Vec<OracleMinimum<T>> = Vec::new();
    let mut push = |m: OracleMinimum<T>| {
        if m.residual < threshold
            && !found
                .iter()
                .any(|f| linalg::geodesic_distance(&f.point.h, &m.point.h) < T::lit(1e-6))
        {
            found.push(m);
        }
    };
    let n = resolution.max(4);
    let step = T::one() / T::lit(n as f64);
    match cell.len() {
        1 => {
            if let Some((p, _, r)) = eval(&[T::one()]) {
                push(OracleMinimum {
                    point: p,
                    residual: r,
                });
            }
        }
        2 => {
            let bary = |t: T| [T::one() - t, t];
            let tangent = linalg::sub(&frame.vertices[1], &frame.vertices[0]);
            // signed component of F along the direction of increasing t
            let signed = |t: T| -> Option<(T, T)> {
                let (p, f, r) = eval(&bary(t))?;
                let e = linalg::orthonormal_complement(
                    std::slice::from_ref(&tangent),
                    std::slice::from_ref(&p.h),
                );
                let g = e.first().map_or(T::zero(), |e| linalg::dot(e, &f));
                Some((g, r))
            };
            let samples: Vec<Option<(T, T)>> =
                (0..=n).map(|j| signed(T::lit(j as f64) * step)).collect();
            let norm_at = |j: usize| samples[j].map_or(T::infinity(), |s| s.1);
            for j in 1..n {
                let t = T::lit(j as f64) * step;
                // sign change between j and j+1
                if let (Some((ga, _)), Some((gb, _))) = (samples[j], samples[j + 1]) {
                    if ga * gb < T::zero() {
                        let root = bisect(|x| signed(x).map(|s| s.0), t, t + step, ga);
                        if let Some((p, _, r)) = eval(&bary(root)) {
                            push(OracleMinimum {
                                point: p,
                                residual: r,
                            });
                        }
                    }
                }
                if norm_at(j) <= norm_at(j - 1)
                    && norm_at(j) <= norm_at(j + 1)
                    && norm_at(j).is_finite()
                {
                    let lo = t - step;
                    let hi = t + step;
                    let best = trisect(
                        |x| signed(x).map_or(T::infinity(), |s| s.1),
                        lo,
                        hi,
                        T::lit(1e-12),
                    );
                    if let Some((p, _, r)) = eval(&bary(best)) {
                        push(OracleMinimum {
                            point: p,
                            residual: r,
                        });
                    }
                }
            }
        }
        _ => {
            // triangular lattice (i, j) with i, j >= 1 and i + j <= n - 1
            let rows: Vec<Vec<T>> = (1..n)
                .into_par_iter()
                .map(|i| {
                    (1..n - i)
                        .map(|j| {
                            let (u, v) = (T::lit(i as f64) * step, T::lit(j as f64) * step);
                            eval(&[u, v, T::one() - u - v]).map_or(T::infinity(), |x| x.2)
                        })
                        .collect()
                })
                .collect();
            let at = |i: isize, j: isize| -> T {
                if i < 1 || j < 1 || (i + j) as usize > n - 1 {
                    T::infinity()
                } else {
                    rows[i as usize - 1][j as usize - 1]
                }
            };
            let norm3 = |u: T, v: T| -> T {
                let w = T::one() - u - v;
                if u <= T::zero() || v <= T::zero() || w <= T::zero() {
                    return T::infinity();
                }
                eval(&[u, v, w]).map_or(T::infinity(), |x| x.2)
            };
            for i in 1..n as isize {
                for j in 1..(n as isize - i) {
                    let c = at(i, j);
                    let nb = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];
                    if !c.is_finite() || !nb.iter().all(|&(di, dj)| c <= at(i + di, j + dj)) {
                        continue;
                    }
                    let (mut u, mut v) = (T::lit(i as f64) * step, T::lit(j as f64) * step);
                    let mut w = step;
                    while w > T::lit(1e-10) {
                        u = trisect(|x| norm3(x, v), u - w, u + w, w * T::lit(1e-3));
                        v = trisect(|y| norm3(u, y), v - w, v + w, w * T::lit(1e-3));
                        w = w * T::lit(0.5);
                    }
                    if let Some((p, _, r)) = eval(&[u, v, T::one() - u - v]) {
                        push(OracleMinimum {
                            point: p,
                            residual: r,
                        });
                    }
                }
            }
        }
    }
    found.sort_by(|a, b| {
        a.point
            .h
            .partial_cmp(&b.point.h)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(found)
}

fn bisect<T: Real>(g: impl Fn(T) -> Option<T>, mut lo: T, mut hi: T, g_lo: T) -> T {
    let mut s_lo = g_lo.signum();
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        match g(mid) {
            Some(v) if v == T::zero() => return mid,
            Some(v) if v.signum() == s_lo => {
                lo = mid;
                s_lo = v.signum();
            }
            Some(_) => hi = mid,
            None => break,
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// Ternary search for a minimum of a unimodal function on `[lo, hi]`.
fn trisect<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, width: T) -> T {
    let three = T::lit(3.0);
    while hi - lo > width {
        let a = lo + (hi - lo) / three;
        let b = hi - (hi - lo) / three;
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
        if hi - lo <= T::epsilon() * (T::one() + hi.abs()) {
            break;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// Per-cell result of [`classify_cellwise`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellClassification<T> {
    pub cell: Cell,
    pub minimal: SolveResult<T>,
    pub biharmonic: SolveResult<T>,
}

/// Runs both solvers on every cell, in [`cells`] order. Single-vertex cells
/// are one point and are only evaluated.
pub fn classify_cellwise<T: Real>(
    rs: &Realized<T>,
    opts: &SolverOptions,
) -> Result<Vec<CellClassification<T>>> {
    let all = cells(rs.rank());
    classify_cells(rs, &all, opts)
}

/// [`classify_cellwise`] restricted to the given cells.
pub fn classify_cells<T: Real>(
    rs: &Realized<T>,
    cells: &[Cell],
    opts: &SolverOptions,
) -> Result<Vec<CellClassification<T>>> {
    let one = |cell: &Cell| -> Result<CellClassification<T>> {
        Ok(CellClassification {
            cell: cell.clone(),
            minimal: solve_minimal(rs, cell, opts)?,
            biharmonic: solve_biharmonic(rs, cell, opts)?,
        })
    };
    if opts.parallel {
        cells.par_iter().map(one).collect()
    } else {
        cells.iter().map(one).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chamber::point_from_coordinates;
    use crate::rootsys::from_family_spec;
    use crate::Classification;

    fn cos2_of(rs: &Realized<f64>, p: &CellPoint<f64>) -> f64 {
        rs.factor_weights(&p.h)[0]
    }

    #[test]
    fn a1_minimal_is_immediate() {
        let rs: Realized<f64> = from_family_spec("A1", &[1]).unwrap().realize();
        let r = solve_minimal(&rs, &Cell::full(1), &SolverOptions::default()).unwrap();
        assert!(r.is_converged());
        assert_eq!(r.points.len(), 1);
        assert!(r.points[0].iterations <= 1);
        let s = 0.5f64.sqrt();
        assert!((r.points[0].report.point.h[0] - s).abs() < 1e-15);
    }

    #[test]
    fn product_minimal_angle() {
        let rs: Realized<f64> = from_family_spec("A1xA1", &[1, 2]).unwrap().realize();
        let r = solve_minimal(&rs, &Cell::full(2), &SolverOptions::default()).unwrap();
        assert!(r.is_converged());
        let c2 = cos2_of(&rs, &r.points[0].report.point);
        assert!((c2 - 1.0 / 3.0).abs() < 1e-10, "{c2}");
    }

    #[test]
    fn a2_minimal_is_barycentric() {
        let rs: Realized<f64> = from_family_spec("A2", &[1]).unwrap().realize();
        let r = solve_minimal(&rs, &Cell::full(2), &SolverOptions::default()).unwrap();
        let sym = point_from_coordinates(&rs, &Cell::full(2), &[1.0, 1.0]).unwrap();
        assert!(
            orbitgeom::tension_tangent(&rs, &sym)
                .map(|t| linalg::norm(&t))
                .unwrap()
                < 1e-10
        );
        assert!(linalg::geodesic_distance(&r.points[0].report.point.h, &sym.h) < 1e-10);
    }

    #[test]
    fn product_biharmonic_pair() {
        let rs: Realized<f64> = from_family_spec("A1xA1", &[1, 2]).unwrap().realize();
        let r = solve_biharmonic(&rs, &Cell::full(2), &SolverOptions::default()).unwrap();
        let mut c2: Vec<f64> = r
            .points
            .iter()
            .map(|p| cos2_of(&rs, &p.report.point))
            .collect();
        c2.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(c2.len(), 2, "{c2:?}");
        assert!((c2[0] - 1.0 / 3.0).abs() < 1e-9);
        assert!((c2[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn equal_factors_collapse() {
        let rs: Realized<f64> = from_family_spec("A1xA1", &[1, 1]).unwrap().realize();
        let r = solve_biharmonic(&rs, &Cell::full(2), &SolverOptions::default()).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.points[0].report.classification, Classification::Minimal);
    }

    #[test]
    fn seeds_are_deterministic_and_shiftable() {
        let a = seed_barycentrics(3, 8, None);
        assert_eq!(a, seed_barycentrics(3, 8, None));
        assert_ne!(a, seed_barycentrics(3, 8, Some(7)));
        for b in a {
            assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(b.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn oracle_rejects_large_cells() {
        let rs: Realized<f64> = from_family_spec("A4", &[1]).unwrap().realize();
        assert!(matches!(
            grid_oracle(&rs, &Cell::full(4), 10),
            Err(Error::OracleTooLarge(4))
        ));
    }

    #[test]
    fn oracle_finds_product_angles() {
        let rs: Realized<f64> = from_family_spec("A1xA1", &[1, 2]).unwrap().realize();
        let m = grid_oracle(&rs, &Cell::full(2), 2000).unwrap();
        let mut c2: Vec<f64> = m.iter().map(|x| cos2_of(&rs, &x.point)).collect();
        c2.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(c2.len(), 2, "{c2:?}");
        assert!((c2[0] - 1.0 / 3.0).abs() < 1e-6);
        assert!((c2[1] - 0.5).abs() < 1e-9);
    }
}
