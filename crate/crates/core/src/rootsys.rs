//! Restricted root systems with multiplicities.
//!
//! A [`RootSystem`] stores the positive roots `Σ⁺` with their multiplicities,
//! the simple roots and the dual basis `H_{α_i}`, all in exact rational
//! coordinates of an ambient Euclidean space. The negative roots are implicit.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Rational, Real};

/// A nonzero vector with exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Root(pub Vec<Rational>);

impl Root {
    pub fn from_ints(coords: &[i64]) -> Self {
        Root(coords.iter().map(|&c| Rational::from_integer(c)).collect())
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &Root) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn neg(&self) -> Root {
        Root(self.0.iter().map(|c| -c).collect())
    }

    pub fn to_real<T: Real>(&self) -> Vec<T> {
        self.0.iter().map(T::from_rational).collect()
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A positive root together with its multiplicity `m(λ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveRoot {
    pub root: Root,
    pub multiplicity: u32,
}

/// Irreducible root system families with a built-in realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    BC,
    E,
    F,
    G,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        Some(match s.to_ascii_uppercase().as_str() {
            "A" => Family::A,
            "B" => Family::B,
            "C" => Family::C,
            "D" => Family::D,
            "BC" => Family::BC,
            "E" => Family::E,
            "F" => Family::F,
            "G" => Family::G,
            _ => return None,
        })
    }

    /// Length classes in the order used for positional multiplicity lists.
    pub fn length_classes(self) -> &'static [LengthClass] {
        use LengthClass::*;
        match self {
            Family::A | Family::D | Family::E => &[Long],
            Family::B | Family::C | Family::F | Family::G => &[Short, Long],
            Family::BC => &[Short, Long, Double],
        }
    }

    pub fn check_rank(self, rank: usize) -> Result<()> {
        let ok = match self {
            Family::A | Family::B | Family::C | Family::BC => rank >= 1,
            Family::D => rank >= 2,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidFamily(format!("{self}{rank}")))
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::BC => "BC",
            Family::E => "E",
            Family::F => "F",
            Family::G => "G",
        };
        f.write_str(s)
    }
}

/// Root length class within a family. For `BC`, `Short` is `e_i`, `Long` is
/// `e_i ± e_j` and `Double` is `2e_i`. Single-class families use `Long`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthClass {
    Short,
    Long,
    Double,
}

impl fmt::Display for LengthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LengthClass::Short => "short",
            LengthClass::Long => "long",
            LengthClass::Double => "double",
        })
    }
}

pub type Multiplicities = BTreeMap<LengthClass, u32>;

/// Builds a [`Multiplicities`] map from a positional list in the order of
/// [`Family::length_classes`].
pub fn multiplicities_for(family: Family, values: &[u32]) -> Result<Multiplicities> {
    let classes = family.length_classes();
    if values.len() != classes.len() {
        return Err(Error::Multiplicity(format!(
            "{family} expects {} multiplicities ({}), got {}",
            classes.len(),
            classes
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(","),
            values.len()
        )));
    }
    Ok(classes
        .iter()
        .copied()
        .zip(values.iter().copied())
        .collect())
}

/// Coordinate block of one irreducible summand inside a direct sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub coords: Range<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSystem {
    ambient_dim: usize,
    rank: usize,
    positive_roots: Vec<PositiveRoot>,
    simple_roots: Vec<Root>,
    dual_basis: Vec<Vec<Rational>>,
    /// Coefficients of each positive root in the simple-root basis.
    coefficients: Vec<Vec<Rational>>,
    label: String,
    factors: Vec<Factor>,
}

impl RootSystem {
    /// Assembles a system without validating it. The dual basis and
    /// simple-root coefficients are filled in when the simple roots allow it.
    pub fn from_parts(
        label: impl Into<String>,
        ambient_dim: usize,
        rank: usize,
        simple_roots: Vec<Root>,
        positive_roots: Vec<PositiveRoot>,
    ) -> Self {
        let label = label.into();
        let dual = compute_dual_basis(&simple_roots).unwrap_or_default();
        let coefficients = if dual.is_empty() {
            Vec::new()
        } else {
            positive_roots
                .iter()
                .map(|p| coefficients_in(&simple_roots, &dual, &p.root))
                .collect()
        };
        RootSystem {
            ambient_dim,
            rank,
            positive_roots,
            simple_roots,
            dual_basis: dual,
            coefficients,
            factors: vec![Factor {
                label: label.clone(),
                coords: 0..ambient_dim,
            }],
            label,
        }
    }

    /// Assembles and validates a system.
    pub fn new(
        label: impl Into<String>,
        ambient_dim: usize,
        rank: usize,
        simple_roots: Vec<Root>,
        positive_roots: Vec<PositiveRoot>,
    ) -> Result<Self> {
        let rs = Self::from_parts(label, ambient_dim, rank, simple_roots, positive_roots);
        let violations = validate(&rs);
        if violations.is_empty() {
            Ok(rs)
        } else {
            Err(Error::Validation(violations))
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn positive_roots(&self) -> &[PositiveRoot] {
        &self.positive_roots
    }

    pub fn simple_roots(&self) -> &[Root] {
        &self.simple_roots
    }

    /// Dual basis `H_{α_i}` with `<H_{α_i}, α_j> = δ_ij`.
    pub fn dual_basis(&self) -> &[Vec<Rational>] {
        &self.dual_basis
    }

    /// Coefficients of positive root `i` in the simple-root basis.
    pub fn coefficients(&self, i: usize) -> &[Rational] {
        &self.coefficients[i]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Sum of all multiplicities, i.e. the dimension of a principal orbit.
    pub fn total_multiplicity(&self) -> u64 {
        self.positive_roots
            .iter()
            .map(|p| p.multiplicity as u64)
            .sum()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        if self.factors.len() == 1 {
            self.factors[0].label = self.label.clone();
        }
        self
    }

    /// Floating-point realization used by the geometry routines.
    pub fn realize<T: Real>(&self) -> crate::Realized<T> {
        crate::Realized::new(self)
    }
}

fn compute_dual_basis(simple: &[Root]) -> Result<Vec<Vec<Rational>>> {
    let r = simple.len();
    if r == 0 {
        return Err(Error::SingularGram);
    }
    let gram: Vec<Vec<Rational>> = simple
        .iter()
        .map(|a| simple.iter().map(|b| a.dot(b)).collect())
        .collect();
    let identity: Vec<Vec<Rational>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let inv = linalg::solve(&gram, &identity).ok_or(Error::SingularGram)?;
    let d = simple[0].dim();
    Ok((0..r)
        .map(|i| {
            let mut h = vec![Rational::zero(); d];
            for (k, alpha) in simple.iter().enumerate() {
                for (hc, ac) in h.iter_mut().zip(alpha.coords()) {
                    *hc += inv[i][k] * ac;
                }
            }
            h
        })
        .collect())
}

/// `<H_i, λ>` for each i: the coefficients of λ's projection onto span(Π).
fn coefficients_in(_simple: &[Root], dual: &[Vec<Rational>], root: &Root) -> Vec<Rational> {
    dual.iter().map(|h| Root(h.clone()).dot(root)).collect()
}

/// Dual basis `H_{α_i}` from the Gram system of the simple roots.
pub fn dual_basis(rs: &RootSystem) -> Result<Vec<Vec<Rational>>> {
    compute_dual_basis(&rs.simple_roots)
}

/// One failed invariant of a [`RootSystem`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    RankMismatch {
        declared: usize,
        actual: usize,
    },
    ZeroRoot {
        what: String,
    },
    NonPositiveMultiplicity {
        root: usize,
    },
    DuplicateRoot {
        first: usize,
        second: usize,
        root: Root,
    },
    NegativePair {
        first: usize,
        second: usize,
        root: Root,
    },
    DependentSimpleRoots,
    SimpleRootNotPositive {
        simple: usize,
    },
    OutsideSimpleSpan {
        root: usize,
    },
    NotNonnegativeIntegerCombination {
        root: usize,
        coefficients: Vec<Rational>,
    },
    DualBasisPairing {
        max_error: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch { what, expected, found } => {
                write!(f, "dimension mismatch: {what} has {found} coordinates, expected {expected}")
            }
            Violation::RankMismatch { declared, actual } => {
                write!(f, "rank mismatch: declared rank {declared}, found {actual}")
            }
            Violation::ZeroRoot { what } => write!(f, "zero root: {what}"),
            Violation::NonPositiveMultiplicity { root } => {
                write!(f, "non-positive multiplicity on positive root #{}", root + 1)
            }
            Violation::DuplicateRoot { first, second, root } => write!(
                f,
                "duplicate ray in positive roots: #{} and #{} are both {root}",
                first + 1,
                second + 1
            ),
            Violation::NegativePair { first, second, root } => write!(
                f,
                "negative pair in positive roots: #{} = {root} and #{} = -{root}",
                first + 1,
                second + 1
            ),
            Violation::DependentSimpleRoots => write!(f, "simple roots are linearly dependent"),
            Violation::SimpleRootNotPositive { simple } => {
                write!(f, "simple root alpha_{} is not among the positive roots", simple + 1)
            }
            Violation::OutsideSimpleSpan { root } => {
                write!(f, "positive root #{} is outside the span of the simple roots", root + 1)
            }
            Violation::NotNonnegativeIntegerCombination { root, coefficients } => write!(
                f,
                "positive root #{} is not a nonnegative integer combination of simple roots (coefficients {:?})",
                root + 1,
                coefficients.iter().map(ToString::to_string).collect::<Vec<_>>()
            ),
            Violation::DualBasisPairing { max_error } => {
                write!(f, "dual basis pairing deviates from identity by {max_error}")
            }
        }
    }
}

/// Checks every structural invariant; an empty list means the system is valid.
pub fn validate(rs: &RootSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    let d = rs.ambient_dim;

    let mut dims_ok = true;
    for (i, a) in rs.simple_roots.iter().enumerate() {
        if a.dim() != d {
            dims_ok = false;
            out.push(Violation::DimensionMismatch {
                what: format!("simple root alpha_{}", i + 1),
                expected: d,
                found: a.dim(),
            });
        }
    }
    for (i, p) in rs.positive_roots.iter().enumerate() {
        if p.root.dim() != d {
            dims_ok = false;
            out.push(Violation::DimensionMismatch {
                what: format!("positive root #{}", i + 1),
                expected: d,
                found: p.root.dim(),
            });
        }
    }
    if !dims_ok {
        return out;
    }

    if rs.simple_roots.len() != rs.rank {
        out.push(Violation::RankMismatch {
            declared: rs.rank,
            actual: rs.simple_roots.len(),
        });
    }
    for (i, a) in rs.simple_roots.iter().enumerate() {
        if a.is_zero() {
            out.push(Violation::ZeroRoot {
                what: format!("simple root alpha_{}", i + 1),
            });
        }
    }
    for (i, p) in rs.positive_roots.iter().enumerate() {
        if p.root.is_zero() {
            out.push(Violation::ZeroRoot {
                what: format!("positive root #{}", i + 1),
            });
        }
        if p.multiplicity == 0 {
            out.push(Violation::NonPositiveMultiplicity { root: i });
        }
    }
    for i in 0..rs.positive_roots.len() {
        for j in i + 1..rs.positive_roots.len() {
            let (a, b) = (&rs.positive_roots[i].root, &rs.positive_roots[j].root);
            if a == b {
                out.push(Violation::DuplicateRoot {
                    first: i,
                    second: j,
                    root: a.clone(),
                });
            } else if !a.is_zero() && *a == b.neg() {
                out.push(Violation::NegativePair {
                    first: i,
                    second: j,
                    root: a.clone(),
                });
            }
        }
    }

    let simple_rows: Vec<Vec<Rational>> = rs.simple_roots.iter().map(|a| a.0.clone()).collect();
    let simple_rank = linalg::rank(&simple_rows);
    if simple_rank < rs.simple_roots.len() {
        out.push(Violation::DependentSimpleRoots);
    }
    let root_rows: Vec<Vec<Rational>> =
        rs.positive_roots.iter().map(|p| p.root.0.clone()).collect();
    let span_rank = linalg::rank(&root_rows);
    if span_rank != rs.rank && rs.simple_roots.len() == rs.rank {
        out.push(Violation::RankMismatch {
            declared: rs.rank,
            actual: span_rank,
        });
    }
    if simple_rank < rs.simple_roots.len() || rs.dual_basis.is_empty() {
        return out;
    }

    for (i, a) in rs.simple_roots.iter().enumerate() {
        if !rs.positive_roots.iter().any(|p| p.root == *a) {
            out.push(Violation::SimpleRootNotPositive { simple: i });
        }
    }
    for (i, p) in rs.positive_roots.iter().enumerate() {
        let c = &rs.coefficients[i];
        let mut recon = vec![Rational::zero(); d];
        for (ck, alpha) in c.iter().zip(&rs.simple_roots) {
            for (r, a) in recon.iter_mut().zip(alpha.coords()) {
                *r += ck * a;
            }
        }
        if recon != p.root.0 {
            out.push(Violation::OutsideSimpleSpan { root: i });
        } else if c.iter().any(|x| x.is_negative() || !x.is_integer()) {
            out.push(Violation::NotNonnegativeIntegerCombination {
                root: i,
                coefficients: c.clone(),
            });
        }
    }

    let realized: Vec<Vec<f64>> = rs
        .dual_basis
        .iter()
        .map(|h| h.iter().map(f64::from_rational).collect())
        .collect();
    let simple_f: Vec<Vec<f64>> = rs.simple_roots.iter().map(|a| a.to_real()).collect();
    let mut max_err = 0.0f64;
    for (i, h) in realized.iter().enumerate() {
        for (j, a) in simple_f.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            max_err = max_err.max((linalg::dot(h, a) - target).abs());
        }
    }
    if max_err > 1e-12 {
        out.push(Violation::DualBasisPairing {
            max_error: format!("{max_err:e}"),
        });
    }
    out
}

fn unit(d: usize, i: usize, scale: i64) -> Vec<i64> {
    let mut v = vec![0; d];
    v[i] = scale;
    v
}

fn combo(d: usize, terms: &[(usize, i64)]) -> Vec<i64> {
    let mut v = vec![0; d];
    for &(i, c) in terms {
        v[i] += c;
    }
    v
}

/// Raw positive roots (in doubled coordinates for F4 and E8, where half-integers
/// occur) tagged by class, plus the simple roots.
struct RawSystem {
    ambient: usize,
    denom: i64,
    simple: Vec<Vec<i64>>,
    positive: Vec<(Vec<i64>, LengthClass)>,
}

fn raw_classical(family: Family, r: usize) -> RawSystem {
    use LengthClass::*;
    match family {
        Family::A => {
            let d = r + 1;
            let simple = (0..r).map(|i| combo(d, &[(i, 1), (i + 1, -1)])).collect();
            let mut positive = Vec::new();
            for i in 0..d {
                for j in i + 1..d {
                    positive.push((combo(d, &[(i, 1), (j, -1)]), Long));
                }
            }
            RawSystem {
                ambient: d,
                denom: 1,
                simple,
                positive,
            }
        }
        Family::B | Family::C | Family::BC | Family::D => {
            let d = r;
            let mut positive = Vec::new();
            let pair_class = match family {
                Family::C => Short,
                _ => Long,
            };
            for i in 0..d {
                for j in i + 1..d {
                    positive.push((combo(d, &[(i, 1), (j, -1)]), pair_class));
                    positive.push((combo(d, &[(i, 1), (j, 1)]), pair_class));
                }
            }
            for i in 0..d {
                match family {
                    Family::B => positive.push((unit(d, i, 1), Short)),
                    Family::C => positive.push((unit(d, i, 2), Long)),
                    Family::BC => {
                        positive.push((unit(d, i, 1), Short));
                        positive.push((unit(d, i, 2), Double));
                    }
                    _ => {}
                }
            }
            let mut simple: Vec<Vec<i64>> = (0..r.saturating_sub(1))
                .map(|i| combo(d, &[(i, 1), (i + 1, -1)]))
                .collect();
            simple.push(match family {
                Family::B | Family::BC => unit(d, r - 1, 1),
                Family::C => unit(d, r - 1, 2),
                _ => combo(d, &[(r - 2, 1), (r - 1, 1)]),
            });
            RawSystem {
                ambient: d,
                denom: 1,
                simple,
                positive,
            }
        }
        Family::G => {
            // sum-zero hyperplane of R^3
            let a1 = vec![1, -1, 0];
            let a2 = vec![-2, 1, 1];
            let lin =
                |p: i64, q: i64| -> Vec<i64> { (0..3).map(|k| p * a1[k] + q * a2[k]).collect() };
            let positive = vec![
                (lin(1, 0), Short),
                (lin(0, 1), Long),
                (lin(1, 1), Short),
                (lin(2, 1), Short),
                (lin(3, 1), Long),
                (lin(3, 2), Long),
            ];
            RawSystem {
                ambient: 3,
                denom: 1,
                simple: vec![a1, a2],
                positive,
            }
        }
        Family::F => {
            // doubled coordinates
            let d = 4;
            let mut positive = Vec::new();
            for i in 0..d {
                positive.push((unit(d, i, 2), Short));
            }
            for i in 0..d {
                for j in i + 1..d {
                    positive.push((combo(d, &[(i, 2), (j, -2)]), Long));
                    positive.push((combo(d, &[(i, 2), (j, 2)]), Long));
                }
            }
            for signs in 0..8u32 {
                let mut v = vec![1, 1, 1, 1];
                for k in 0..3 {
                    if signs & (1 << k) != 0 {
                        v[k + 1] = -1;
                    }
                }
                positive.push((v, Short));
            }
            let simple = vec![
                vec![0, 2, -2, 0],
                vec![0, 0, 2, -2],
                vec![0, 0, 0, 2],
                vec![1, -1, -1, -1],
            ];
            RawSystem {
                ambient: d,
                denom: 2,
                simple,
                positive,
            }
        }
        Family::E => raw_exceptional_e(r),
    }
}

/// E6 ⊂ E7 ⊂ E8 in R^8 (doubled coordinates), with positive roots selected
/// as the roots that are nonnegative combinations of the simple roots.
fn raw_exceptional_e(r: usize) -> RawSystem {
    let d = 8;
    let mut all = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            for (si, sj) in [(2, 2), (2, -2), (-2, 2), (-2, -2)] {
                all.push(combo(d, &[(i, si), (j, sj)]));
            }
        }
    }
    for mask in 0..256u32 {
        if mask.count_ones() % 2 == 0 {
            all.push(
                (0..d)
                    .map(|k| if mask & (1 << k) != 0 { -1 } else { 1 })
                    .collect(),
            );
        }
    }
    let e8_simple: Vec<Vec<i64>> = vec![
        vec![1, -1, -1, -1, -1, -1, -1, 1],
        combo(d, &[(0, 2), (1, 2)]),
        combo(d, &[(0, -2), (1, 2)]),
        combo(d, &[(1, -2), (2, 2)]),
        combo(d, &[(2, -2), (3, 2)]),
        combo(d, &[(3, -2), (4, 2)]),
        combo(d, &[(4, -2), (5, 2)]),
        combo(d, &[(5, -2), (6, 2)]),
    ];
    let simple_roots: Vec<Root> = e8_simple.iter().map(|v| Root::from_ints(v)).collect();
    let dual = compute_dual_basis(&simple_roots).expect("E8 simple roots are independent");
    let positive = all
        .into_iter()
        .filter(|v| {
            let c = coefficients_in(&simple_roots, &dual, &Root::from_ints(v));
            c.iter().all(|x| !x.is_negative()) && c[r..].iter().all(Zero::is_zero)
        })
        .map(|v| (v, LengthClass::Long))
        .collect();
    RawSystem {
        ambient: d,
        denom: 2,
        simple: e8_simple[..r].to_vec(),
        positive,
    }
}

fn multiplicity_label(family: Family, mults: &Multiplicities) -> String {
    let classes = family.length_classes();
    if classes.len() == 1 {
        format!("m={}", mults.get(&classes[0]).copied().unwrap_or(0))
    } else {
        classes
            .iter()
            .filter_map(|c| mults.get(c).map(|m| format!("{c}={m}")))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Standard realization of an irreducible family with the given multiplicities.
///
/// A_r lives in the sum-zero hyperplane of R^{r+1}, G2 in the sum-zero
/// hyperplane of R^3, E6 and E7 inside the R^8 of E8; the others use R^r.
pub fn build_irreducible(
    family: Family,
    rank: usize,
    mults: &Multiplicities,
) -> Result<RootSystem> {
    family.check_rank(rank)?;
    let raw = raw_classical(family, rank);
    for (_, class) in &raw.positive {
        match mults.get(class) {
            None => {
                return Err(Error::Multiplicity(format!(
                    "{family}{rank} needs a multiplicity for the {class} roots"
                )))
            }
            Some(0) => {
                return Err(Error::Multiplicity(format!(
                    "{family}{rank}: multiplicity of {class} roots must be positive"
                )))
            }
            Some(_) => {}
        }
    }
    let to_root = |v: &[i64]| Root(v.iter().map(|&c| Rational::new(c, raw.denom)).collect());
    let positive = raw
        .positive
        .iter()
        .map(|(v, class)| PositiveRoot {
            root: to_root(v),
            multiplicity: mults[class],
        })
        .collect();
    let simple = raw.simple.iter().map(|v| to_root(v)).collect();
    let label = format!("{family}{rank}[{}]", multiplicity_label(family, mults));
    RootSystem::new(label, raw.ambient, rank, simple, positive)
}

/// Orthogonal direct sum: ambient spaces are concatenated.
pub fn direct_sum(a: &RootSystem, b: &RootSystem) -> RootSystem {
    let d = a.ambient_dim + b.ambient_dim;
    let pad_left = |r: &Root| {
        let mut v = r.0.clone();
        v.extend(std::iter::repeat_n(Rational::zero(), b.ambient_dim));
        Root(v)
    };
    let pad_right = |r: &Root| {
        let mut v = vec![Rational::zero(); a.ambient_dim];
        v.extend(r.0.iter().cloned());
        Root(v)
    };
    let simple: Vec<Root> = a
        .simple_roots
        .iter()
        .map(pad_left)
        .chain(b.simple_roots.iter().map(pad_right))
        .collect();
    let positive: Vec<PositiveRoot> = a
        .positive_roots
        .iter()
        .map(|p| PositiveRoot {
            root: pad_left(&p.root),
            multiplicity: p.multiplicity,
        })
        .chain(b.positive_roots.iter().map(|p| PositiveRoot {
            root: pad_right(&p.root),
            multiplicity: p.multiplicity,
        }))
        .collect();
    let label = format!("{} x {}", a.label, b.label);
    let mut rs = RootSystem::from_parts(label, d, a.rank + b.rank, simple, positive);
    rs.factors = a
        .factors
        .iter()
        .cloned()
        .chain(b.factors.iter().map(|f| Factor {
            label: f.label.clone(),
            coords: f.coords.start + a.ambient_dim..f.coords.end + a.ambient_dim,
        }))
        .collect();
    rs
}

/// Parses `A2`, `BC3`, `E6`, ... into a family and rank.
pub fn parse_family_rank(s: &str) -> Result<(Family, usize)> {
    let s = s.trim();
    let split = s
        .find(|c: char| c.is_ascii_digit())
        .ok_or_else(|| Error::InvalidFamily(s.to_string()))?;
    let family = Family::parse(&s[..split]).ok_or_else(|| Error::InvalidFamily(s.to_string()))?;
    let rank: usize = s[split..]
        .parse()
        .map_err(|_| Error::InvalidFamily(s.to_string()))?;
    family.check_rank(rank)?;
    Ok((family, rank))
}

/// Builds a (possibly reducible) system from `A1xA1`-style text and a flat
/// multiplicity list consumed factor by factor.
pub fn from_family_spec(spec: &str, mults: &[u32]) -> Result<RootSystem> {
    let parts: Vec<(Family, usize)> = spec
        .split(['x', 'X', '+'])
        .map(parse_family_rank)
        .collect::<Result<_>>()?;
    let needed: usize = parts.iter().map(|(f, _)| f.length_classes().len()).sum();
    if mults.len() != needed {
        return Err(Error::Multiplicity(format!(
            "{spec} needs {needed} multiplicities (one per length class per factor), got {}",
            mults.len()
        )));
    }
    let mut offset = 0;
    let mut acc: Option<RootSystem> = None;
    for (family, rank) in parts {
        let k = family.length_classes().len();
        let m = multiplicities_for(family, &mults[offset..offset + k])?;
        offset += k;
        let rs = build_irreducible(family, rank, &m)?;
        acc = Some(match acc {
            None => rs,
            Some(prev) => direct_sum(&prev, &rs),
        });
    }
    Ok(acc.expect("at least one factor"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    fn uniform(family: Family, m: u32) -> Multiplicities {
        family.length_classes().iter().map(|&c| (c, m)).collect()
    }

    #[test]
    fn a1_is_the_smallest_system() {
        let rs = build_irreducible(Family::A, 1, &uniform(Family::A, 1)).unwrap();
        assert_eq!(rs.rank(), 1);
        assert_eq!(rs.positive_roots().len(), 1);
        assert_eq!(rs.positive_roots()[0].multiplicity, 1);
        assert_eq!(rs.dual_basis()[0], vec![q(1, 2), q(-1, 2)]);
    }

    #[test]
    fn a2_realization_and_dual_basis() {
        let rs = build_irreducible(Family::A, 2, &uniform(Family::A, 1)).unwrap();
        assert_eq!(rs.positive_roots().len(), 3);
        assert_eq!(rs.simple_roots()[0], Root::from_ints(&[1, -1, 0]));
        assert_eq!(rs.simple_roots()[1], Root::from_ints(&[0, 1, -1]));
        assert_eq!(rs.dual_basis()[0], vec![q(2, 3), q(-1, 3), q(-1, 3)]);
        assert_eq!(rs.dual_basis()[1], vec![q(1, 3), q(1, 3), q(-2, 3)]);
    }

    #[test]
    fn bc1_has_two_rays() {
        let m: Multiplicities = [
            (LengthClass::Short, 3),
            (LengthClass::Long, 5),
            (LengthClass::Double, 2),
        ]
        .into_iter()
        .collect();
        let rs = build_irreducible(Family::BC, 1, &m).unwrap();
        let roots: Vec<_> = rs
            .positive_roots()
            .iter()
            .map(|p| (p.root.clone(), p.multiplicity))
            .collect();
        assert_eq!(
            roots,
            vec![(Root::from_ints(&[1]), 3), (Root::from_ints(&[2]), 2)]
        );
        assert!(validate(&rs).is_empty());
    }

    #[test]
    fn classical_counts() {
        let cases: &[(Family, usize, usize)] = &[
            (Family::A, 1, 1),
            (Family::A, 4, 10),
            (Family::B, 3, 9),
            (Family::C, 3, 9),
            (Family::BC, 3, 12),
            (Family::D, 4, 12),
            (Family::G, 2, 6),
            (Family::F, 4, 24),
            (Family::E, 6, 36),
            (Family::E, 7, 63),
            (Family::E, 8, 120),
        ];
        for &(f, r, n) in cases {
            let rs = build_irreducible(f, r, &uniform(f, 1)).unwrap();
            assert_eq!(rs.positive_roots().len(), n, "{f}{r}");
            assert_eq!(rs.rank(), r);
        }
    }

    #[test]
    fn invalid_rank_and_missing_multiplicity() {
        assert!(matches!(
            build_irreducible(Family::G, 3, &uniform(Family::G, 1)),
            Err(Error::InvalidFamily(_))
        ));
        assert!(build_irreducible(Family::E, 5, &uniform(Family::E, 1)).is_err());
        let only_short: Multiplicities = [(LengthClass::Short, 1)].into_iter().collect();
        assert!(matches!(
            build_irreducible(Family::B, 2, &only_short),
            Err(Error::Multiplicity(_))
        ));
        assert!(matches!(
            build_irreducible(Family::A, 2, &uniform(Family::A, 0)),
            Err(Error::Multiplicity(_))
        ));
    }

    #[test]
    fn validate_flags_negative_pair() {
        let a1 = Root::from_ints(&[1, -1, 0]);
        let a2 = Root::from_ints(&[0, 1, -1]);
        let bad = RootSystem::from_parts(
            "bad",
            3,
            2,
            vec![a1.clone(), a1.neg()],
            vec![
                PositiveRoot {
                    root: a1.clone(),
                    multiplicity: 1,
                },
                PositiveRoot {
                    root: a1.neg(),
                    multiplicity: 1,
                },
                PositiveRoot {
                    root: Root::from_ints(&[1, 0, -1]),
                    multiplicity: 1,
                },
            ],
        );
        let v = validate(&bad);
        assert!(
            v.iter()
                .any(|x| matches!(x, Violation::NegativePair { .. })),
            "{v:?}"
        );
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::DependentSimpleRoots)));
        let _ = a2;
    }

    #[test]
    fn validate_flags_zero_root() {
        let a = Root::from_ints(&[1, -1]);
        let bad = RootSystem::from_parts(
            "zero",
            2,
            1,
            vec![a.clone()],
            vec![
                PositiveRoot {
                    root: a,
                    multiplicity: 1,
                },
                PositiveRoot {
                    root: Root::from_ints(&[0, 0]),
                    multiplicity: 1,
                },
            ],
        );
        assert!(validate(&bad)
            .iter()
            .any(|x| matches!(x, Violation::ZeroRoot { .. })));
    }

    #[test]
    fn direct_sum_is_orthogonal_and_valid() {
        let a2 = build_irreducible(Family::A, 2, &uniform(Family::A, 1)).unwrap();
        let g2 = build_irreducible(Family::G, 2, &uniform(Family::G, 1)).unwrap();
        let s = direct_sum(&a2, &g2);
        assert_eq!(s.rank(), 4);
        assert!(validate(&s).is_empty());
        for p in &s.positive_roots()[..3] {
            for r in &s.positive_roots()[3..] {
                assert_eq!(p.root.dot(&r.root), Rational::zero());
            }
        }
        assert_eq!(s.factors().len(), 2);
        assert_eq!(s.factors()[1].coords, 3..6);
    }

    #[test]
    fn family_spec_parsing() {
        let rs = from_family_spec("A1xA1", &[1, 2]).unwrap();
        assert_eq!(rs.rank(), 2);
        let m: Vec<u32> = rs.positive_roots().iter().map(|p| p.multiplicity).collect();
        assert_eq!(m, vec![1, 2]);
        assert!(from_family_spec("A1xA1", &[1]).is_err());
        assert!(from_family_spec("Q3", &[1]).is_err());
        let bc = from_family_spec("BC2", &[1, 2, 3]).unwrap();
        assert_eq!(bc.total_multiplicity(), 2 * 1 + 2 * 2 + 2 * 3);
    }
}
