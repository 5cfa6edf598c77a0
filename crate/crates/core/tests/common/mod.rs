#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rsb_core::rootsys::{direct_sum, from_family_spec};
use rsb_core::{cells, point_from_coordinates, CellPoint, Family, Realized, RootSystem};

pub const RANK_TWO: [&str; 4] = ["A2", "B2", "G2", "BC2"];

/// `family` with every multiplicity drawn from `1..=max_m`.
pub fn random_system<R: Rng>(rng: &mut R, family: &str, max_m: u32) -> RootSystem {
    let fam = Family::parse(&family[..family.len() - 1]).unwrap();
    let ms: Vec<u32> = (0..fam.length_classes().len())
        .map(|_| rng.gen_range(1..=max_m))
        .collect();
    from_family_spec(family, &ms).unwrap()
}

/// One of the rank-2 systems or a direct sum of two of them.
pub fn random_rank_two_or_sum<R: Rng>(rng: &mut R, max_m: u32) -> RootSystem {
    let fa = *RANK_TWO.choose(rng).unwrap();
    let a = random_system(rng, fa, max_m);
    if rng.gen_bool(0.5) {
        a
    } else {
        let fb = *RANK_TWO.choose(rng).unwrap();
        let b = random_system(rng, fb, max_m);
        direct_sum(&a, &b)
    }
}

/// A point of a random cell with dual coordinates in `[lo, 1]`.
pub fn random_point<R: Rng>(rng: &mut R, rs: &Realized<f64>, lo: f64) -> CellPoint<f64> {
    let all = cells(rs.rank());
    let cell = all.choose(rng).unwrap().clone();
    random_point_in(rng, rs, &cell, lo)
}

/// As [`random_point`], restricted to cells with at least two vertices, where
/// the orbit has a tangent direction inside the cell.
pub fn random_moving_point<R: Rng>(rng: &mut R, rs: &Realized<f64>, lo: f64) -> CellPoint<f64> {
    let all: Vec<_> = cells(rs.rank())
        .into_iter()
        .filter(|c| c.len() >= 2)
        .collect();
    let cell = all.choose(rng).unwrap().clone();
    random_point_in(rng, rs, &cell, lo)
}

pub fn random_point_in<R: Rng>(
    rng: &mut R,
    rs: &Realized<f64>,
    cell: &rsb_core::Cell,
    lo: f64,
) -> CellPoint<f64> {
    let x: Vec<f64> = (0..cell.len()).map(|_| rng.gen_range(lo..=1.0)).collect();
    point_from_coordinates(rs, cell, &x).unwrap()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

/// `cos²θ` of a point of `A1 x A1`.
pub fn cos2(rs: &Realized<f64>, p: &CellPoint<f64>) -> f64 {
    rs.factor_weights(&p.h)[0]
}
