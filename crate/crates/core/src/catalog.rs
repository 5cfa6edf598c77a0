//! Compact symmetric spaces and their restricted root data, plus a plain-text
//! format for user-defined root systems.
//!
//! Every entry carries the dimension of its isotropy representation as an
//! independent closed formula; `rank + Σ m(λ)` of the built system must match
//! it exactly.
//!
//! Custom file format:
//!
//! ```text
//! # comment
//! ambient_dim 2
//! rank 1
//! simple 1 -1
//! root 1 -1 mult 1
//! ```
//!
//! Coordinates are integers or `p/q` rationals.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rootsys::{
    build_irreducible, Family, LengthClass, Multiplicities, PositiveRoot, Root, RootSystem,
};
use crate::scalar::parse_rational;

pub type Params = BTreeMap<String, u32>;

pub struct CatalogEntry {
    pub name: &'static str,
    pub family: &'static str,
    pub rank_rule: &'static str,
    pub multiplicities: &'static str,
    pub dim_formula: &'static str,
    pub params: &'static [&'static str],
    /// Parameter sets covered by the catalog tests.
    pub test_range: fn() -> Vec<Params>,
    check: fn(&Params) -> std::result::Result<(), String>,
    build: fn(&Params) -> Result<RootSystem>,
    dim_m: fn(&Params) -> u64,
}

impl CatalogEntry {
    pub fn dim_m(&self, params: &Params) -> u64 {
        (self.dim_m)(params)
    }

    /// A representative parameter choice: `n = 3`, `p = 3`, `q = 2`.
    pub fn example_params(&self) -> Params {
        self.params
            .iter()
            .map(|&k| (k.to_string(), if k == "q" { 2 } else { 3 }))
            .collect()
    }

    pub fn instantiate(&self, params: &Params) -> Result<RootSystem> {
        for p in self.params {
            if !params.contains_key(*p) {
                return Err(Error::InvalidParameters {
                    name: self.name.into(),
                    reason: format!("missing parameter '{p}'"),
                });
            }
        }
        if let Some(extra) = params.keys().find(|k| !self.params.contains(&k.as_str())) {
            return Err(Error::InvalidParameters {
                name: self.name.into(),
                reason: format!("unexpected parameter '{extra}'"),
            });
        }
        (self.check)(params).map_err(|reason| Error::InvalidParameters {
            name: self.name.into(),
            reason,
        })?;
        let label = if params.is_empty() {
            self.name.to_string()
        } else {
            let ps: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{} [{}]", self.name, ps.join(","))
        };
        Ok((self.build)(params)?.with_label(label))
    }
}

fn p(params: &Params, k: &str) -> u32 {
    params[k]
}

fn one(k: &str, v: u32) -> Params {
    [(k.to_string(), v)].into_iter().collect()
}

fn range_n(lo: u32, hi: u32) -> Vec<Params> {
    (lo..=hi).map(|n| one("n", n)).collect()
}

fn range_pq(hi: u32, min_sum: u32) -> Vec<Params> {
    let mut out = Vec::new();
    for pp in 1..=hi {
        for q in 1..=pp {
            if pp + q >= min_sum {
                out.push(
                    [("p".to_string(), pp), ("q".to_string(), q)]
                        .into_iter()
                        .collect(),
                );
            }
        }
    }
    out
}

fn none() -> Vec<Params> {
    vec![Params::new()]
}

fn ok(_: &Params) -> std::result::Result<(), String> {
    Ok(())
}

fn n_at_least(params: &Params, lo: u32) -> std::result::Result<(), String> {
    let n = p(params, "n");
    if n >= lo {
        Ok(())
    } else {
        Err(format!("need n >= {lo}, got {n}"))
    }
}

fn p_ge_q(params: &Params) -> std::result::Result<(), String> {
    let (pp, q) = (p(params, "p"), p(params, "q"));
    if pp >= q && q >= 1 {
        Ok(())
    } else {
        Err(format!("need p >= q >= 1, got p={pp}, q={q}"))
    }
}

fn mults(values: &[(LengthClass, u32)]) -> Multiplicities {
    values.iter().copied().collect()
}

fn uniform(family: Family, rank: usize, m: u32) -> Result<RootSystem> {
    let ms = family.length_classes().iter().map(|&c| (c, m)).collect();
    build_irreducible(family, rank, &ms)
}

use LengthClass::{Double, Long, Short};

/// `BC_q` with `(short, long, double)` multiplicities, or `C_q` when the short
/// multiplicity is zero.
fn bc_or_c(q: usize, short: u32, long: u32, double: u32) -> Result<RootSystem> {
    if short == 0 {
        build_irreducible(Family::C, q, &mults(&[(Short, long), (Long, double)]))
    } else {
        build_irreducible(
            Family::BC,
            q,
            &mults(&[(Short, short), (Long, long), (Double, double)]),
        )
    }
}

static ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "SU(n)/SO(n)",
        family: "A",
        rank_rule: "n-1",
        multiplicities: "m=1",
        dim_formula: "(n-1)(n+2)/2",
        params: &["n"],
        test_range: || range_n(2, 7),
        check: |ps| n_at_least(ps, 2),
        build: |ps| uniform(Family::A, p(ps, "n") as usize - 1, 1),
        dim_m: |ps| {
            let n = p(ps, "n") as u64;
            (n - 1) * (n + 2) / 2
        },
    },
    CatalogEntry {
        name: "SU(2n)/Sp(n)",
        family: "A",
        rank_rule: "n-1",
        multiplicities: "m=4",
        dim_formula: "(n-1)(2n+1)",
        params: &["n"],
        test_range: || range_n(2, 6),
        check: |ps| n_at_least(ps, 2),
        build: |ps| uniform(Family::A, p(ps, "n") as usize - 1, 4),
        dim_m: |ps| {
            let n = p(ps, "n") as u64;
            (n - 1) * (2 * n + 1)
        },
    },
    CatalogEntry {
        name: "SU(p+q)/S(U(p)xU(q))",
        family: "BC (p>q) or C (p=q)",
        rank_rule: "q",
        multiplicities: "e_i: 2(p-q), e_i+-e_j: 2, 2e_i: 1",
        dim_formula: "2pq",
        params: &["p", "q"],
        test_range: || range_pq(5, 2),
        check: p_ge_q,
        build: |ps| {
            let (pp, q) = (p(ps, "p"), p(ps, "q"));
            bc_or_c(q as usize, 2 * (pp - q), 2, 1)
        },
        dim_m: |ps| 2 * p(ps, "p") as u64 * p(ps, "q") as u64,
    },
    CatalogEntry {
        name: "SO(p+q)/SO(p)xSO(q)",
        family: "B (p>q) or D (p=q)",
        rank_rule: "q",
        multiplicities: "e_i: p-q, e_i+-e_j: 1",
        dim_formula: "pq",
        params: &["p", "q"],
        test_range: || range_pq(6, 3),
        check: |ps| {
            p_ge_q(ps)?;
            if p(ps, "p") == p(ps, "q") && p(ps, "q") < 2 {
                return Err("p = q needs q >= 2".into());
            }
            Ok(())
        },
        build: |ps| {
            let (pp, q) = (p(ps, "p"), p(ps, "q"));
            if pp == q {
                uniform(Family::D, q as usize, 1)
            } else {
                build_irreducible(Family::B, q as usize, &mults(&[(Short, pp - q), (Long, 1)]))
            }
        },
        dim_m: |ps| p(ps, "p") as u64 * p(ps, "q") as u64,
    },
    CatalogEntry {
        name: "Sp(p+q)/Sp(p)xSp(q)",
        family: "BC (p>q) or C (p=q)",
        rank_rule: "q",
        multiplicities: "e_i: 4(p-q), e_i+-e_j: 4, 2e_i: 3",
        dim_formula: "4pq",
        params: &["p", "q"],
        test_range: || range_pq(5, 2),
        check: p_ge_q,
        build: |ps| {
            let (pp, q) = (p(ps, "p"), p(ps, "q"));
            bc_or_c(q as usize, 4 * (pp - q), 4, 3)
        },
        dim_m: |ps| 4 * p(ps, "p") as u64 * p(ps, "q") as u64,
    },
    CatalogEntry {
        name: "SO(2n)/U(n)",
        family: "C (n even) or BC (n odd)",
        rank_rule: "floor(n/2)",
        multiplicities: "e_i: 4 (n odd), e_i+-e_j: 4, 2e_i: 1",
        dim_formula: "n(n-1)",
        params: &["n"],
        test_range: || range_n(2, 9),
        check: |ps| n_at_least(ps, 2),
        build: |ps| {
            let n = p(ps, "n");
            bc_or_c((n / 2) as usize, if n % 2 == 1 { 4 } else { 0 }, 4, 1)
        },
        dim_m: |ps| {
            let n = p(ps, "n") as u64;
            n * (n - 1)
        },
    },
    CatalogEntry {
        name: "Sp(n)/U(n)",
        family: "C",
        rank_rule: "n",
        multiplicities: "m=1",
        dim_formula: "n(n+1)",
        params: &["n"],
        test_range: || range_n(1, 6),
        check: |ps| n_at_least(ps, 1),
        build: |ps| uniform(Family::C, p(ps, "n") as usize, 1),
        dim_m: |ps| {
            let n = p(ps, "n") as u64;
            n * (n + 1)
        },
    },
    CatalogEntry {
        name: "G2/SO(4)",
        family: "G2",
        rank_rule: "2",
        multiplicities: "m=1",
        dim_formula: "8",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::G, 2, 1),
        dim_m: |_| 8,
    },
    CatalogEntry {
        name: "F4/Sp(3)Sp(1)",
        family: "F4",
        rank_rule: "4",
        multiplicities: "m=1",
        dim_formula: "28",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::F, 4, 1),
        dim_m: |_| 28,
    },
    CatalogEntry {
        name: "F4/Spin(9)",
        family: "BC1",
        rank_rule: "1",
        multiplicities: "e: 8, 2e: 7",
        dim_formula: "16",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| build_irreducible(Family::BC, 1, &mults(&[(Short, 8), (Double, 7)])),
        dim_m: |_| 16,
    },
    CatalogEntry {
        name: "E6/Sp(4)",
        family: "E6",
        rank_rule: "6",
        multiplicities: "m=1",
        dim_formula: "42",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::E, 6, 1),
        dim_m: |_| 42,
    },
    CatalogEntry {
        name: "E6/SU(6)Sp(1)",
        family: "F4",
        rank_rule: "4",
        multiplicities: "short: 2, long: 1",
        dim_formula: "40",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| build_irreducible(Family::F, 4, &mults(&[(Short, 2), (Long, 1)])),
        dim_m: |_| 40,
    },
    CatalogEntry {
        name: "E6/Spin(10)U(1)",
        family: "BC2",
        rank_rule: "2",
        multiplicities: "e_i: 8, e_i+-e_j: 6, 2e_i: 1",
        dim_formula: "32",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| bc_or_c(2, 8, 6, 1),
        dim_m: |_| 32,
    },
    CatalogEntry {
        name: "E6/F4",
        family: "A2",
        rank_rule: "2",
        multiplicities: "m=8",
        dim_formula: "26",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::A, 2, 8),
        dim_m: |_| 26,
    },
    CatalogEntry {
        name: "E7/SU(8)",
        family: "E7",
        rank_rule: "7",
        multiplicities: "m=1",
        dim_formula: "70",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::E, 7, 1),
        dim_m: |_| 70,
    },
    CatalogEntry {
        name: "E7/SO(12)Sp(1)",
        family: "F4",
        rank_rule: "4",
        multiplicities: "short: 4, long: 1",
        dim_formula: "64",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| build_irreducible(Family::F, 4, &mults(&[(Short, 4), (Long, 1)])),
        dim_m: |_| 64,
    },
    CatalogEntry {
        name: "E7/E6U(1)",
        family: "C3",
        rank_rule: "3",
        multiplicities: "e_i+-e_j: 8, 2e_i: 1",
        dim_formula: "54",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| bc_or_c(3, 0, 8, 1),
        dim_m: |_| 54,
    },
    CatalogEntry {
        name: "E8/SO(16)",
        family: "E8",
        rank_rule: "8",
        multiplicities: "m=1",
        dim_formula: "128",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::E, 8, 1),
        dim_m: |_| 128,
    },
    CatalogEntry {
        name: "E8/E7Sp(1)",
        family: "F4",
        rank_rule: "4",
        multiplicities: "short: 8, long: 1",
        dim_formula: "112",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| build_irreducible(Family::F, 4, &mults(&[(Short, 8), (Long, 1)])),
        dim_m: |_| 112,
    },
    // group manifolds (K x K)/K: the root system of K, every multiplicity 2
    CatalogEntry {
        name: "SU(n)xSU(n)/SU(n)",
        family: "A",
        rank_rule: "n-1",
        multiplicities: "m=2",
        dim_formula: "n^2-1",
        params: &["n"],
        test_range: || range_n(2, 6),
        check: |ps| n_at_least(ps, 2),
        build: |ps| uniform(Family::A, p(ps, "n") as usize - 1, 2),
        dim_m: |ps| {
            let n = p(ps, "n") as u64;
            n * n - 1
        },
    },
    CatalogEntry {
        name: "SO(2n+1)xSO(2n+1)/SO(2n+1)",
        family: "B",
        rank_rule: "n",
        multiplicities: "m=2",
        dim_formula: "n(2n+1)",
        params: &["n"],
        test_range: || range_n(1, 5),
        check: |ps| n_at_least(ps, 1),
        build: |ps| uniform(Family::B, p(ps, "n") as usize, 2),
        dim_m: |ps| {
            let n = p(ps, "n") as u64;
            n * (2 * n + 1)
        },
    },
    CatalogEntry {
        name: "Sp(n)xSp(n)/Sp(n)",
        family: "C",
        rank_rule: "n",
        multiplicities: "m=2",
        dim_formula: "n(2n+1)",
        params: &["n"],
        test_range: || range_n(1, 5),
        check: |ps| n_at_least(ps, 1),
        build: |ps| uniform(Family::C, p(ps, "n") as usize, 2),
        dim_m: |ps| {
            let n = p(ps, "n") as u64;
            n * (2 * n + 1)
        },
    },
    CatalogEntry {
        name: "SO(2n)xSO(2n)/SO(2n)",
        family: "D",
        rank_rule: "n",
        multiplicities: "m=2",
        dim_formula: "n(2n-1)",
        params: &["n"],
        test_range: || range_n(2, 5),
        check: |ps| n_at_least(ps, 2),
        build: |ps| uniform(Family::D, p(ps, "n") as usize, 2),
        dim_m: |ps| {
            let n = p(ps, "n") as u64;
            n * (2 * n - 1)
        },
    },
    CatalogEntry {
        name: "G2xG2/G2",
        family: "G2",
        rank_rule: "2",
        multiplicities: "m=2",
        dim_formula: "14",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::G, 2, 2),
        dim_m: |_| 14,
    },
    CatalogEntry {
        name: "F4xF4/F4",
        family: "F4",
        rank_rule: "4",
        multiplicities: "m=2",
        dim_formula: "52",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::F, 4, 2),
        dim_m: |_| 52,
    },
    CatalogEntry {
        name: "E6xE6/E6",
        family: "E6",
        rank_rule: "6",
        multiplicities: "m=2",
        dim_formula: "78",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::E, 6, 2),
        dim_m: |_| 78,
    },
    CatalogEntry {
        name: "E7xE7/E7",
        family: "E7",
        rank_rule: "7",
        multiplicities: "m=2",
        dim_formula: "133",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::E, 7, 2),
        dim_m: |_| 133,
    },
    CatalogEntry {
        name: "E8xE8/E8",
        family: "E8",
        rank_rule: "8",
        multiplicities: "m=2",
        dim_formula: "248",
        params: &[],
        test_range: none,
        check: ok,
        build: |_| uniform(Family::E, 8, 2),
        dim_m: |_| 248,
    },
];

/// All entries, in a fixed order.
pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

fn normalize_name(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            if c == '×' {
                'x'
            } else {
                c.to_ascii_lowercase()
            }
        })
        .collect()
}

pub fn find(name: &str) -> Option<&'static CatalogEntry> {
    let key = normalize_name(name);
    ENTRIES.iter().find(|e| normalize_name(e.name) == key)
}

/// Evaluates `2n+1`, `p+q`, `n` and similar parameter expressions.
fn eval_expr(expr: &str, params: &Params) -> Option<u64> {
    let mut total = 0u64;
    for term in expr.split('+') {
        let digits: String = term.chars().take_while(|c| c.is_ascii_digit()).collect();
        let var = &term[digits.len()..];
        let coef: u64 = if digits.is_empty() {
            1
        } else {
            digits.parse().ok()?
        };
        total += match var {
            "" if !digits.is_empty() => coef,
            v => coef * *params.get(v)? as u64,
        };
    }
    Some(total)
}

/// Substitutes parameters into an entry name, e.g. `SU(2n)/Sp(n)` with
/// `n = 2` gives `SU(4)/Sp(2)`.
pub fn render_name(template: &str, params: &Params) -> String {
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('(') {
        out.push_str(&rest[..=open]);
        rest = &rest[open + 1..];
        let close = rest.find(')').unwrap_or(rest.len());
        let inner = &rest[..close];
        if !inner.contains('(') {
            if let Some(v) = eval_expr(inner, params) {
                out.push_str(&v.to_string());
                rest = &rest[close..];
            }
        }
    }
    out.push_str(rest);
    out
}

const MAX_RESOLVE: u32 = 64;

/// Resolves a name such as `SU(3)/SO(3)` to its entry and parameters.
pub fn resolve(name: &str) -> Option<(&'static CatalogEntry, Params)> {
    let key = normalize_name(name);
    for e in ENTRIES {
        let candidates: Vec<Params> = match e.params {
            [] => vec![Params::new()],
            [a] => (1..=MAX_RESOLVE).map(|v| one(a, v)).collect(),
            [a, b] => (1..=MAX_RESOLVE)
                .flat_map(|x| {
                    (1..=MAX_RESOLVE).map(move |y| {
                        [(a.to_string(), x), (b.to_string(), y)]
                            .into_iter()
                            .collect()
                    })
                })
                .collect(),
            _ => continue,
        };
        for ps in candidates {
            if normalize_name(&render_name(e.name, &ps)) == key && (e.check)(&ps).is_ok() {
                return Some((e, ps));
            }
        }
    }
    None
}

/// Instantiates a catalog entry and checks the dimension identity.
///
/// `name` is either an entry name with `params`, or a concrete name such as
/// `SU(3)/SO(3)` with `params` empty.
pub fn lookup(name: &str, params: &Params) -> Result<RootSystem> {
    let (entry, params) = match find(name) {
        Some(e) => (e, params.clone()),
        None => match resolve(name) {
            Some((e, ps)) if params.is_empty() => (e, ps),
            Some((e, _)) => {
                return Err(Error::InvalidParameters {
                    name: e.name.into(),
                    reason: "parameters are already fixed by the name".into(),
                })
            }
            None => return Err(Error::UnknownEntry(name.to_string())),
        },
    };
    let rs = entry.instantiate(&params)?;
    let lhs = rs.rank() as u64 + rs.total_multiplicity();
    let rhs = entry.dim_m(&params);
    if lhs != rhs {
        return Err(Error::InvalidParameters {
            name: entry.name.into(),
            reason: format!("dimension identity fails: rank + sum m = {lhs}, dim m = {rhs}"),
        });
    }
    Ok(rs)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_coords(tokens: &[&str], d: usize, line: usize) -> Result<Root> {
    if tokens.len() != d {
        return Err(parse_err(
            line,
            format!("expected {d} coordinates, found {}", tokens.len()),
        ));
    }
    tokens
        .iter()
        .map(|t| parse_rational(t).ok_or_else(|| parse_err(line, format!("bad rational '{t}'"))))
        .collect::<Result<Vec<_>>>()
        .map(Root)
}

/// Parses the text format described in the module docs.
pub fn parse_custom(text: &str, label: &str) -> Result<RootSystem> {
    let mut ambient: Option<usize> = None;
    let mut rank: Option<usize> = None;
    let mut simple = Vec::new();
    let mut positive = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&kw, rest)) = tokens.split_first() else {
            continue;
        };
        let int = |rest: &[&str], what: &str| -> Result<usize> {
            match rest {
                [v] => v.parse::<usize>().ok().filter(|&x| x > 0).ok_or_else(|| {
                    parse_err(
                        line,
                        format!("{what} must be a positive integer, got '{v}'"),
                    )
                }),
                _ => Err(parse_err(line, format!("{what} takes exactly one value"))),
            }
        };
        match kw {
            "ambient_dim" => ambient = Some(int(rest, "ambient_dim")?),
            "rank" => {
                if ambient.is_none() {
                    return Err(parse_err(line, "'rank' must follow 'ambient_dim'"));
                }
                rank = Some(int(rest, "rank")?)
            }
            "simple" | "root" => {
                let (Some(d), Some(_)) = (ambient, rank) else {
                    return Err(parse_err(
                        line,
                        format!("'{kw}' before 'ambient_dim' and 'rank'"),
                    ));
                };
                if kw == "simple" {
                    if !positive.is_empty() {
                        return Err(parse_err(line, "'simple' lines must precede 'root' lines"));
                    }
                    simple.push(parse_coords(rest, d, line)?);
                } else {
                    let pos = rest
                        .iter()
                        .position(|&t| t == "mult")
                        .ok_or_else(|| parse_err(line, "root line needs 'mult <m>'"))?;
                    let root = parse_coords(&rest[..pos], d, line)?;
                    let m = int(&rest[pos + 1..], "mult")?;
                    positive.push(PositiveRoot {
                        root,
                        multiplicity: m as u32,
                    });
                }
            }
            other => return Err(parse_err(line, format!("unknown keyword '{other}'"))),
        }
    }
    let d = ambient.ok_or_else(|| parse_err(0, "missing 'ambient_dim'"))?;
    let r = rank.ok_or_else(|| parse_err(0, "missing 'rank'"))?;
    if positive.is_empty() {
        return Err(parse_err(0, "no 'root' lines"));
    }
    RootSystem::new(label, d, r, simple, positive)
}

/// Reads and validates a custom root-system file.
pub fn load_custom(path: impl AsRef<Path>) -> Result<RootSystem> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "custom".into());
    parse_custom(&text, &label)
}
