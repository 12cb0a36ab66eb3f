//! Transversal XOR games and their spectral analysis.
//!
//! A transversal game hands Alice a uniform `s` and Bob `t = s ^ z`, where
//! `(z, r)` is drawn from a weighted clause list; the verifier accepts when
//! `a ^ b == g(z, r)`. Acceptance depends on the questions only through `z`,
//! so the game is summarized by the signed offset weights
//! `theta[z] = sum_r w(z, r) * (-1)^g(z, r) / 2`. Their Walsh-Hadamard
//! transform `lambda[u]` is the advantage over 1/2 of the linear strategy
//! `a = u.s ^ gamma, b = u.t`, and the largest `|lambda[u]|` is the value of
//! the game against classical and entangled provers alike.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::gf2::{self, BitVector, MAX_LEN};
use crate::rng::RngState;

/// Tolerated deviation of the total clause weight from 1 at load time.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Largest `m` for which dense 2^m x 2^m operators are built.
pub const DENSE_CAP: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct GameClause {
    pub z: BitVector,
    /// Auxiliary label; only its joint weight with `z` matters.
    pub r: u32,
    pub weight: f64,
    /// `g(z, r)`.
    pub gbit: bool,
}

impl GameClause {
    pub fn new(z: BitVector, r: u32, gbit: bool, weight: f64) -> Self {
        GameClause { z, r, weight, gbit }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransversalGame {
    m: usize,
    clauses: Vec<GameClause>,
}

impl TransversalGame {
    /// Validates and canonicalizes a clause list.
    ///
    /// Duplicate `(z, r)` pairs are merged (first occurrence keeps its
    /// position), conflicting `g` values for one pair are rejected, and the
    /// weights are rescaled to sum to exactly 1 provided they already sum to
    /// 1 within [`WEIGHT_TOLERANCE`].
    pub fn new(m: usize, clauses: Vec<GameClause>) -> Result<Self> {
        let mut game = Self::merged(m, clauses)?;
        let total: f64 = game.clauses.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::validation(format!(
                "clause weights sum to {total}, expected 1"
            )));
        }
        game.rescale(total);
        Ok(game)
    }

    /// Like [`TransversalGame::new`] but accepts any positive total weight.
    pub fn normalized(m: usize, clauses: Vec<GameClause>) -> Result<Self> {
        let mut game = Self::merged(m, clauses)?;
        let total: f64 = game.clauses.iter().map(|c| c.weight).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::validation(format!("total clause weight {total}")));
        }
        game.rescale(total);
        Ok(game)
    }

    /// For clause lists already known to be merged and normalized.
    pub(crate) fn from_parts_unchecked(m: usize, clauses: Vec<GameClause>) -> Self {
        TransversalGame { m, clauses }
    }

    fn merged(m: usize, clauses: Vec<GameClause>) -> Result<Self> {
        if m == 0 || m > MAX_LEN {
            return Err(Error::capacity("game question length", m, MAX_LEN));
        }
        let mut index: HashMap<(u32, u32), usize> = HashMap::new();
        let mut out: Vec<GameClause> = Vec::with_capacity(clauses.len());
        for c in clauses {
            if c.z.len() != m {
                return Err(Error::Dimension { expected: m, found: c.z.len() });
            }
            if !(c.weight >= 0.0) || !c.weight.is_finite() {
                return Err(Error::validation(format!("clause weight {}", c.weight)));
            }
            match index.get(&(c.z.bits(), c.r)) {
                Some(&at) => {
                    if out[at].gbit != c.gbit {
                        return Err(Error::validation(format!(
                            "conflicting g for z={} r={}",
                            c.z, c.r
                        )));
                    }
                    out[at].weight += c.weight;
                }
                None => {
                    index.insert((c.z.bits(), c.r), out.len());
                    out.push(c);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::validation("game has no clauses"));
        }
        Ok(TransversalGame { m, clauses: out })
    }

    fn rescale(&mut self, total: f64) {
        if total != 1.0 {
            for c in &mut self.clauses {
                c.weight /= total;
            }
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn clauses(&self) -> &[GameClause] {
        &self.clauses
    }

    /// Parses the `txg v1` text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (n, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty game file"))?;
        if header != "txg v1" {
            return Err(Error::parse(n, format!("expected header `txg v1`, found {header:?}")));
        }
        let (n, mline) = lines
            .next()
            .ok_or_else(|| Error::parse(n + 1, "missing `m <integer>` line"))?;
        let m = parse_m_line(n, mline)?;
        let mut clauses = Vec::new();
        for (n, line) in lines {
            clauses.push(parse_clause(n, line, m)?);
        }
        TransversalGame::new(m, clauses)
    }

    /// Renders the `txg v1` text format; `parse(to_text())` reproduces the game.
    pub fn to_text(&self) -> String {
        let mut s = format!("txg v1\nm {}\n", self.m);
        for c in &self.clauses {
            writeln!(
                s,
                "clause z={} r={} g={} w={}",
                c.z,
                c.r,
                u8::from(c.gbit),
                c.weight
            )
            .unwrap();
        }
        s
    }
}

/// Non-blank lines with `#` comments dropped, paired with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_m_line(n: usize, line: &str) -> Result<usize> {
    let mut it = line.split_whitespace();
    let m = match (it.next(), it.next(), it.next()) {
        (Some("m"), Some(v), None) => v
            .parse::<usize>()
            .map_err(|_| Error::parse(n, format!("bad m value {v:?}")))?,
        _ => return Err(Error::parse(n, format!("expected `m <integer>`, found {line:?}"))),
    };
    if m == 0 {
        return Err(Error::parse(n, "m must be at least 1"));
    }
    if m > MAX_LEN {
        return Err(Error::capacity("question length", m, MAX_LEN));
    }
    Ok(m)
}

fn parse_clause(n: usize, line: &str, m: usize) -> Result<GameClause> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("clause") {
        return Err(Error::parse(n, format!("expected `clause ...`, found {line:?}")));
    }
    let (mut z, mut r, mut g, mut w) = (None, None, None, None);
    for tok in tokens {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(n, format!("expected key=value, found {tok:?}")))?;
        let slot_taken = match key {
            "z" => {
                let v: BitVector = val
                    .parse()
                    .map_err(|e| Error::parse(n, format!("bad z: {e}")))?;
                if v.len() != m {
                    return Err(Error::parse(n, format!("z has length {}, expected {m}", v.len())));
                }
                z.replace(v).is_some()
            }
            "r" => r
                .replace(val.parse::<u32>().map_err(|_| Error::parse(n, format!("bad r {val:?}")))?)
                .is_some(),
            "g" => {
                let bit = match val {
                    "0" => false,
                    "1" => true,
                    _ => return Err(Error::parse(n, format!("bad g {val:?}"))),
                };
                g.replace(bit).is_some()
            }
            "w" => {
                let x = parse_weight(val).ok_or_else(|| Error::parse(n, format!("bad weight {val:?}")))?;
                w.replace(x).is_some()
            }
            _ => return Err(Error::parse(n, format!("unknown key {key:?}"))),
        };
        if slot_taken {
            return Err(Error::parse(n, format!("duplicate key {key:?}")));
        }
    }
    match (z, r, g, w) {
        (Some(z), Some(r), Some(g), Some(w)) => Ok(GameClause::new(z, r, g, w)),
        _ => Err(Error::parse(n, "clause needs z=, r=, g= and w=")),
    }
}

/// Finite, non-negative decimal.
pub(crate) fn parse_weight(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|w| w.is_finite() && *w >= 0.0)
}

/// Exact spectral summary of a game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameAnalysis {
    pub theta: Vec<f64>,
    pub lambda: Vec<f64>,
    pub u_star: BitVector,
    pub gamma_star: bool,
    pub value: f64,
}

pub fn theta_of(game: &TransversalGame) -> Vec<f64> {
    let mut theta = vec![0.0; 1 << game.m];
    for c in &game.clauses {
        let half = 0.5 * c.weight;
        theta[c.z.index()] += if c.gbit { -half } else { half };
    }
    theta
}

/// Computes the game value and an optimal linear strategy.
///
/// `u_star` maximizes `|lambda[u]|`, smallest encoding first among ties;
/// `gamma_star` is set exactly when `lambda[u_star] < 0`.
pub fn analyze(game: &TransversalGame) -> Result<GameAnalysis> {
    if game.m > MAX_LEN {
        return Err(Error::capacity("analyze", game.m, MAX_LEN));
    }
    let theta = theta_of(game);
    let lambda = gf2::fwht(&theta)?;
    let mut best = 0usize;
    for (u, l) in lambda.iter().enumerate().skip(1) {
        if l.abs() > lambda[best].abs() {
            best = u;
        }
    }
    let top = lambda[best];
    Ok(GameAnalysis {
        u_star: BitVector::from_raw(best as u32, game.m),
        gamma_star: top < 0.0,
        value: 0.5 + top.abs(),
        theta,
        lambda,
    })
}

/// Dense operator with entry `(s, s ^ z) = theta[z]`.
pub fn phi_matrix(game: &TransversalGame) -> Result<DMatrix<f64>> {
    if game.m > DENSE_CAP {
        return Err(Error::capacity("dense operator", game.m, DENSE_CAP));
    }
    let theta = theta_of(game);
    let n = theta.len();
    Ok(DMatrix::from_fn(n, n, |s, t| theta[s ^ t]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// `max_u |Phi h_u - lambda_u h_u|_2 / 2^(m/2)`.
    pub max_residual: f64,
    /// `max_u |lambda_u|` from the transform.
    pub transform_norm: f64,
    /// Largest `|eigenvalue|` from a dense symmetric eigensolve.
    pub operator_norm: f64,
    pub norm_gap: f64,
}

/// Checks that every Hadamard vector is an eigenvector of the dense operator
/// with the transform's eigenvalue, and that the operator norm from an
/// independent eigensolve matches `max |lambda|`.
pub fn verify_spectrum(game: &TransversalGame) -> Result<SpectrumReport> {
    let phi = phi_matrix(game)?;
    let lambda = gf2::fwht(&theta_of(game))?;
    let n = lambda.len();
    let hadamard = DMatrix::from_fn(n, n, |v, u| {
        if gf2::parity((u & v) as u32) {
            -1.0
        } else {
            1.0
        }
    });
    let images = &phi * &hadamard;
    let scale = (n as f64).sqrt();
    let max_residual = (0..n)
        .map(|u| {
            let r = images.column(u) - hadamard.column(u) * lambda[u];
            r.norm() / scale
        })
        .fold(0.0, f64::max);
    let transform_norm = lambda.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let operator_norm = SymmetricEigen::new(phi)
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, e| a.max(e.abs()));
    Ok(SpectrumReport {
        max_residual,
        transform_norm,
        operator_norm,
        norm_gap: (transform_norm - operator_norm).abs(),
    })
}

/// Random game with `clauses` draws of `(z, r, g, w)`; `r` ranges over
/// `0..labels`. A repeated `(z, r)` reuses its first `g`, so the result is
/// always valid.
pub fn random_game(m: usize, clauses: usize, labels: u32, rng: &mut RngState) -> Result<TransversalGame> {
    let mut seen: HashMap<(u32, u32), bool> = HashMap::new();
    let mut list = Vec::with_capacity(clauses);
    for _ in 0..clauses {
        let z = BitVector::from_raw(rng.bits(m), m);
        let r = rng.below(u64::from(labels.max(1))) as u32;
        let g = *seen.entry((z.bits(), r)).or_insert_with(|| rng.bit());
        // Keep weights away from zero so every clause matters.
        let w = 0.05 + rng.next_f64();
        list.push(GameClause::new(z, r, g, w));
    }
    TransversalGame::normalized(m, list)
}
