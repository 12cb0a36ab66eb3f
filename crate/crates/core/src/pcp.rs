//! Weighted three-variable parity systems (MAX-E3-LIN2), their reduction to
//! transversal games, and the witness <-> linear strategy correspondence.
//!
//! Each equation `w_i ^ w_j ^ w_k = c` becomes a game clause with offset
//! `z = e_i ^ e_j ^ e_k` and label `r = c`, so `g(z, r) = r`. A witness `w`
//! plays as the linear strategy `(u = w, gamma = 0)`, and a linear strategy
//! `(u, gamma)` reads back as the witness `u ^ gamma * 1...1`; on weight-3
//! offsets the three copies of `gamma` collapse to one, so both maps preserve
//! the acceptance probability.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::games::{content_lines, parse_m_line, parse_weight, GameClause, TransversalGame, WEIGHT_TOLERANCE};
use crate::gf2::{self, BitVector, MAX_LEN};
use crate::rng::RngState;
use crate::strategies::LinearStrategy;

pub const MIN_VARS: usize = 3;

/// Largest `m` accepted by [`best_witness`].
pub const WITNESS_SCAN_CAP: usize = MAX_LEN;

/// `w_i ^ w_j ^ w_k = c` with 1-based indices, stored with `i < j < k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: bool,
    pub weight: f64,
}

impl Equation {
    pub fn new(i: usize, j: usize, k: usize, c: bool, weight: f64) -> Self {
        Equation { i, j, k, c, weight }
    }

    /// `e_i ^ e_j ^ e_k` as a raw word.
    fn mask(&self) -> u32 {
        (1 << (self.i - 1)) | (1 << (self.j - 1)) | (1 << (self.k - 1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeLinInstance {
    m: usize,
    equations: Vec<Equation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Witness(pub BitVector);

impl ThreeLinInstance {
    /// Sorts each triple, merges repeated `(i, j, k, c)` entries and rescales
    /// weights that sum to 1 within [`WEIGHT_TOLERANCE`].
    pub fn new(m: usize, equations: Vec<Equation>) -> Result<Self> {
        let mut inst = Self::merged(m, equations)?;
        let total: f64 = inst.equations.iter().map(|e| e.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::validation(format!("equation weights sum to {total}, expected 1")));
        }
        inst.rescale(total);
        Ok(inst)
    }

    /// Like [`ThreeLinInstance::new`] but accepts any positive total weight.
    pub fn normalized(m: usize, equations: Vec<Equation>) -> Result<Self> {
        let mut inst = Self::merged(m, equations)?;
        let total: f64 = inst.equations.iter().map(|e| e.weight).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::validation(format!("total equation weight {total}")));
        }
        inst.rescale(total);
        Ok(inst)
    }

    fn merged(m: usize, equations: Vec<Equation>) -> Result<Self> {
        if m < MIN_VARS {
            return Err(Error::validation(format!("{m} variables, need at least {MIN_VARS}")));
        }
        if m > MAX_LEN {
            return Err(Error::capacity("3-LIN variable count", m, MAX_LEN));
        }
        let mut index: HashMap<(usize, usize, usize, bool), usize> = HashMap::new();
        let mut out: Vec<Equation> = Vec::with_capacity(equations.len());
        for e in equations {
            let mut t = [e.i, e.j, e.k];
            t.sort_unstable();
            let [i, j, k] = t;
            if i == j || j == k {
                return Err(Error::validation(format!("equation indices {i}, {j}, {k} not distinct")));
            }
            if i == 0 || k > m {
                return Err(Error::IndexOutOfRange { index: if i == 0 { 0 } else { k }, len: m });
            }
            if !(e.weight >= 0.0) || !e.weight.is_finite() {
                return Err(Error::validation(format!("equation weight {}", e.weight)));
            }
            match index.get(&(i, j, k, e.c)) {
                Some(&at) => out[at].weight += e.weight,
                None => {
                    index.insert((i, j, k, e.c), out.len());
                    out.push(Equation::new(i, j, k, e.c, e.weight));
                }
            }
        }
        if out.is_empty() {
            return Err(Error::validation("instance has no equations"));
        }
        Ok(ThreeLinInstance { m, equations: out })
    }

    fn rescale(&mut self, total: f64) {
        if total != 1.0 {
            for e in &mut self.equations {
                e.weight /= total;
            }
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Parses the `3lin v1` text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (n, header) = lines.next().ok_or_else(|| Error::parse(1, "empty instance file"))?;
        if header != "3lin v1" {
            return Err(Error::parse(n, format!("expected header `3lin v1`, found {header:?}")));
        }
        let (n, mline) = lines.next().ok_or_else(|| Error::parse(n + 1, "missing `m <integer>` line"))?;
        let m = parse_m_line(n, mline)?;
        let mut eqs = Vec::new();
        for (n, line) in lines {
            let tok: Vec<&str> = line.split_whitespace().collect();
            let ["eq", i, j, k, c, w] = tok[..] else {
                return Err(Error::parse(n, format!("expected `eq <i> <j> <k> <c> <weight>`, found {line:?}")));
            };
            let idx = |s: &str| {
                s.parse::<usize>()
                    .ok()
                    .filter(|&v| v >= 1 && v <= m)
                    .ok_or_else(|| Error::parse(n, format!("bad index {s:?} for m = {m}")))
            };
            let (i, j, k) = (idx(i)?, idx(j)?, idx(k)?);
            if i == j || j == k || i == k {
                return Err(Error::parse(n, "indices must be distinct"));
            }
            let c = match c {
                "0" => false,
                "1" => true,
                _ => return Err(Error::parse(n, format!("bad right-hand side {c:?}"))),
            };
            let w = parse_weight(w).ok_or_else(|| Error::parse(n, format!("bad weight {w:?}")))?;
            eqs.push(Equation::new(i, j, k, c, w));
        }
        ThreeLinInstance::new(m, eqs)
    }

    /// Renders the `3lin v1` format, optionally recording a planted witness
    /// as a `# planted w=<bits>` comment.
    pub fn to_text(&self, planted: Option<&Witness>) -> String {
        let mut s = String::from("3lin v1\n");
        if let Some(w) = planted {
            writeln!(s, "# planted w={}", w.0).unwrap();
        }
        writeln!(s, "m {}", self.m).unwrap();
        for e in &self.equations {
            writeln!(s, "eq {} {} {} {} {}", e.i, e.j, e.k, u8::from(e.c), e.weight).unwrap();
        }
        s
    }
}

/// Reads a `# planted w=<bits>` comment, if present.
pub fn planted_witness(text: &str) -> Option<Witness> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .filter_map(|l| l.trim().strip_prefix("planted w="))
        .find_map(|b| b.trim().parse::<BitVector>().ok())
        .map(Witness)
}

/// Weighted fraction of satisfied equations.
pub fn witness_value(inst: &ThreeLinInstance, w: &Witness) -> Result<f64> {
    if w.0.len() != inst.m {
        return Err(Error::Dimension { expected: inst.m, found: w.0.len() });
    }
    let bits = w.0.bits();
    Ok(inst
        .equations
        .iter()
        .filter(|e| gf2::parity(bits & e.mask()) == e.c)
        .map(|e| e.weight)
        .sum())
}

/// Exhaustive search over all 2^m witnesses; the smallest encoding wins ties.
pub fn best_witness(inst: &ThreeLinInstance) -> Result<(Witness, f64)> {
    if inst.m > WITNESS_SCAN_CAP {
        return Err(Error::capacity("witness scan", inst.m, WITNESS_SCAN_CAP));
    }
    let eqs: Vec<(u32, bool, f64)> = inst.equations.iter().map(|e| (e.mask(), e.c, e.weight)).collect();
    let score = |w: u32| -> f64 {
        eqs.iter()
            .filter(|(z, c, _)| gf2::parity(w & z) == *c)
            .map(|(_, _, wt)| wt)
            .sum()
    };
    let (value, best) = (0..1u32 << inst.m)
        .into_par_iter()
        .map(|w| (score(w), w))
        .reduce(
            || (f64::NEG_INFINITY, u32::MAX),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    Ok((Witness(BitVector::from_raw(best, inst.m)), value))
}

pub fn game_from_instance(inst: &ThreeLinInstance) -> TransversalGame {
    let clauses = inst
        .equations
        .iter()
        .map(|e| GameClause::new(BitVector::from_raw(e.mask(), inst.m), u32::from(e.c), e.c, e.weight))
        .collect();
    TransversalGame::from_parts_unchecked(inst.m, clauses)
}

pub fn witness_to_linear(w: &Witness) -> LinearStrategy {
    LinearStrategy::new(w.0, false)
}

pub fn linear_to_witness(strat: &LinearStrategy) -> Witness {
    let m = strat.u.len();
    let flip = if strat.gamma_alice { gf2::mask(m) } else { 0 };
    Witness(BitVector::from_raw(strat.u.bits() ^ flip, m))
}

fn random_triple(m: usize, rng: &mut RngState) -> (usize, usize, usize) {
    let mut picked = [0usize; 3];
    let mut n = 0;
    while n < 3 {
        let v = rng.below(m as u64) as usize + 1;
        if !picked[..n].contains(&v) {
            picked[n] = v;
            n += 1;
        }
    }
    picked.sort_unstable();
    (picked[0], picked[1], picked[2])
}

fn check_gen(m: usize, eqs: usize) -> Result<()> {
    if !(MIN_VARS..=MAX_LEN).contains(&m) {
        return Err(Error::capacity("generator m", m, MAX_LEN));
    }
    if eqs == 0 {
        return Err(Error::validation("equation count must be at least 1"));
    }
    Ok(())
}

/// `eqs` equally weighted random equations all satisfied by a random planted witness.
pub fn planted_instance(m: usize, eqs: usize, rng: &mut RngState) -> Result<(ThreeLinInstance, Witness)> {
    check_gen(m, eqs)?;
    let w = BitVector::from_raw(rng.bits(m), m);
    let list = (0..eqs)
        .map(|_| {
            let (i, j, k) = random_triple(m, rng);
            let e = Equation::new(i, j, k, false, 1.0);
            Equation { c: gf2::parity(w.bits() & e.mask()), ..e }
        })
        .collect();
    Ok((ThreeLinInstance::normalized(m, list)?, Witness(w)))
}

/// `pairs` random triples, each emitted with both right-hand sides at equal weight.
pub fn contradictory_instance(m: usize, pairs: usize, rng: &mut RngState) -> Result<ThreeLinInstance> {
    check_gen(m, pairs)?;
    let mut list = Vec::with_capacity(2 * pairs);
    for _ in 0..pairs {
        let (i, j, k) = random_triple(m, rng);
        list.push(Equation::new(i, j, k, false, 1.0));
        list.push(Equation::new(i, j, k, true, 1.0));
    }
    ThreeLinInstance::normalized(m, list)
}

/// `eqs` equally weighted random equations with uniform right-hand sides.
pub fn random_instance(m: usize, eqs: usize, rng: &mut RngState) -> Result<ThreeLinInstance> {
    check_gen(m, eqs)?;
    let list = (0..eqs)
        .map(|_| {
            let (i, j, k) = random_triple(m, rng);
            Equation::new(i, j, k, rng.bit(), 1.0)
        })
        .collect();
    ThreeLinInstance::normalized(m, list)
}
