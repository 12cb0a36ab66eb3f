//! Prover strategies and exact acceptance probabilities.
//!
//! Deterministic and linear strategies are scored exactly; the brute-force
//! search here is an oracle that shares no code with the spectral analysis in
//! [`crate::games`].

mod quantum;

pub use quantum::{eval_quantum, random_quantum_strategy, QuantumStrategy, MAX_LOCAL_DIM};

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::games::{content_lines, parse_m_line, theta_of, TransversalGame};
use crate::gf2::{self, BitVector, MAX_LEN};

/// Largest `m` accepted by [`brute_force_classical_value`].
pub const BRUTE_FORCE_CAP: usize = 4;

/// One prover's answer table over all 2^m questions, indexed by encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicStrategy {
    m: usize,
    answers: Vec<bool>,
}

impl DeterministicStrategy {
    pub fn new(m: usize, answers: Vec<bool>) -> Result<Self> {
        if m == 0 || m > MAX_LEN {
            return Err(Error::capacity("answer table", m, MAX_LEN));
        }
        if answers.len() != 1 << m {
            return Err(Error::Dimension { expected: 1 << m, found: answers.len() });
        }
        Ok(DeterministicStrategy { m, answers })
    }

    pub fn constant(m: usize, bit: bool) -> Result<Self> {
        Self::from_fn(m, |_| bit)
    }

    pub fn from_fn(m: usize, f: impl Fn(BitVector) -> bool) -> Result<Self> {
        let answers = BitVector::all(m)?.map(f).collect();
        Ok(DeterministicStrategy { m, answers })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn answers(&self) -> &[bool] {
        &self.answers
    }

    #[inline]
    pub fn answer(&self, question: &BitVector) -> bool {
        self.answers[question.index()]
    }
}

/// `a = u.s ^ gamma_alice`, `b = u.t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearStrategy {
    pub u: BitVector,
    pub gamma_alice: bool,
}

impl LinearStrategy {
    pub fn new(u: BitVector, gamma_alice: bool) -> Self {
        LinearStrategy { u, gamma_alice }
    }

    pub fn alice_table(&self) -> DeterministicStrategy {
        let u = self.u.bits();
        let g = self.gamma_alice;
        DeterministicStrategy::from_fn(self.u.len(), |s| gf2::parity(u & s.bits()) ^ g)
            .expect("u has a valid length")
    }

    pub fn bob_table(&self) -> DeterministicStrategy {
        let u = self.u.bits();
        DeterministicStrategy::from_fn(self.u.len(), |t| gf2::parity(u & t.bits()))
            .expect("u has a valid length")
    }
}

fn check_dim(game: &TransversalGame, m: usize) -> Result<()> {
    if game.m() != m {
        return Err(Error::Dimension { expected: game.m(), found: m });
    }
    Ok(())
}

/// Exact acceptance probability of a pair of answer tables.
pub fn eval_deterministic(
    game: &TransversalGame,
    alice: &DeterministicStrategy,
    bob: &DeterministicStrategy,
) -> Result<f64> {
    check_dim(game, alice.m)?;
    check_dim(game, bob.m)?;
    let n = 1usize << game.m();
    let mut total = 0.0;
    for c in game.clauses() {
        let z = c.z.index();
        let hits = (0..n)
            .filter(|&s| alice.answers[s] ^ bob.answers[s ^ z] == c.gbit)
            .count();
        total += c.weight * hits as f64 / n as f64;
    }
    Ok(total)
}

/// `1/2 + (-1)^gamma * lambda[u]` with `lambda` the transform of theta.
pub fn eval_linear(game: &TransversalGame, strat: &LinearStrategy) -> Result<f64> {
    check_dim(game, strat.u.len())?;
    let lambda = gf2::fwht(&theta_of(game))?;
    let l = lambda[strat.u.index()];
    Ok(0.5 + if strat.gamma_alice { -l } else { l })
}

/// Per-offset weights of clauses demanding equal (`agree`) or unequal
/// (`differ`) answers; Bob's best reply decomposes over his questions.
struct ResponseKernel {
    n: usize,
    offsets: Vec<(usize, f64, f64)>,
}

impl ResponseKernel {
    fn new(game: &TransversalGame) -> Self {
        let n = 1usize << game.m();
        let mut by_z: Vec<(f64, f64)> = vec![(0.0, 0.0); n];
        let mut present = vec![false; n];
        let mut order = Vec::new();
        for c in game.clauses() {
            let z = c.z.index();
            if !present[z] {
                present[z] = true;
                order.push(z);
            }
            if c.gbit {
                by_z[z].1 += c.weight;
            } else {
                by_z[z].0 += c.weight;
            }
        }
        let offsets = order.into_iter().map(|z| (z, by_z[z].0, by_z[z].1)).collect();
        ResponseKernel { n, offsets }
    }

    /// Value of Bob's best reply; fills `reply` when given. Ties go to 0.
    fn respond(&self, alice: impl Fn(usize) -> bool, mut reply: Option<&mut Vec<bool>>) -> f64 {
        let mut total = 0.0;
        for t in 0..self.n {
            let (mut zero, mut one) = (0.0, 0.0);
            for &(z, agree, differ) in &self.offsets {
                if alice(t ^ z) {
                    zero += differ;
                    one += agree;
                } else {
                    zero += agree;
                    one += differ;
                }
            }
            let b = one > zero;
            total += if b { one } else { zero };
            if let Some(r) = reply.as_deref_mut() {
                r.push(b);
            }
        }
        total / self.n as f64
    }
}

/// Bob's optimal answer table against a fixed Alice table, and its value.
pub fn best_response(
    game: &TransversalGame,
    alice: &DeterministicStrategy,
) -> Result<(DeterministicStrategy, f64)> {
    check_dim(game, alice.m)?;
    let kernel = ResponseKernel::new(game);
    let mut reply = Vec::with_capacity(kernel.n);
    let value = kernel.respond(|s| alice.answers[s], Some(&mut reply));
    Ok((DeterministicStrategy { m: game.m(), answers: reply }, value))
}

/// Exact classical value by enumerating every Alice table and pairing it with
/// Bob's best response. Among equal values the smallest Alice table encoding
/// (answer to question `s` at bit `s`) wins, so parallel and sequential scans
/// agree.
pub fn brute_force_classical_value(
    game: &TransversalGame,
) -> Result<((DeterministicStrategy, DeterministicStrategy), f64)> {
    let m = game.m();
    if m > BRUTE_FORCE_CAP {
        return Err(Error::capacity("brute force", m, BRUTE_FORCE_CAP));
    }
    let kernel = ResponseKernel::new(game);
    let tables = 1u64 << kernel.n;
    let (value, best) = (0..tables)
        .into_par_iter()
        .map(|enc| (kernel.respond(|s| enc >> s & 1 == 1, None), enc))
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let alice = DeterministicStrategy {
        m,
        answers: (0..kernel.n).map(|s| best >> s & 1 == 1).collect(),
    };
    let (bob, _) = best_response(game, &alice)?;
    Ok(((alice, bob), value))
}

fn table_string(t: &DeterministicStrategy) -> String {
    t.answers.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parses a `tables v1` file: `m <int>`, then `alice <2^m bits>` and
/// `bob <2^m bits>`, where character `q` answers the question with encoding `q`.
pub fn parse_tables(text: &str) -> Result<(DeterministicStrategy, DeterministicStrategy)> {
    let mut lines = content_lines(text);
    let (n, header) = lines.next().ok_or_else(|| Error::parse(1, "empty tables file"))?;
    if header != "tables v1" {
        return Err(Error::parse(n, format!("expected header `tables v1`, found {header:?}")));
    }
    let (n, mline) = lines.next().ok_or_else(|| Error::parse(n + 1, "missing m line"))?;
    let m = parse_m_line(n, mline)?;
    if m == 0 || m > MAX_LEN {
        return Err(Error::capacity("answer table", m, MAX_LEN));
    }
    let (mut alice, mut bob) = (None, None);
    for (n, line) in lines {
        let (who, bits) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::parse(n, format!("expected `alice|bob <bits>`, found {line:?}")))?;
        let bits = bits.trim();
        if bits.len() != 1 << m {
            return Err(Error::parse(n, format!("table has {} entries, expected {}", bits.len(), 1 << m)));
        }
        let answers = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::parse(n, format!("bad answer character {c:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        let slot = match who {
            "alice" => &mut alice,
            "bob" => &mut bob,
            _ => return Err(Error::parse(n, format!("unknown prover {who:?}"))),
        };
        if slot.replace(DeterministicStrategy { m, answers }).is_some() {
            return Err(Error::parse(n, format!("duplicate {who} table")));
        }
    }
    match (alice, bob) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::parse(0, "tables file needs both alice and bob lines")),
    }
}

pub fn tables_to_text(alice: &DeterministicStrategy, bob: &DeterministicStrategy) -> String {
    let mut s = String::new();
    writeln!(s, "tables v1\nm {}", alice.m).unwrap();
    writeln!(s, "alice {}", table_string(alice)).unwrap();
    writeln!(s, "bob {}", table_string(bob)).unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::GameClause;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn single_equation() -> TransversalGame {
        TransversalGame::new(3, vec![GameClause::new(bv("111"), 1, true, 1.0)]).unwrap()
    }

    fn contradictory() -> TransversalGame {
        TransversalGame::new(
            3,
            vec![
                GameClause::new(bv("111"), 0, false, 0.5),
                GameClause::new(bv("111"), 1, true, 0.5),
            ],
        )
        .unwrap()
    }

    fn constant_zero() -> TransversalGame {
        TransversalGame::new(
            3,
            vec![
                GameClause::new(bv("110"), 0, false, 0.5),
                GameClause::new(bv("011"), 2, false, 0.5),
            ],
        )
        .unwrap()
    }

    #[test]
    fn deterministic_examples() {
        let zero = DeterministicStrategy::constant(3, false).unwrap();
        assert_eq!(eval_deterministic(&constant_zero(), &zero, &zero).unwrap(), 1.0);
        assert_eq!(eval_deterministic(&single_equation(), &zero, &zero).unwrap(), 0.0);
        let first = DeterministicStrategy::from_fn(3, |q| q.get(1).unwrap()).unwrap();
        assert_eq!(eval_deterministic(&single_equation(), &first, &first).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch() {
        let t = DeterministicStrategy::constant(2, false).unwrap();
        assert!(matches!(
            eval_deterministic(&single_equation(), &t, &t),
            Err(Error::Dimension { .. })
        ));
        assert!(best_response(&single_equation(), &t).is_err());
        let l = LinearStrategy::new(bv("00"), false);
        assert!(eval_linear(&single_equation(), &l).is_err());
        assert!(DeterministicStrategy::new(2, vec![false; 3]).is_err());
    }

    #[test]
    fn linear_examples() {
        let l = LinearStrategy::new(bv("000"), true);
        assert_eq!(eval_linear(&single_equation(), &l).unwrap(), 1.0);
        assert_eq!(
            eval_deterministic(&single_equation(), &l.alice_table(), &l.bob_table()).unwrap(),
            1.0
        );
        let l = LinearStrategy::new(bv("000"), false);
        assert_eq!(eval_linear(&contradictory(), &l).unwrap(), 0.5);
    }

    #[test]
    fn best_response_examples() {
        let zero = DeterministicStrategy::constant(3, false).unwrap();
        let (bob, v) = best_response(&single_equation(), &zero).unwrap();
        assert!(bob.answers().iter().all(|&b| b));
        assert_eq!(v, 1.0);

        let (bob, v) = best_response(&constant_zero(), &zero).unwrap();
        assert!(bob.answers().iter().all(|&b| !b));
        assert_eq!(v, 1.0);

        let (bob, v) = best_response(&contradictory(), &zero).unwrap();
        assert!(bob.answers().iter().all(|&b| !b), "ties go to 0");
        assert_eq!(v, 0.5);
    }

    #[test]
    fn brute_force_examples() {
        let ((a, b), v) = brute_force_classical_value(&single_equation()).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(eval_deterministic(&single_equation(), &a, &b).unwrap(), 1.0);
        let (_, v) = brute_force_classical_value(&contradictory()).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn brute_force_cap() {
        let g = TransversalGame::new(5, vec![GameClause::new(bv("11100"), 0, true, 1.0)]).unwrap();
        assert!(matches!(brute_force_classical_value(&g), Err(Error::Capacity { .. })));
    }

    #[test]
    fn tables_round_trip() {
        let l = LinearStrategy::new(bv("101"), true);
        let text = tables_to_text(&l.alice_table(), &l.bob_table());
        let (a, b) = parse_tables(&text).unwrap();
        assert_eq!(a, l.alice_table());
        assert_eq!(b, l.bob_table());
        assert!(parse_tables("tables v1\nm 2\nalice 010\nbob 0101\n").is_err());
        assert!(parse_tables("tables v1\nm 2\nalice 0101\n").is_err());
    }
}
