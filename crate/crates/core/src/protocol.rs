//! Round-by-round simulation of the share-splitting verifier.
//!
//! The verifier samples a clause `(z, r)`, draws a uniform `s`, sends `s` to
//! Alice and `t = s ^ z` to Bob, and accepts when `a ^ b = g(z, r)`. Each
//! share on its own is uniform, so a prover sees nothing about `z`.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::games::TransversalGame;
use crate::gf2::BitVector;
use crate::rng::RngState;
use crate::strategies::{DeterministicStrategy, LinearStrategy};

/// A prover only ever sees its own question.
pub trait Prover {
    fn question_len(&self) -> usize;
    fn answer(&self, question: &BitVector) -> bool;
}

impl Prover for DeterministicStrategy {
    fn question_len(&self) -> usize {
        self.m()
    }

    fn answer(&self, question: &BitVector) -> bool {
        DeterministicStrategy::answer(self, question)
    }
}

/// Answers `u.q ^ offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearProver {
    u: BitVector,
    offset: bool,
}

impl Prover for LinearProver {
    fn question_len(&self) -> usize {
        self.u.len()
    }

    fn answer(&self, question: &BitVector) -> bool {
        crate::gf2::parity(self.u.bits() & question.bits()) ^ self.offset
    }
}

impl LinearStrategy {
    pub fn alice(&self) -> LinearProver {
        LinearProver { u: self.u, offset: self.gamma_alice }
    }

    pub fn bob(&self) -> LinearProver {
        LinearProver { u: self.u, offset: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolTranscript {
    /// Index of the sampled clause in the game's clause list.
    pub clause: usize,
    pub z: BitVector,
    pub r: u32,
    pub s: BitVector,
    pub t: BitVector,
    pub a: bool,
    pub b: bool,
    pub accepted: bool,
}

impl ProtocolTranscript {
    /// One line of the transcript log, numbered `round`.
    pub fn log_line(&self, round: u64) -> String {
        format!("round {round} {self}")
    }
}

impl fmt::Display for ProtocolTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "z={} r={} s={} t={} a={} b={} accept={}",
            self.z,
            self.r,
            self.s,
            self.t,
            u8::from(self.a),
            u8::from(self.b),
            u8::from(self.accepted)
        )
    }
}

/// Splits `z` into a uniform share `s` and `t = s ^ z`.
pub fn split_shares(z: &BitVector, rng: &mut RngState) -> (BitVector, BitVector) {
    let m = z.len();
    let s = BitVector::from_raw(rng.bits(m), m);
    let t = BitVector::from_raw(s.bits() ^ z.bits(), m);
    (s, t)
}

/// Inverse-CDF clause sampling over cumulative weights in clause order.
#[derive(Clone, Debug)]
pub struct ClauseSampler {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl ClauseSampler {
    pub fn new(game: &TransversalGame) -> Self {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = game
            .clauses()
            .iter()
            .map(|c| {
                acc += c.weight;
                acc
            })
            .collect();
        let last_positive = game.clauses().iter().rposition(|c| c.weight > 0.0).unwrap_or(0);
        ClauseSampler { cumulative, last_positive }
    }

    /// First clause whose cumulative weight exceeds a uniform draw; a zero
    /// weight clause never does.
    pub fn sample(&self, rng: &mut RngState) -> usize {
        let total = *self.cumulative.last().expect("games have at least one clause");
        let x = rng.next_f64() * total;
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.last_positive)
    }
}

fn check_prover(game: &TransversalGame, p: &impl Prover) -> Result<()> {
    if p.question_len() != game.m() {
        return Err(Error::Dimension { expected: game.m(), found: p.question_len() });
    }
    Ok(())
}

fn round(
    game: &TransversalGame,
    sampler: &ClauseSampler,
    alice: &impl Prover,
    bob: &impl Prover,
    rng: &mut RngState,
) -> ProtocolTranscript {
    let clause = sampler.sample(rng);
    let c = &game.clauses()[clause];
    let (s, t) = split_shares(&c.z, rng);
    let a = alice.answer(&s);
    let b = bob.answer(&t);
    ProtocolTranscript { clause, z: c.z, r: c.r, s, t, a, b, accepted: a ^ b == c.gbit }
}

/// Plays one round.
pub fn run_round(
    game: &TransversalGame,
    alice: &impl Prover,
    bob: &impl Prover,
    rng: &mut RngState,
) -> Result<ProtocolTranscript> {
    check_prover(game, alice)?;
    check_prover(game, bob)?;
    Ok(round(game, &ClauseSampler::new(game), alice, bob, rng))
}

/// Transcripts of rounds `0..trials`, round `i` drawn from
/// `RngState::for_trial(seed, i)`.
pub fn transcripts(
    game: &TransversalGame,
    alice: &(impl Prover + Sync),
    bob: &(impl Prover + Sync),
    trials: u64,
    seed: u64,
) -> Result<Vec<ProtocolTranscript>> {
    check_prover(game, alice)?;
    check_prover(game, bob)?;
    let sampler = ClauseSampler::new(game);
    Ok((0..trials)
        .into_par_iter()
        .map(|i| round(game, &sampler, alice, bob, &mut RngState::for_trial(seed, i)))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub trials: u64,
    pub accepted: u64,
    pub estimate: f64,
    /// `sqrt(p (1 - p) / trials)`.
    pub stderr: f64,
}

/// Monte Carlo acceptance frequency. Rounds use per-trial streams and are
/// counted, so the result does not depend on the number of threads.
pub fn estimate_value(
    game: &TransversalGame,
    alice: &(impl Prover + Sync),
    bob: &(impl Prover + Sync),
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::validation("trials must be at least 1"));
    }
    check_prover(game, alice)?;
    check_prover(game, bob)?;
    let sampler = ClauseSampler::new(game);
    let accepted = (0..trials)
        .into_par_iter()
        .filter(|&i| round(game, &sampler, alice, bob, &mut RngState::for_trial(seed, i)).accepted)
        .count() as u64;
    let p = accepted as f64 / trials as f64;
    Ok(Estimate {
        trials,
        accepted,
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
    })
}
