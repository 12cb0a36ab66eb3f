//! Entangled strategies: a shared pure state on C^d (x) C^d and a +-1
//! observable per question for each prover.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::games::{content_lines, TransversalGame};
use crate::gf2::{BitVector, MAX_LEN};
use crate::rng::RngState;

pub const MAX_LOCAL_DIM: usize = 4;

const STATE_TOL: f64 = 1e-12;
const OBSERVABLE_TOL: f64 = 1e-10;
const IMAG_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumStrategy {
    d: usize,
    /// Amplitude of `|i>|j>` at `i * d + j`; Alice holds the first factor.
    state: DVector<Complex64>,
    alice_obs: Vec<DMatrix<Complex64>>,
    bob_obs: Vec<DMatrix<Complex64>>,
}

fn check_observable(a: &DMatrix<Complex64>, d: usize, who: &str, q: usize) -> Result<()> {
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::validation(format!("{who} observable {q} is not {d}x{d}")));
    }
    let herm = (a - a.adjoint()).norm();
    let inv = (a * a - DMatrix::<Complex64>::identity(d, d)).norm();
    if herm > OBSERVABLE_TOL || inv > OBSERVABLE_TOL {
        return Err(Error::validation(format!(
            "{who} observable {q}: hermiticity defect {herm:e}, involution defect {inv:e}"
        )));
    }
    Ok(())
}

impl QuantumStrategy {
    /// Validates the state norm and every observable. `d = 1` is allowed so
    /// deterministic strategies embed as scalar +-1 observables.
    pub fn new(
        d: usize,
        state: DVector<Complex64>,
        alice_obs: Vec<DMatrix<Complex64>>,
        bob_obs: Vec<DMatrix<Complex64>>,
    ) -> Result<Self> {
        if d == 0 || d > MAX_LOCAL_DIM {
            return Err(Error::validation(format!("local dimension {d} outside 1..={MAX_LOCAL_DIM}")));
        }
        if state.len() != d * d {
            return Err(Error::Dimension { expected: d * d, found: state.len() });
        }
        if (state.norm() - 1.0).abs() > STATE_TOL {
            return Err(Error::validation(format!("state norm {}", state.norm())));
        }
        let q = alice_obs.len();
        if !q.is_power_of_two() || q < 2 || q.trailing_zeros() as usize > MAX_LEN {
            return Err(Error::validation(format!("{q} Alice observables is not 2^m")));
        }
        if bob_obs.len() != q {
            return Err(Error::Dimension { expected: q, found: bob_obs.len() });
        }
        for (i, a) in alice_obs.iter().enumerate() {
            check_observable(a, d, "Alice", i)?;
        }
        for (i, b) in bob_obs.iter().enumerate() {
            check_observable(b, d, "Bob", i)?;
        }
        Ok(QuantumStrategy { d, state, alice_obs, bob_obs })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Question length.
    pub fn m(&self) -> usize {
        self.alice_obs.len().trailing_zeros() as usize
    }

    pub fn state(&self) -> &DVector<Complex64> {
        &self.state
    }

    pub fn alice(&self, s: usize) -> &DMatrix<Complex64> {
        &self.alice_obs[s]
    }

    pub fn bob(&self, t: usize) -> &DMatrix<Complex64> {
        &self.bob_obs[t]
    }

    /// Parses the `qstrat v1` text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (n, header) = lines.next().ok_or_else(|| Error::parse(1, "empty strategy file"))?;
        if header != "qstrat v1" {
            return Err(Error::parse(n, format!("expected header `qstrat v1`, found {header:?}")));
        }
        let (n, dline) = lines.next().ok_or_else(|| Error::parse(n + 1, "missing d line"))?;
        let d = match dline.split_whitespace().collect::<Vec<_>>()[..] {
            ["d", v] => v.parse::<usize>().map_err(|_| Error::parse(n, format!("bad d {v:?}")))?,
            _ => return Err(Error::parse(n, format!("expected `d <int>`, found {dline:?}"))),
        };
        if d == 0 || d > MAX_LOCAL_DIM {
            return Err(Error::parse(n, format!("d = {d} outside 1..={MAX_LOCAL_DIM}")));
        }
        let (n, sline) = lines.next().ok_or_else(|| Error::parse(n + 1, "missing state line"))?;
        let mut tok = sline.split_whitespace();
        if tok.next() != Some("state") {
            return Err(Error::parse(n, "expected `state ...`"));
        }
        let state = DVector::from_vec(parse_complex(n, tok, d * d)?);

        let mut m: Option<usize> = None;
        let mut alice: Vec<Option<DMatrix<Complex64>>> = Vec::new();
        let mut bob: Vec<Option<DMatrix<Complex64>>> = Vec::new();
        for (n, line) in lines {
            let mut tok = line.split_whitespace();
            let (who, key) = match tok.next() {
                Some("A") => (0, "s="),
                Some("B") => (1, "t="),
                _ => return Err(Error::parse(n, format!("expected `A s=...` or `B t=...`, found {line:?}"))),
            };
            let q: BitVector = tok
                .next()
                .and_then(|t| t.strip_prefix(key))
                .ok_or_else(|| Error::parse(n, format!("missing {key}<bits>")))?
                .parse()
                .map_err(|e| Error::parse(n, format!("bad question: {e}")))?;
            let mm = *m.get_or_insert_with(|| {
                alice = vec![None; 1 << q.len()];
                bob = vec![None; 1 << q.len()];
                q.len()
            });
            if q.len() != mm {
                return Err(Error::parse(n, format!("question length {} differs from {mm}", q.len())));
            }
            let entries = parse_complex(n, tok, d * d)?;
            let mat = DMatrix::from_row_slice(d, d, &entries);
            let slot = if who == 0 { &mut alice[q.index()] } else { &mut bob[q.index()] };
            if slot.replace(mat).is_some() {
                return Err(Error::parse(n, format!("duplicate observable for {q}")));
            }
        }
        let collect = |v: Vec<Option<DMatrix<Complex64>>>, who: &str| {
            v.into_iter()
                .enumerate()
                .map(|(i, o)| o.ok_or_else(|| Error::parse(0, format!("missing {who} observable for question {i}"))))
                .collect::<Result<Vec<_>>>()
        };
        if m.is_none() {
            return Err(Error::parse(0, "no observables"));
        }
        let alice = collect(alice, "Alice")?;
        let bob = collect(bob, "Bob")?;
        QuantumStrategy::new(d, state, alice, bob)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("qstrat v1\nd {}\nstate", self.d);
        push_complex(&mut s, self.state.iter());
        s.push('\n');
        let m = self.m();
        for (tag, key, obs) in [("A", "s", &self.alice_obs), ("B", "t", &self.bob_obs)] {
            for (q, a) in obs.iter().enumerate() {
                write!(s, "{tag} {key}={}", BitVector::from_raw(q as u32, m)).unwrap();
                push_complex(&mut s, a.transpose().iter());
                s.push('\n');
            }
        }
        s
    }
}

fn push_complex<'a>(s: &mut String, it: impl Iterator<Item = &'a Complex64>) {
    for c in it {
        write!(s, " {} {}", c.re, c.im).unwrap();
    }
}

fn parse_complex<'a>(n: usize, tok: impl Iterator<Item = &'a str>, count: usize) -> Result<Vec<Complex64>> {
    let nums = tok
        .map(|t| t.parse::<f64>().map_err(|_| Error::parse(n, format!("bad number {t:?}"))))
        .collect::<Result<Vec<f64>>>()?;
    if nums.len() != 2 * count {
        return Err(Error::parse(n, format!("expected {} numbers, found {}", 2 * count, nums.len())));
    }
    Ok(nums.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
}

/// Exact acceptance probability of an entangled strategy.
///
/// With the state reshaped to a d x d matrix `P`, the correlation
/// `<phi| A (x) B |phi>` equals `tr(P^dagger A P B^T)`.
pub fn eval_quantum(game: &TransversalGame, strat: &QuantumStrategy) -> Result<f64> {
    if strat.m() != game.m() {
        return Err(Error::Dimension { expected: game.m(), found: strat.m() });
    }
    let d = strat.d;
    let psi = DMatrix::from_row_slice(d, d, strat.state.as_slice());
    let left: Vec<DMatrix<Complex64>> = strat.alice_obs.iter().map(|a| psi.adjoint() * a * &psi).collect();
    let right: Vec<DMatrix<Complex64>> = strat.bob_obs.iter().map(|b| b.transpose()).collect();
    let n = 1usize << game.m();
    let mut total = 0.0;
    for c in game.clauses() {
        let z = c.z.index();
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..n {
            acc += (&left[s] * &right[s ^ z]).trace();
        }
        let corr = acc / n as f64;
        if corr.im.abs() > IMAG_TOL {
            return Err(Error::Numerical(format!(
                "correlation for z={} has imaginary part {:e}",
                c.z, corr.im
            )));
        }
        let sign = if c.gbit { -1.0 } else { 1.0 };
        total += c.weight * 0.5 * (1.0 + sign * corr.re);
    }
    Ok(total)
}

fn gaussian_complex(rng: &mut RngState) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal pushed into `Q`.
fn random_unitary(d: usize, rng: &mut RngState) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

fn random_observable(d: usize, rng: &mut RngState) -> DMatrix<Complex64> {
    let u = random_unitary(d, rng);
    let signs = DVector::from_fn(d, |_, _| {
        if rng.bit() {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    let a = &u * DMatrix::from_diagonal(&signs) * u.adjoint();
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random strategy for questions of length `m`: a normalized complex Gaussian
/// state and `U D U^dagger` observables with random signs `D`.
pub fn random_quantum_strategy(d: usize, m: usize, rng: &mut RngState) -> Result<QuantumStrategy> {
    if !(2..=MAX_LOCAL_DIM).contains(&d) {
        return Err(Error::validation(format!("local dimension {d} outside 2..={MAX_LOCAL_DIM}")));
    }
    if m == 0 || m > MAX_LEN {
        return Err(Error::capacity("quantum strategy", m, MAX_LEN));
    }
    let raw = DVector::from_fn(d * d, |_, _| gaussian_complex(rng));
    let state = &raw / Complex64::new(raw.norm(), 0.0);
    let n = 1usize << m;
    let alice_obs = (0..n).map(|_| random_observable(d, rng)).collect();
    let bob_obs = (0..n).map(|_| random_observable(d, rng)).collect();
    QuantumStrategy::new(d, state, alice_obs, bob_obs)
}
