//! Cross-module property suites behind `xorproof check`.
//!
//! Every property is driven by seeded generators, so a run is reproducible.
//! The transform under test is injectable to let tests confirm that a broken
//! kernel is reported by name.

use crate::error::Result;
use crate::games::{self, analyze, phi_matrix, random_game, theta_of, GameClause, TransversalGame};
use crate::gf2::{self, BitVector};
use crate::pcp::{self, game_from_instance, linear_to_witness, witness_to_linear, Witness};
use crate::protocol::{estimate_value, transcripts};
use crate::rng::RngState;
use crate::strategies::{
    best_response, brute_force_classical_value, eval_deterministic, eval_linear, eval_quantum,
    random_quantum_strategy, DeterministicStrategy, LinearStrategy,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

pub type Transform = fn(&mut [f64]) -> Result<()>;

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub level: Level,
    pub seed: u64,
    pub transform: Transform,
}

impl CheckOptions {
    pub fn new(level: Level) -> Self {
        CheckOptions { level, seed: 0x5eed, transform: gf2::fwht_in_place }
    }
}

/// A transform with one coefficient nudged, for mutation testing.
pub fn corrupted_fwht(v: &mut [f64]) -> Result<()> {
    gf2::fwht_in_place(v)?;
    if let Some(last) = v.last_mut() {
        *last += 1e-3;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Sizes {
    samples: usize,
    max_m_transform: usize,
    max_m_naive: usize,
    games: usize,
    brute_games: usize,
    brute_max_m: usize,
    linear_max_m: usize,
    quantum_games: usize,
    quantum_per_game: usize,
    spectral_games: usize,
    spectral_max_m: usize,
    instances: usize,
    instance_max_m: usize,
    mc_trials: u64,
}

impl Sizes {
    fn for_level(level: Level) -> Self {
        match level {
            Level::Fast => Sizes {
                samples: 1000,
                max_m_transform: 3,
                max_m_naive: 3,
                games: 20,
                brute_games: 20,
                brute_max_m: 3,
                linear_max_m: 3,
                quantum_games: 5,
                quantum_per_game: 20,
                spectral_games: 5,
                spectral_max_m: 3,
                instances: 20,
                instance_max_m: 3,
                mc_trials: 20_000,
            },
            Level::Full => Sizes {
                samples: 100_000,
                max_m_transform: 12,
                max_m_naive: 8,
                games: 200,
                brute_games: 200,
                brute_max_m: 4,
                linear_max_m: 6,
                quantum_games: 50,
                quantum_per_game: 200,
                spectral_games: 50,
                spectral_max_m: 8,
                instances: 100,
                instance_max_m: 12,
                mc_trials: 100_000,
            },
        }
    }
}

type Check = fn(&CheckOptions, &Sizes, &mut RngState) -> std::result::Result<String, String>;

/// Runs every property suite and reports one outcome per property.
pub fn run_checks(opts: &CheckOptions) -> Vec<CheckOutcome> {
    let sizes = Sizes::for_level(opts.level);
    let suite: [(&'static str, Check); 20] = [
        ("gf2.xor-self-inverse", xor_self_inverse),
        ("gf2.dot-bilinear", dot_bilinear),
        ("gf2.fwht-zero", fwht_zero),
        ("gf2.fwht-involution", fwht_involution),
        ("gf2.fwht-naive", fwht_naive),
        ("games.theta-l1-bound", theta_l1_bound),
        ("games.lambda-naive", lambda_naive),
        ("games.value-order-and-merge-invariant", value_invariance),
        ("games.zero-theta-half", zero_theta_half),
        ("games.spectral-certification", spectral_certification),
        ("strategies.oracle-equivalence", oracle_equivalence),
        ("strategies.linear-expansion", linear_expansion),
        ("strategies.no-entanglement-advantage", no_entanglement_advantage),
        ("strategies.best-response-monotone", best_response_monotone),
        ("pcp.witness-round-trip", witness_round_trip),
        ("pcp.value-equivalence", pcp_value_equivalence),
        ("pcp.mapping-identities", mapping_identities),
        ("pcp.planted-satisfiable", planted_satisfiable),
        ("protocol.transcript-consistency", transcript_consistency),
        ("protocol.exact-vs-monte-carlo", exact_vs_mc),
    ];
    suite
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = RngState::for_trial(opts.seed, i as u64);
            let (passed, detail) = match check(opts, &sizes, &mut rng) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome { name, passed, detail }
        })
        .collect()
}

fn naive_transform(v: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|u| {
            v.iter()
                .enumerate()
                .map(|(z, x)| if (u & z).count_ones() % 2 == 1 { -x } else { *x })
                .sum()
        })
        .collect()
}

fn random_vector(n: usize, rng: &mut RngState) -> Vec<f64> {
    (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect()
}

fn random_small_game(max_m: usize, rng: &mut RngState) -> TransversalGame {
    let m = 2 + rng.below((max_m - 1) as u64) as usize;
    let clauses = 1 + rng.below(16) as usize;
    random_game(m, clauses, 4, rng).expect("generator parameters are valid")
}

fn apply(opts: &CheckOptions, v: &[f64]) -> std::result::Result<Vec<f64>, String> {
    let mut out = v.to_vec();
    (opts.transform)(&mut out).map_err(|e| e.to_string())?;
    Ok(out)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn xor_self_inverse(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.samples {
        let m = 1 + rng.below(24) as usize;
        let x = BitVector::from_bits(rng.bits(m), m).unwrap();
        ensure(gf2::xor(&x, &x).unwrap().is_zero(), || format!("xor({x}, {x}) nonzero"))?;
    }
    Ok(format!("{} samples", sz.samples))
}

fn dot_bilinear(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.samples {
        let m = 1 + rng.below(24) as usize;
        let [x, y, u] = [0; 3].map(|_| BitVector::from_bits(rng.bits(m), m).unwrap());
        let lhs = gf2::dot(&gf2::xor(&x, &y).unwrap(), &u).unwrap();
        let rhs = gf2::dot(&x, &u).unwrap() ^ gf2::dot(&y, &u).unwrap();
        ensure(lhs == rhs, || format!("bilinearity fails at x={x} y={y} u={u}"))?;
    }
    Ok(format!("{} samples", sz.samples))
}

fn fwht_zero(opts: &CheckOptions, sz: &Sizes, _: &mut RngState) -> std::result::Result<String, String> {
    for m in 0..=sz.max_m_transform {
        let out = apply(opts, &vec![0.0; 1 << m])?;
        ensure(out.iter().all(|x| *x == 0.0), || format!("nonzero output at m={m}"))?;
    }
    Ok(format!("m <= {}", sz.max_m_transform))
}

fn fwht_involution(opts: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    let mut worst = 0.0f64;
    for m in 1..=sz.max_m_transform {
        for _ in 0..20 {
            let v = random_vector(1 << m, rng);
            let twice = apply(opts, &apply(opts, &v)?)?;
            let scale = (1u64 << m) as f64;
            let vmax = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let err = v
                .iter()
                .zip(&twice)
                .fold(0.0f64, |a, (x, y)| a.max((y - scale * x).abs()))
                / (scale * vmax);
            worst = worst.max(err);
        }
    }
    ensure(worst <= 1e-12, || format!("relative error {worst:e} > 1e-12"))?;
    Ok(format!("max relative error {worst:.3e}"))
}

fn fwht_naive(opts: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    let mut worst = 0.0f64;
    for m in 0..=sz.max_m_naive {
        for _ in 0..5 {
            let v = random_vector(1 << m, rng);
            let fast = apply(opts, &v)?;
            let slow = naive_transform(&v);
            worst = fast.iter().zip(&slow).fold(worst, |a, (x, y)| a.max((x - y).abs()));
        }
    }
    ensure(worst <= 1e-12, || format!("deviation from naive sum {worst:e} > 1e-12"))?;
    Ok(format!("max deviation {worst:.3e}"))
}

fn theta_l1_bound(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.games {
        let g = random_small_game(6, rng);
        let l1: f64 = theta_of(&g).iter().map(|t| t.abs()).sum();
        let direct: f64 = 0.5 * g.clauses().iter().map(|c| c.weight).sum::<f64>();
        ensure(l1 <= direct + 1e-15 && l1 <= 0.5 + 1e-12, || format!("sum |theta| = {l1}"))?;
        let v = analyze(&g).unwrap().value;
        ensure((0.0..=1.0 + 1e-12).contains(&v), || format!("value {v} outside [0, 1]"))?;
    }
    Ok(format!("{} games", sz.games))
}

fn lambda_naive(opts: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..sz.games {
        let g = random_small_game(sz.max_m_naive.max(2), rng);
        let theta = theta_of(&g);
        let fast = apply(opts, &theta)?;
        let slow = naive_transform(&theta);
        worst = fast.iter().zip(&slow).fold(worst, |a, (x, y)| a.max((x - y).abs()));
    }
    ensure(worst <= 1e-12, || format!("lambda deviates from naive sum by {worst:e}"))?;
    Ok(format!("max deviation {worst:.3e}"))
}

fn value_invariance(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.games {
        let g = random_small_game(6, rng);
        let base = analyze(&g).unwrap().value;
        let mut shuffled: Vec<GameClause> = g.clauses().to_vec();
        for i in (1..shuffled.len()).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            shuffled.swap(i, j);
        }
        let permuted = TransversalGame::new(g.m(), shuffled.clone()).unwrap();
        let split: Vec<GameClause> = shuffled
            .iter()
            .flat_map(|c| {
                let half = GameClause { weight: c.weight / 2.0, ..c.clone() };
                [half.clone(), half]
            })
            .collect();
        let merged = TransversalGame::new(g.m(), split).unwrap();
        for (what, other) in [("permuted", &permuted), ("merged", &merged)] {
            let v = analyze(other).unwrap().value;
            ensure((v - base).abs() <= 1e-12, || format!("{what} value {v} vs {base}"))?;
        }
    }
    Ok(format!("{} games", sz.games))
}

fn zero_theta_half(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.games {
        let m = 3 + rng.below(6) as usize;
        let inst = pcp::contradictory_instance(m, 1 + rng.below(10) as usize, rng).unwrap();
        let g = game_from_instance(&inst);
        ensure(theta_of(&g).iter().all(|t| *t == 0.0), || "theta not identically zero".into())?;
        let v = analyze(&g).unwrap().value;
        ensure(v == 0.5, || format!("value {v} != 0.5"))?;
    }
    Ok(format!("{} games", sz.games))
}

fn spectral_certification(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    let (mut res, mut gap) = (0.0f64, 0.0f64);
    for _ in 0..sz.spectral_games {
        let g = random_small_game(sz.spectral_max_m, rng);
        let rep = games::verify_spectrum(&g).map_err(|e| e.to_string())?;
        res = res.max(rep.max_residual);
        gap = gap.max(rep.norm_gap);
        let phi = phi_matrix(&g).unwrap();
        ensure(phi == phi.transpose(), || "operator not symmetric".into())?;
    }
    ensure(res <= 1e-10 && gap <= 1e-9, || format!("residual {res:e}, norm gap {gap:e}"))?;
    Ok(format!("max residual {res:.3e}, max norm gap {gap:.3e}"))
}

fn oracle_equivalence(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.brute_games {
        let g = random_small_game(sz.brute_max_m, rng);
        let a = analyze(&g).unwrap();
        let (_, brute) = brute_force_classical_value(&g).unwrap();
        ensure((a.value - brute).abs() <= 1e-12, || format!("spectral {} vs brute force {brute}", a.value))?;
        let l = LinearStrategy::new(a.u_star, a.gamma_star);
        let v = eval_deterministic(&g, &l.alice_table(), &l.bob_table()).unwrap();
        ensure((v - a.value).abs() <= 1e-12, || format!("(u*, gamma*) achieves {v}, not {}", a.value))?;
    }
    Ok(format!("{} games", sz.brute_games))
}

fn linear_expansion(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    let games = (sz.games / 10).max(2);
    for _ in 0..games {
        let g = random_small_game(sz.linear_max_m, rng);
        for u in BitVector::all(g.m()).unwrap() {
            for gamma in [false, true] {
                let l = LinearStrategy::new(u, gamma);
                let lin = eval_linear(&g, &l).unwrap();
                let det = eval_deterministic(&g, &l.alice_table(), &l.bob_table()).unwrap();
                ensure((lin - det).abs() <= 1e-12, || format!("u={u} gamma={gamma}: {lin} vs {det}"))?;
            }
        }
    }
    Ok(format!("{games} games, all (u, gamma)"))
}

fn no_entanglement_advantage(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    let mut margin = f64::INFINITY;
    for _ in 0..sz.quantum_games {
        let g = random_small_game(3, rng);
        let bound = analyze(&g).unwrap().value;
        for _ in 0..sz.quantum_per_game {
            let d = 2 + rng.below(3) as usize;
            let q = random_quantum_strategy(d, g.m(), rng).unwrap();
            let v = eval_quantum(&g, &q).map_err(|e| e.to_string())?;
            ensure(v <= bound + 1e-9, || format!("quantum value {v} exceeds {bound}"))?;
            margin = margin.min(bound - v);
        }
    }
    Ok(format!(
        "{} strategies, smallest margin {margin:.3e}",
        sz.quantum_games * sz.quantum_per_game
    ))
}

fn best_response_monotone(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.games {
        let g = random_small_game(6, rng);
        let n = 1 << g.m();
        let alice = DeterministicStrategy::new(g.m(), (0..n).map(|_| rng.bit()).collect()).unwrap();
        let bob = DeterministicStrategy::new(g.m(), (0..n).map(|_| rng.bit()).collect()).unwrap();
        let before = eval_deterministic(&g, &alice, &bob).unwrap();
        let (reply, v) = best_response(&g, &alice).unwrap();
        let check = eval_deterministic(&g, &alice, &reply).unwrap();
        ensure(v + 1e-12 >= before, || format!("best response {v} below {before}"))?;
        ensure((v - check).abs() <= 1e-12, || format!("reported {v}, evaluates to {check}"))?;
    }
    Ok(format!("{} games", sz.games))
}

fn witness_round_trip(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.samples.min(10_000) {
        let m = 1 + rng.below(24) as usize;
        let w = Witness(BitVector::from_bits(rng.bits(m), m).unwrap());
        ensure(linear_to_witness(&witness_to_linear(&w)) == w, || format!("round trip fails for {}", w.0))?;
    }
    Ok("ok".into())
}

fn random_instance_sized(max_m: usize, rng: &mut RngState) -> pcp::ThreeLinInstance {
    let m = 3 + rng.below((max_m - 2) as u64) as usize;
    let eqs = 1 + rng.below(24) as usize;
    pcp::random_instance(m, eqs, rng).unwrap()
}

fn pcp_value_equivalence(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.instances {
        let inst = random_instance_sized(sz.instance_max_m, rng);
        let (_, wv) = pcp::best_witness(&inst).unwrap();
        let gv = analyze(&game_from_instance(&inst)).unwrap().value;
        ensure((wv - gv).abs() <= 1e-12, || format!("best witness {wv} vs game value {gv}"))?;
    }
    Ok(format!("{} instances", sz.instances))
}

fn mapping_identities(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.instances {
        let inst = random_instance_sized(sz.instance_max_m, rng);
        let game = game_from_instance(&inst);
        let m = inst.m();
        let w = Witness(BitVector::from_bits(rng.bits(m), m).unwrap());
        let a = pcp::witness_value(&inst, &w).unwrap();
        let b = eval_linear(&game, &witness_to_linear(&w)).unwrap();
        ensure((a - b).abs() <= 1e-12, || format!("witness {}: {a} vs {b}", w.0))?;

        let l = LinearStrategy::new(BitVector::from_bits(rng.bits(m), m).unwrap(), rng.bit());
        let a = pcp::witness_value(&inst, &linear_to_witness(&l)).unwrap();
        let b = eval_linear(&game, &l).unwrap();
        ensure((a - b).abs() <= 1e-12, || format!("strategy u={} gamma={}: {a} vs {b}", l.u, l.gamma_alice))?;

        for e in inst.equations() {
            let z = BitVector::from_raw((1 << (e.i - 1)) | (1 << (e.j - 1)) | (1 << (e.k - 1)), m);
            let (u, g) = (l.u, l.gamma_alice);
            let lhs = u.get(e.i).unwrap() ^ u.get(e.j).unwrap() ^ u.get(e.k).unwrap() ^ g;
            ensure(lhs == gf2::dot(&u, &z).unwrap() ^ g, || "pointwise identity fails".into())?;
        }
    }
    Ok(format!("{} instances", sz.instances))
}

fn planted_satisfiable(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    for _ in 0..sz.instances {
        let m = 3 + rng.below((sz.instance_max_m - 2) as u64) as usize;
        let (inst, _) = pcp::planted_instance(m, 1 + rng.below(30) as usize, rng).unwrap();
        let (_, wv) = pcp::best_witness(&inst).unwrap();
        let gv = analyze(&game_from_instance(&inst)).unwrap().value;
        ensure((wv - 1.0).abs() <= 1e-12 && (gv - 1.0).abs() <= 1e-12, || {
            format!("planted instance scored {wv} / {gv}")
        })?;
    }
    Ok(format!("{} instances", sz.instances))
}

fn transcript_consistency(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    let games = (sz.games / 10).max(2);
    for _ in 0..games {
        let g = random_small_game(6, rng);
        let n = 1 << g.m();
        let alice = DeterministicStrategy::new(g.m(), (0..n).map(|_| rng.bit()).collect()).unwrap();
        let bob = DeterministicStrategy::new(g.m(), (0..n).map(|_| rng.bit()).collect()).unwrap();
        let seed = rng.next_f64().to_bits();
        for tr in transcripts(&g, &alice, &bob, 1000, seed).unwrap() {
            let c = &g.clauses()[tr.clause];
            ensure(gf2::xor(&tr.s, &tr.t).unwrap() == c.z && tr.z == c.z, || format!("s ^ t != z in {tr}"))?;
            let a = alice.answer(&tr.s);
            let b = bob.answer(&tr.t);
            ensure(a == tr.a && b == tr.b && tr.accepted == (a ^ b == c.gbit), || {
                format!("acceptance mismatch in {tr}")
            })?;
        }
    }
    Ok(format!("{games} games x 1000 rounds"))
}

fn exact_vs_mc(_: &CheckOptions, sz: &Sizes, rng: &mut RngState) -> std::result::Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let g = random_small_game(5, rng);
        let a = analyze(&g).unwrap();
        let l = LinearStrategy::new(a.u_star, a.gamma_star);
        let seed = rng.next_f64().to_bits();
        let est = estimate_value(&g, &l.alice(), &l.bob(), sz.mc_trials, seed).unwrap();
        let n = 1 << g.m();
        let alice = DeterministicStrategy::new(g.m(), (0..n).map(|_| rng.bit()).collect()).unwrap();
        let bob = DeterministicStrategy::new(g.m(), (0..n).map(|_| rng.bit()).collect()).unwrap();
        let exact = eval_deterministic(&g, &alice, &bob).unwrap();
        let est2 = estimate_value(&g, &alice, &bob, sz.mc_trials, seed ^ 1).unwrap();
        for (e, x) in [(est, a.value), (est2, exact)] {
            let dev = (e.estimate - x).abs();
            let sigma = dev / e.stderr.max(f64::MIN_POSITIVE);
            if dev > 0.0 {
                worst = worst.max(sigma);
            }
            ensure(dev <= 4.0 * e.stderr, || format!("estimate {} vs exact {x} ({sigma:.2} sigma)", e.estimate))?;
        }
    }
    Ok(format!("worst deviation {worst:.2} sigma"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let out = run_checks(&CheckOptions::new(Level::Fast));
        for o in &out {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
    }

    #[test]
    fn corrupted_transform_is_named() {
        let opts = CheckOptions { transform: corrupted_fwht, ..CheckOptions::new(Level::Fast) };
        let failed: Vec<_> = run_checks(&opts).into_iter().filter(|o| !o.passed).map(|o| o.name).collect();
        assert!(failed.contains(&"gf2.fwht-involution"));
        assert!(failed.contains(&"gf2.fwht-naive"));
    }
}
