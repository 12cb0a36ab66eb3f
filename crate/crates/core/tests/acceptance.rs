//! One line per acceptance criterion; exits nonzero if any criterion fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{game_in, naive_walsh, random_vector};
use nalgebra::{DVector, SymmetricEigen};
use xorproof::games::{analyze, phi_matrix, random_game, theta_of};
use xorproof::gf2::fwht;
use xorproof::pcp::{
    best_witness, contradictory_instance, game_from_instance, linear_to_witness, planted_instance,
    random_instance, witness_to_linear, witness_value,
};
use xorproof::protocol::estimate_value;
use xorproof::strategies::{
    brute_force_classical_value, eval_deterministic, eval_linear, eval_quantum, random_quantum_strategy,
};
use xorproof::{BitVector, LinearStrategy, RngState, Witness};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_equivalence() -> Verdict {
    let mut rng = RngState::from_seed(0xa1);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let g = game_in(2, 4, &mut rng);
        let a = analyze(&g).map_err(|e| e.to_string())?;
        let (_, brute) = brute_force_classical_value(&g).map_err(|e| e.to_string())?;
        let l = LinearStrategy::new(a.u_star, a.gamma_star);
        let expanded = eval_deterministic(&g, &l.alice_table(), &l.bob_table()).map_err(|e| e.to_string())?;
        let dev = (a.value - brute).abs().max((expanded - brute).abs());
        worst = worst.max(dev);
        ensure(dev <= 1e-12, || format!("game {i}: spectral {} brute {brute} expanded {expanded}", a.value))?;
    }
    Ok(format!("200 games, worst deviation {worst:.1e}"))
}

fn no_entanglement_advantage() -> Verdict {
    let mut rng = RngState::from_seed(0xa2);
    let mut margin = f64::INFINITY;
    for i in 0..50 {
        let g = game_in(1, 3, &mut rng);
        let bound = analyze(&g).map_err(|e| e.to_string())?.value;
        for _ in 0..200 {
            let d = 2 + rng.below(3) as usize;
            let q = random_quantum_strategy(d, g.m(), &mut rng).map_err(|e| e.to_string())?;
            let v = eval_quantum(&g, &q).map_err(|e| e.to_string())?;
            margin = margin.min(bound - v);
            ensure(v <= bound + 1e-9, || format!("game {i}: quantum {v} exceeds {bound}"))?;
        }
    }
    Ok(format!("10000 strategies, smallest margin {margin:.3e}"))
}

fn spectral_certification() -> Verdict {
    let mut rng = RngState::from_seed(0xa3);
    let (mut residual, mut gap): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let g = game_in(1, 8, &mut rng);
        let phi = phi_matrix(&g).map_err(|e| e.to_string())?;
        let lambda = analyze(&g).map_err(|e| e.to_string())?.lambda;
        let n = lambda.len();
        for (u, l) in lambda.iter().enumerate() {
            let h = DVector::from_fn(n, |v, _| if (u & v).count_ones() % 2 == 1 { -1.0 } else { 1.0 });
            residual = residual.max((&phi * &h - &h * *l).norm() / (n as f64).sqrt());
        }
        let top = lambda.iter().fold(0.0f64, |a, l| a.max(l.abs()));
        let dense = SymmetricEigen::new(phi).eigenvalues.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        gap = gap.max((top - dense).abs());
    }
    ensure(residual <= 1e-10 && gap <= 1e-9, || format!("residual {residual:e}, norm gap {gap:e}"))?;
    Ok(format!("50 games, residual {residual:.1e}, norm gap {gap:.1e}"))
}

fn pcp_game_equivalence() -> Verdict {
    let mut rng = RngState::from_seed(0xa4);
    for i in 0..100 {
        let m = 3 + rng.below(10) as usize;
        let inst = random_instance(m, 1 + rng.below(30) as usize, &mut rng).map_err(|e| e.to_string())?;
        let (_, best) = best_witness(&inst).map_err(|e| e.to_string())?;
        let v = analyze(&game_from_instance(&inst)).map_err(|e| e.to_string())?.value;
        ensure((best - v).abs() <= 1e-12, || format!("instance {i}: witness {best} game {v}"))?;
    }
    for i in 0..100 {
        let m = 3 + rng.below(10) as usize;
        let inst = random_instance(m, 1 + rng.below(30) as usize, &mut rng).map_err(|e| e.to_string())?;
        let game = game_from_instance(&inst);
        let w = Witness(BitVector::from_bits(rng.bits(m), m).map_err(|e| e.to_string())?);
        let forward = eval_linear(&game, &witness_to_linear(&w)).map_err(|e| e.to_string())?;
        let wv = witness_value(&inst, &w).map_err(|e| e.to_string())?;
        let strat = LinearStrategy::new(BitVector::from_bits(rng.bits(m), m).map_err(|e| e.to_string())?, rng.bit());
        let back = witness_value(&inst, &linear_to_witness(&strat)).map_err(|e| e.to_string())?;
        let sv = eval_linear(&game, &strat).map_err(|e| e.to_string())?;
        ensure((forward - wv).abs() <= 1e-12 && (back - sv).abs() <= 1e-12, || {
            format!("pair {i}: witness {wv} vs strategy {forward}; strategy {sv} vs witness {back}")
        })?;
    }
    Ok("100 instances, 100 mapping pairs".into())
}

fn completeness() -> Verdict {
    let mut rng = RngState::from_seed(0xa5);
    for i in 0..20 {
        let m = 3 + rng.below(12) as usize;
        let (inst, w) = planted_instance(m, 1 + rng.below(40) as usize, &mut rng).map_err(|e| e.to_string())?;
        let g = game_from_instance(&inst);
        let v = analyze(&g).map_err(|e| e.to_string())?.value;
        ensure((v - 1.0).abs() <= 1e-12, || format!("instance {i}: value {v}"))?;
        let l = witness_to_linear(&w);
        let est = estimate_value(&g, &l.alice(), &l.bob(), 100_000, i).map_err(|e| e.to_string())?;
        ensure(est.accepted == est.trials, || format!("instance {i}: {} of {} accepted", est.accepted, est.trials))?;
    }
    Ok("20 planted instances at value 1, 100000/100000 honest rounds each".into())
}

fn soundness_floor() -> Verdict {
    let mut rng = RngState::from_seed(0xa6);
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let m = 3 + rng.below(10) as usize;
        let inst = contradictory_instance(m, 1 + rng.below(20) as usize, &mut rng).map_err(|e| e.to_string())?;
        let g = game_from_instance(&inst);
        ensure(theta_of(&g).iter().all(|t| *t == 0.0), || format!("instance {i}: theta not identically zero"))?;
        let a = analyze(&g).map_err(|e| e.to_string())?;
        ensure(a.value == 0.5, || format!("instance {i}: value {}", a.value))?;
        let l = LinearStrategy::new(a.u_star, a.gamma_star);
        let n = 1_000_000;
        let est = estimate_value(&g, &l.alice(), &l.bob(), n, 1000 + i).map_err(|e| e.to_string())?;
        let sigma = (0.25 / n as f64).sqrt();
        let z = (est.estimate - 0.5).abs() / sigma;
        worst = worst.max(z);
        ensure(z <= 4.0, || format!("instance {i}: estimate {} is {z:.2} sigma from 0.5", est.estimate))?;
    }
    Ok(format!("5 contradictory instances, worst deviation {worst:.2} sigma"))
}

fn transform_self_test() -> Verdict {
    let mut rng = RngState::from_seed(0xa7);
    for i in 0..20 {
        let m = i % 13;
        let v = random_vector(1 << m, &mut rng);
        let twice = fwht(&fwht(&v).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let scale = (1u64 << m) as f64;
        let err = twice.iter().zip(&v).map(|(x, y)| (x - scale * y).abs()).fold(0.0, f64::max);
        let size = v.iter().fold(0.0f64, |a, x| a.max(x.abs())) * scale;
        ensure(err <= 1e-12 * size, || format!("vector {i} (m={m}): relative error {:e}", err / size))?;
    }
    for m in 0..=8 {
        let v = random_vector(1 << m, &mut rng);
        let fast = fwht(&v).map_err(|e| e.to_string())?;
        let dev = fast.iter().zip(naive_walsh(&v)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        ensure(dev <= 1e-12, || format!("m={m}: deviation {dev:e} from the naive sum"))?;
    }
    Ok("20 involution vectors, naive sums for m = 0..=8".into())
}

fn run_cli(args: &[String]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_xorproof"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let mut bytes = o.stdout;
    bytes.extend(o.status.code().unwrap_or(-1).to_string().bytes());
    Ok(bytes)
}

fn reproducibility() -> Verdict {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let game = path("g.txg");
    let mut rng = RngState::from_seed(0xa8);
    std::fs::write(&game, random_game(3, 8, 3, &mut rng).map_err(|e| e.to_string())?.to_text())
        .map_err(|e| e.to_string())?;

    let (sat, unsat, rand, log, qs) = (path("sat"), path("unsat"), path("rand"), path("log"), path("qs"));
    let commands: Vec<(Vec<&str>, Option<&str>)> = vec![
        (vec!["gen", "--type", "sat3lin", "--m", "12", "--eqs", "40", "--seed", "3", &sat], Some(&sat)),
        (vec!["gen", "--type", "unsat3lin", "--m", "10", "--eqs", "30", "--seed", "3", &unsat], Some(&unsat)),
        (vec!["gen", "--type", "random", "--m", "14", "--eqs", "50", "--seed", "3", &rand], Some(&rand)),
        (vec!["analyze", &rand], None),
        (vec!["value", &rand, "--method", "witness"], None),
        (vec!["value", &game, "--method", "brute"], None),
        (vec!["simulate", &sat, "--trials", "100000", "--seed", "11"], None),
        (vec!["simulate", &rand, "--trials", "20000", "--seed", "11", "--strategy", "linear:10110011100101,1", "--log", &log], Some(&log)),
        (vec!["simulate", &game, "--trials", "100000", "--seed", "12", "--strategy", "linear:101,0"], None),
        (vec!["quantum", &game, "--random", "4", "--seed", "13", "--write", &qs], Some(&qs)),
        (vec!["check", "--level", "fast"], None),
    ];
    for (args, file) in &commands {
        let mut outputs = Vec::new();
        for threads in ["1", "1", "4"] {
            let mut full = vec!["--threads".to_string(), threads.to_string()];
            full.extend(args.iter().map(|s| s.to_string()));
            let mut bytes = run_cli(&full)?;
            if let Some(f) = file {
                bytes.extend(std::fs::read(Path::new(f)).map_err(|e| e.to_string())?);
            }
            outputs.push(bytes);
        }
        ensure(outputs[0] == outputs[1], || format!("`{}` differs between runs", args.join(" ")))?;
        ensure(outputs[0] == outputs[2], || format!("`{}` differs between 1 and 4 threads", args.join(" ")))?;
    }
    Ok(format!("{} seeded commands identical across runs and thread counts", commands.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict, Duration); 8] = [
        (1, "spectral value equals brute force", oracle_equivalence, Duration::from_secs(60)),
        (2, "no entanglement advantage", no_entanglement_advantage, Duration::from_secs(120)),
        (3, "spectral certification", spectral_certification, Duration::from_secs(60)),
        (4, "instance and game values agree", pcp_game_equivalence, Duration::from_secs(60)),
        (5, "completeness on planted instances", completeness, Duration::from_secs(30)),
        (6, "soundness floor on contradictory instances", soundness_floor, Duration::from_secs(60)),
        (7, "transform self-test", transform_self_test, Duration::from_secs(10)),
        (8, "reproducibility", reproducibility, Duration::from_secs(600)),
    ];
    let mut failures = 0;
    for (n, name, f, budget) in criteria {
        let start = Instant::now();
        let verdict = f();
        let took = start.elapsed();
        let verdict = match verdict {
            Ok(detail) if took > budget => Err(format!("{detail}; took {took:.1?}, budget {budget:?}")),
            v => v,
        };
        match verdict {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail} [{took:.2?}]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {n} ({name}): {detail} [{took:.2?}]");
            }
        }
    }
    println!("acceptance: {}/8 criteria passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
