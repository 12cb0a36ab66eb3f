mod common;

use common::{game_in, naive_walsh};
use nalgebra::DVector;
use xorproof::games::{analyze, phi_matrix, theta_of, verify_spectrum, GameClause, TransversalGame};
use xorproof::RngState;

#[test]
fn theta_l1_is_at_most_half() {
    let mut rng = RngState::from_seed(1);
    for _ in 0..100 {
        let g = game_in(4, 4, &mut rng);
        let l1: f64 = theta_of(&g).iter().map(|t| t.abs()).sum();
        // Direct summation over clauses bounds the offsets' total mass.
        let mass: f64 = g.clauses().iter().map(|c| 0.5 * c.weight).sum();
        assert!(l1 <= mass + 1e-15);
        assert!(l1 <= 0.5 + 1e-12);
    }
}

#[test]
fn lambda_matches_double_sum() {
    let mut rng = RngState::from_seed(2);
    for _ in 0..50 {
        let g = game_in(1, 8, &mut rng);
        let a = analyze(&g).unwrap();
        for (x, y) in a.lambda.iter().zip(naive_walsh(&a.theta)) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
}

#[test]
fn analysis_invariants() {
    let mut rng = RngState::from_seed(3);
    for _ in 0..100 {
        let g = game_in(1, 6, &mut rng);
        let a = analyze(&g).unwrap();
        let top = a.lambda[a.u_star.index()];
        assert_eq!(a.value, 0.5 + top.abs());
        assert!(a.lambda.iter().all(|l| l.abs() <= top.abs()));
        // Smallest encoding among maximizers.
        assert!(a.lambda[..a.u_star.index()].iter().all(|l| l.abs() < top.abs()));
        assert_eq!(a.gamma_star, top < 0.0);
        assert!((0.0..=1.0).contains(&a.value));
    }
}

#[test]
fn hadamard_vectors_are_eigenvectors() {
    let mut rng = RngState::from_seed(4);
    for _ in 0..20 {
        let g = game_in(4, 4, &mut rng);
        let phi = phi_matrix(&g).unwrap();
        let a = analyze(&g).unwrap();
        for u in 0..16usize {
            let h = DVector::from_fn(16, |v, _| if (u & v).count_ones() % 2 == 1 { -1.0 } else { 1.0 });
            let residual = (&phi * &h - &h * a.lambda[u]).norm();
            assert!(residual <= 1e-10, "u={u}: residual {residual:e}");
        }
    }
}

#[test]
fn spectrum_report_within_tolerance() {
    let mut rng = RngState::from_seed(5);
    for _ in 0..20 {
        let g = game_in(1, 8, &mut rng);
        let rep = verify_spectrum(&g).unwrap();
        assert!(rep.max_residual <= 1e-10);
        assert!(rep.norm_gap <= 1e-9);
    }
}

#[test]
fn value_ignores_clause_order_and_splitting() {
    let mut rng = RngState::from_seed(6);
    for _ in 0..50 {
        let g = game_in(2, 6, &mut rng);
        let base = analyze(&g).unwrap().value;
        let mut rev: Vec<GameClause> = g.clauses().iter().rev().cloned().collect();
        let reversed = TransversalGame::new(g.m(), rev.clone()).unwrap();
        assert!((analyze(&reversed).unwrap().value - base).abs() <= 1e-12);
        rev = rev
            .into_iter()
            .flat_map(|c| {
                let third = GameClause { weight: c.weight / 3.0, ..c.clone() };
                [third.clone(), third.clone(), third]
            })
            .collect();
        let split = TransversalGame::new(g.m(), rev).unwrap();
        assert_eq!(split.clauses().len(), g.clauses().len());
        assert!((analyze(&split).unwrap().value - base).abs() <= 1e-12);
    }
}

#[test]
fn zero_theta_means_half() {
    let bv = |s: &str| s.parse().unwrap();
    let g = TransversalGame::new(
        4,
        vec![
            GameClause::new(bv("1100"), 0, false, 0.25),
            GameClause::new(bv("1100"), 1, true, 0.25),
            GameClause::new(bv("0111"), 7, true, 0.25),
            GameClause::new(bv("0111"), 2, false, 0.25),
        ],
    )
    .unwrap();
    assert!(theta_of(&g).iter().all(|t| *t == 0.0));
    assert_eq!(analyze(&g).unwrap().value, 0.5);
    assert_eq!(verify_spectrum(&g).unwrap().operator_norm, 0.0);
}

#[test]
fn game_file_with_comments_and_rounding() {
    let text = "# three clauses\ntxg v1\nm 3\n\nclause z=111 r=1 g=1 w=0.3333333333\n# mid\nclause z=110 r=0 g=0 w=0.3333333333\nclause w=0.3333333334 g=0 r=2 z=011\n";
    let g = TransversalGame::parse(text).unwrap();
    assert_eq!(g.clauses().len(), 3);
    let text = "txg v1\nm 3\nclause z=111 r=1 g=1 w=0.5\n";
    assert!(TransversalGame::parse(text).is_err());
}
