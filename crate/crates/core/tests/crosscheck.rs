use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, NegativeBinomial};
use statrs::function::gamma;

use nbp::analytics::nb_pmf;
use nbp::special::{chi_square_sf, gamma_p, gamma_q, ln_gamma};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn ln_gamma_agrees() {
    for i in 1..400 {
        let x = i as f64 * 0.173;
        assert!(close(ln_gamma(x), gamma::ln_gamma(x), 1e-12), "x = {x}");
    }
}

#[test]
fn incomplete_gamma_agrees() {
    for a in [0.5, 1.0, 2.5, 7.0, 30.0, 120.0] {
        assert_eq!(gamma_p(a, 0.0), 0.0);
        for i in 1..60 {
            let x = i as f64 * a / 15.0;
            assert!(close(gamma_p(a, x), gamma::gamma_lr(a, x), 1e-10), "P({a}, {x})");
            assert!(close(gamma_q(a, x), gamma::gamma_ur(a, x), 1e-10), "Q({a}, {x})");
        }
    }
}

#[test]
fn chi_square_tail_agrees() {
    for dof in [1usize, 2, 5, 13, 40] {
        let d = ChiSquared::new(dof as f64).unwrap();
        for x in [0.1, 1.0, 5.0, 20.0, 60.0] {
            assert!(close(chi_square_sf(x, dof), d.sf(x), 1e-9), "dof {dof} x {x}");
        }
    }
}

#[test]
fn nb_pmf_agrees() {
    // statrs counts failures before r successes with success probability q,
    // so NB(r, p) here corresponds to q = 1 - p.
    for (r, p) in [(2.0, 0.3), (2.5, 0.6), (0.5, 0.5), (10.0, 0.1)] {
        let d = NegativeBinomial::new(r, 1.0 - p).unwrap();
        for k in 0..60 {
            assert!(close(nb_pmf(k, r, p).unwrap(), d.pmf(k), 1e-10), "r {r} p {p} k {k}");
        }
    }
}
