mod common;

use grushin::horizontal::solve_horizontal;
use grushin::variational::{minimize, newton_solve, DiscreteFunctional, DiscreteProblem, Orientation};
use grushin::vertical::solve_vertical;
use grushin::{Alpha, QuadratureSpec};
use rand::Rng;

fn closed_form(a: f64, orientation: Orientation) -> f64 {
    let alpha = Alpha::new(a).unwrap();
    let spec = QuadratureSpec::default();
    match orientation {
        Orientation::Vertical => solve_vertical(alpha, 1.0, spec).unwrap().min_perimeter().unwrap(),
        Orientation::Horizontal => solve_horizontal(alpha, 1.0, spec).unwrap().min_perimeter().unwrap(),
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = common::rng(7);
    for trial in 0..20 {
        let a = [0.0, 0.5, 1.0, 2.0][trial % 4];
        let orientation = if trial % 2 == 0 { Orientation::Vertical } else { Orientation::Horizontal };
        let m = rng.gen_range(8..40);
        let h = rng.gen_range(0.02..0.1);
        let u: Vec<f64> = (0..=m).map(|_| rng.gen_range(0.2..1.5)).collect();
        let probe = DiscreteFunctional::new(Alpha::new(a).unwrap(), orientation, h, m, 1e4, 0.0);
        let target = probe.half_area(&u) * rng.gen_range(0.95..1.05);
        let f = DiscreteFunctional::new(Alpha::new(a).unwrap(), orientation, h, m, 1e4, target);
        let g = f.gradient(&u);
        let scale = g.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        for i in 0..u.len() {
            let step = 1e-6;
            let (mut up, mut down) = (u.clone(), u.clone());
            up[i] += step;
            down[i] -= step;
            let fd = (f.value(&up) - f.value(&down)) / (2.0 * step);
            assert!((fd - g[i]).abs() <= 1e-6 * scale, "trial {trial} i {i}: {fd} vs {}", g[i]);
        }
    }
}

#[test]
fn newton_objective_never_increases() {
    for (a, orientation) in [(0.0, Orientation::Vertical), (1.0, Orientation::Vertical), (1.0, Orientation::Horizontal)] {
        let m = 60;
        let h = 1.0 / m as f64;
        let f = DiscreteFunctional::new(Alpha::new(a).unwrap(), orientation, h, m, 1e4, 0.5);
        let start: Vec<f64> = (0..=m).map(|i| 0.6 * (1.0 - (i as f64 * h).powi(2))).collect();
        let out = newton_solve(&f, &start, 100, 1e-12);
        assert!(out.trace.len() > 1);
        for w in out.trace.windows(2) {
            assert!(w[1] <= w[0], "objective rose from {} to {}", w[0], w[1]);
        }
    }
}

#[test]
fn solver_never_undercuts_the_closed_form() {
    for orientation in [Orientation::Vertical, Orientation::Horizontal] {
        for a in [0.0, 1.0] {
            let exact = closed_form(a, orientation);
            for n in [100, 200] {
                let problem = DiscreteProblem::new(Alpha::new(a).unwrap(), 1.0, orientation).unwrap().with_grid(n);
                let report = minimize(&problem).unwrap();
                assert!(report.converged);
                assert!((report.area - 1.0).abs() < 1e-6);
                assert!(report.perimeter >= exact * (1.0 - 5e-3), "{orientation} alpha {a} n {n}");
            }
        }
    }
}

#[test]
fn refinement_reduces_the_error() {
    let exact = closed_form(1.0, Orientation::Vertical);
    let errors: Vec<f64> = [200, 400, 800]
        .iter()
        .map(|&n| {
            let problem = DiscreteProblem::new(Alpha::new(1.0).unwrap(), 1.0, Orientation::Vertical).unwrap().with_grid(n);
            (minimize(&problem).unwrap().perimeter - exact).abs()
        })
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn coarse_grid_still_converges() {
    let problem = DiscreteProblem::new(Alpha::new(1.0).unwrap(), 1.0, Orientation::Vertical).unwrap().with_grid(16);
    let report = minimize(&problem).unwrap();
    assert!(report.converged);
    let exact = closed_form(1.0, Orientation::Vertical);
    assert!(report.perimeter > exact);
}

#[test]
fn tiny_volume_scales_by_homogeneity() {
    let alpha = Alpha::new(1.0).unwrap();
    let v = 1e-12;
    let small = minimize(&DiscreteProblem::new(alpha, v, Orientation::Vertical).unwrap()).unwrap();
    let unit = minimize(&DiscreteProblem::new(alpha, 1.0, Orientation::Vertical).unwrap()).unwrap();
    let predicted = unit.perimeter * v.powf(2.0 / 3.0);
    assert!((small.perimeter - predicted).abs() < 1e-6 * predicted, "{} vs {predicted}", small.perimeter);
}
