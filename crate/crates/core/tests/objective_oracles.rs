//! Objective functions against independently written formulas.

use std::sync::Arc;

use sos_core::problems::{SphereSurrogate, TaskDefinition};
use sos_core::ProblemSuite;

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(rel_err(got, want) <= tol, "{what}: got {got}, want {want}");
}

/// Upper normal tail by composite Simpson integration of the density.
fn tail(u: f64) -> f64 {
    let (a, b, n) = (u, u + 40.0, 400_000);
    let h = (b - a) / n as f64;
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = phi(a) + phi(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * phi(a + i as f64 * h);
    }
    s * h / 3.0
}

fn oracle_truss(x: [f64; 4], f: f64, l: f64, e: f64) -> [f64; 2] {
    let r2 = 2f64.sqrt();
    let v = l * (2.0 * x[0] + r2 * x[1] + x[2].powf(0.5) + x[3]);
    let d = f * l / e * (2.0 / x[0] + 2.0 * r2 / x[1] - 2.0 * r2 / x[2] + 2.0 / x[3]);
    [v, d]
}

fn oracle_hatch(x: [f64; 2], e: f64, sb_max: f64, d_max: f64) -> [f64; 2] {
    let sk = e * x[0].powi(2) / 100.0;
    let sb = 4500.0 / (x[0] * x[1]);
    let tau = 1800.0 / x[1];
    let delta = 56.2e4 / (e * x[0] * x[1].powi(2));
    let gs = [1.0 - sb / sb_max, 1.0 - tau / 450.0, 1.0 - delta / d_max, 1.0 - sb / sk];
    let mut pen = 0.0;
    for g in gs {
        if g < 0.0 {
            pen -= g;
        }
    }
    [x[0] + 120.0 * x[1], pen]
}

fn oracle_beam(x: [f64; 4], p: f64, l: f64, e: f64) -> ([f64; 2], f64, f64) {
    let [x1, x2, x3, x4] = x;
    let g_mod = 12.0e6;
    let t1 = p / (2f64.sqrt() * x1 * x2);
    let m = p * (l + 0.5 * x2);
    let r = (x2.powi(2) / 4.0 + ((x1 + x3) / 2.0).powi(2)).sqrt();
    let j = 2.0 * (2f64.sqrt() * x1 * x2 * (x2.powi(2) / 12.0 + ((x1 + x3) / 2.0).powi(2)));
    let t2 = m * r / j;
    let tau = (t1.powi(2) + 2.0 * t1 * t2 * x2 / (2.0 * r) + t2.powi(2)).sqrt();
    let sigma = 6.0 * p * l / (x4 * x3.powi(2));
    let pc = 4.013 * e * (x3.powi(2) * x4.powi(6) / 36.0).sqrt() / l.powi(2)
        * (1.0 - x3 / (2.0 * l) * (e / (4.0 * g_mod)).sqrt());
    let gs = [13600.0 - tau, 30000.0 - sigma, x4 - x1, pc - p];
    let viol: f64 = gs.iter().filter(|g| **g < 0.0).map(|g| -g).sum();
    let f1 = 1.10471 * x1.powi(2) * x2 + 0.04811 * x3 * x4 * (14.0 + x2) + 1000.0 * viol;
    let f2 = 4.0 * p * l.powi(3) / (e * x4 * x3.powi(3)) + 1000.0 * viol;
    ([f1, f2], viol, t1)
}

fn oracle_inventory(q: f64, u: f64, d: f64, sl: f64, r: f64, k: f64, c: f64) -> [f64; 2] {
    let pdf = (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let t = tail(u);
    let f1 = k * d / q + (q / 2.0 + u * sl) * r * c;
    let f2 = d / q * t + d * sl / q * (pdf - u * t);
    [f1, f2]
}

fn eval_native(suite: &str, task: usize, x: &[f64]) -> Vec<f64> {
    let s = ProblemSuite::named(suite).unwrap();
    s.task(task).objectives_at(x).unwrap()
}

#[test]
fn truss_worked_example() {
    let x = [1.0, 2f64.sqrt(), 2f64.sqrt(), 1.0];
    let f = eval_native("EO1", 0, &x);
    let o = oracle_truss(x, 10.0, 200.0, 2e5);
    assert_close(f[0], o[0], 1e-9, "EO1 f1");
    assert_close(f[1], o[1], 1e-9, "EO1 f2");
    assert_close(f[0], 200.0 * (5.0 + 2f64.powf(0.25)), 1e-12, "EO1 f1 closed form");
    assert_close(f[0], 1237.8414, 1e-7, "EO1 f1 quoted");
    assert_close(f[1], 0.04, 1e-12, "EO1 f2 quoted");
}

#[test]
fn truss_scaling_properties() {
    let s = ProblemSuite::named("EO1").unwrap();
    let t = s.task(0);
    let longer = t.with_param("L", 400.0).unwrap();
    let x = [1.5, 2.0, 2.5, 1.2];
    assert_close(longer.objectives_at(&x).unwrap()[0] / t.objectives_at(&x).unwrap()[0], 2.0, 1e-14, "f1 in L");

    let x = [2.0, 2.5, 2.5, 2.0];
    let f2 = s.task(1).objectives_at(&x).unwrap()[1];
    let f3 = s.task(2).objectives_at(&x).unwrap()[1];
    let ratio = (8.0 * 200.0 / 1.5e5) / (8.0 * 200.0 / 1.5e5);
    assert_close(f2 / f3, ratio, 1e-14, "f2 ratio");
}

#[test]
fn truss_bounds_from_ratio() {
    let s = ProblemSuite::named("EO1").unwrap();
    let t = s.task(0);
    assert_eq!(t.lower(), &[1.0, 2f64.sqrt(), 2f64.sqrt(), 1.0]);
    assert_eq!(t.upper(), &[3.0; 4]);
    let t3 = s.task(2);
    assert_eq!(t3.lower()[0], 1.0);
}

#[test]
fn hatch_worked_example() {
    let f = eval_native("EO2", 0, &[0.5, 4.0]);
    let o = oracle_hatch([0.5, 4.0], 7e5, 700.0, 1.5);
    assert_close(f[0], o[0], 1e-9, "EO2 f1");
    assert_close(f[1], o[1], 1e-9, "EO2 f2");
    assert_close(f[0], 480.5, 1e-15, "EO2 f1 quoted");
    assert_close(f[1], 2.5, 1e-12, "EO2 f2 quoted");
    assert_eq!(eval_native("EO2", 2, &[4.0, 50.0])[0], 6004.0);
}

#[test]
fn hatch_feasible_design_has_zero_violation() {
    for k in 0..3 {
        assert_eq!(eval_native("EO2", k, &[0.7, 40.0])[1], 0.0);
    }
}

#[test]
fn beam_worked_examples() {
    let s = ProblemSuite::named("EO3").unwrap();
    let x = [5.0, 10.0, 10.0, 5.0];
    let f = s.task(0).objectives_at(&x).unwrap();
    let (o, viol, t1) = oracle_beam(x, 6000.0, 14.0, 3e7);
    assert_eq!(viol, 0.0);
    assert_close(f[0], o[0], 1e-9, "EO3 f1");
    assert_close(f[1], o[1], 1e-9, "EO3 f2");
    assert_close(t1, 84.8528137423857, 1e-12, "tau prime");
    let elastic = 4.0 * 6000.0 * 14f64.powi(3) / (3e7 * 5.0 * 1000.0);
    assert_close(f[1], elastic, 1e-12, "elastic term");
    assert_close(f[1], 4.3904e-4, 1e-12, "elastic term value");

    let unit = [1.0; 4];
    let f = s.task(0).objectives_at(&unit).unwrap();
    let (o, viol, _) = oracle_beam(unit, 6000.0, 14.0, 3e7);
    assert_close(f[0], o[0], 1e-9, "EO3 f1 at ones");
    assert!(viol > 0.0);
    assert_close(f[0], 1.82636 + 1000.0 * viol, 1e-12, "EO3 f1 cost part");
}

#[test]
fn beam_equal_end_widths_do_not_violate() {
    let s = ProblemSuite::named("EO3").unwrap();
    let x = [2.0, 3.0, 9.0, 2.0];
    let (_, viol, _) = oracle_beam(x, 6000.0, 14.0, 3e7);
    let f = s.task(0).objectives_at(&x).unwrap();
    assert_close(f[1], 4.0 * 6000.0 * 14f64.powi(3) / (3e7 * 2.0 * 729.0) + 1000.0 * viol, 1e-12, "f2");
}

#[test]
fn beam_random_points_match_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let s = ProblemSuite::named("EO3").unwrap();
    let settings = [(6000.0, 14.0, 3e7), (4000.0, 14.0, 2e7), (4000.0, 10.0, 2e7)];
    for _ in 0..2000 {
        let k = rng.gen_range(0..3);
        let t = s.task(k);
        let x: Vec<f64> = (0..4).map(|i| rng.gen_range(t.lower()[i]..=t.upper()[i])).collect();
        let (p, l, e) = settings[k];
        let (o, _, _) = oracle_beam([x[0], x[1], x[2], x[3]], p, l, e);
        let f = t.objectives_at(&x).unwrap();
        assert_close(f[0], o[0], 1e-9, "EO3 f1");
        assert_close(f[1], o[1], 1e-9, "EO3 f2");
    }
}

#[test]
fn inventory_worked_example() {
    let f = eval_native("IM1", 0, &[3412.0, 1.0]);
    let o = oracle_inventory(3412.0, 1.0, 3412.0, 53.354, 0.26, 80.0, 27.5);
    assert_close(f[0], o[0], 1e-9, "IM f1");
    assert_close(f[1], o[1], 1e-9, "IM f2");
    assert_close(f[0], 80.0 + (1706.0 + 53.354) * 7.15, 1e-12, "IM f1 closed form");
    assert!((f[0] - 12659.38).abs() < 0.01);
    assert!((f[1] - 4.6039).abs() < 1e-4);
}

#[test]
fn inventory_random_points_match_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for name in ["IM1", "IM2", "IM3"] {
        let s = ProblemSuite::named(name).unwrap();
        for t in s.tasks() {
            let p = t.setting();
            let get = |k: &str| p.get(k).unwrap();
            for _ in 0..20 {
                let q = rng.gen_range(t.lower()[0]..=t.upper()[0]);
                let u = rng.gen_range(1.0..6.0f64).min(t.upper()[1]);
                let f = t.objectives_at(&[q, u]).unwrap();
                let o = oracle_inventory(q, u, get("D"), get("sigma_L"), get("r"), get("K"), get("c"));
                assert_close(f[0], o[0], 1e-9, "IM f1");
                assert_close(f[1], o[1], 1e-9, "IM f2");
            }
        }
    }
}

#[test]
fn inventory_bounds() {
    let s = ProblemSuite::named("IM1").unwrap();
    let t = s.task(1);
    let eoq = (2.0 * 80.0 * 490.0 / (0.3 * 241.0f64)).sqrt();
    assert_close(t.lower()[0], eoq, 1e-15, "EOQ");
    assert!((t.lower()[0] - 32.928).abs() < 2e-3);
    assert_eq!(t.upper(), &[490.0, 490.0 / 5.027]);
    assert_eq!(t.lower()[1], 1.0);
}

#[test]
fn inventory_shortage_strictly_decreasing_in_reorder_point() {
    for name in ["IM1", "IM2", "IM3"] {
        let s = ProblemSuite::named(name).unwrap();
        for t in s.tasks() {
            for qi in 0..=10 {
                let s = qi as f64 / 10.0;
                let q = t.lower()[0] * (1.0 - s) + t.upper()[0] * s;
                let hi = t.upper()[1].min(8.0);
                let mut prev = f64::INFINITY;
                for ui in 0..=200 {
                    let u = 1.0 + (hi - 1.0) * ui as f64 / 200.0;
                    let f2 = t.objectives_at(&[q, u]).unwrap()[1];
                    assert!(f2 < prev, "{name} {}: f2 not decreasing at q={q}, u={u}", t.name());
                    prev = f2;
                }
            }
        }
    }
}

#[test]
fn all_objectives_finite_on_dense_grids() {
    for name in sos_core::problems::SUITE_NAMES {
        let s = ProblemSuite::named(name).unwrap();
        for t in s.tasks() {
            let d = t.dim();
            let per_axis: usize = if d == 2 { 100 } else { 10 };
            let total = per_axis.pow(d as u32);
            assert!(total >= 10_000);
            for idx in 0..total {
                let mut rest = idx;
                let u: Vec<f64> = (0..d)
                    .map(|_| {
                        let i = rest % per_axis;
                        rest /= per_axis;
                        i as f64 / (per_axis - 1) as f64
                    })
                    .collect();
                let f = t.evaluate(&u).unwrap();
                assert!(f.iter().all(|v| v.is_finite()), "{name} {} at {u:?}", t.name());
                if name == "EO2" || name == "EO3" {
                    assert!(f[1] >= 0.0);
                }
                if name.starts_with("IM") {
                    assert!(f[1] >= 0.0);
                }
            }
        }
    }
}

#[test]
fn evaluation_is_deterministic_and_counted() {
    let s = ProblemSuite::named("EO2").unwrap();
    let t = s.task(0);
    assert_eq!(t.evaluations(), 0);
    let a = t.evaluate(&[0.0, 0.0]).unwrap();
    let b = t.evaluate(&[0.0, 0.0]).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, vec![480.5, 2.5]);
    for _ in 0..8 {
        t.evaluate(&[0.3, 0.7]).unwrap();
    }
    assert_eq!(t.evaluations(), 10);
}

#[test]
fn unified_corners_decode_to_bounds() {
    for name in sos_core::problems::SUITE_NAMES {
        let s = ProblemSuite::named(name).unwrap();
        for t in s.tasks() {
            let d = s.d_max();
            assert_eq!(t.decode(&vec![0.0; d]).unwrap(), t.lower());
            assert_eq!(t.decode(&vec![1.0; d]).unwrap(), t.upper());
            let u: Vec<f64> = (0..d).map(|i| (i as f64 + 0.37) / (d as f64 + 1.0)).collect();
            let back = t.encode(&t.decode(&u).unwrap());
            for (a, b) in u.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn external_surrogate_through_unified_space() {
    let sphere = SphereSurrogate { dim: 2, lower: 0.0, upper: 2.0 };
    let t = TaskDefinition::external("sphere", Arc::new(sphere)).unwrap();
    assert_eq!(t.decode(&[0.5, 0.5]).unwrap(), vec![1.0, 1.0]);
    assert_eq!(t.evaluate(&[0.5, 0.5]).unwrap(), vec![2.0, 0.0]);
    assert_eq!(t.evaluations(), 1);
}
