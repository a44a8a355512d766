//! Finite-leaf earthquakes on lifts of one-holed tori, composed leaf by leaf,
//! against the closed-form endpoint bound.

use fns_core::hyp::twist_endpoint_bound;
use fns_core::length::holonomy_build;
use fns_core::mat2::Mat2;
use fns_core::surface::one_holed_torus;

type M = Mat2<f64>;

fn fixed_points(m: &M) -> (f64, f64) {
    let tr = m.a + m.d;
    let disc = (tr * tr - 4.0).sqrt();
    let p = (m.a - m.d + disc) / (2.0 * m.c);
    let q = (m.a - m.d - disc) / (2.0 * m.c);
    (p.min(q), p.max(q))
}

fn pow(m: &M, k: i64) -> M {
    let base = if k < 0 { m.inv_sl2() } else { *m };
    (0..k.unsigned_abs()).fold(M::identity(), |acc, _| acc * base)
}

struct Lift {
    dual: M,
    x1: f64,
    x2: f64,
    /// Power sign whose images of the imaginary axis lie on the `x1` side.
    side: i64,
}

/// Dual holonomy of the torus conjugated so that its axis passes through `i`.
fn lift(l: f64, tau: f64) -> Lift {
    let (g, x) = one_holed_torus(l, tau, 0.0).unwrap();
    let b = holonomy_build(&g, &x).unwrap().piece(0).unwrap().dual_word(0).to_float();
    let (p, q) = fixed_points(&b);
    let s = (-p * q).sqrt();
    let n = M::diag(1.0 / s.sqrt(), s.sqrt());
    let dual = n * b * n.inv_sl2();
    let (x1, x2) = fixed_points(&dual);
    let up = dual.apply(0.0).max(dual.a / dual.c);
    let side = if up < 0.0 { 1 } else { -1 };
    Lift { dual, x1, x2, side }
}

/// Image of `x1` under the left earthquake of magnitude `t` along the first `leaves` lifts.
///
/// Leaf `k` is `P^k(iR+)` with `P` the dual power on the `x1` side, so the
/// composed shear is `Π P^k S P^-k = (S P)^(n-1) S P^-(n-1)` and `P` fixes `x1`.
fn quake(lf: &Lift, t: f64, leaves: usize) -> f64 {
    let shear = M::diag((t / 2.0).exp(), (-t / 2.0).exp());
    let p = pow(&lf.dual, lf.side);
    (1..leaves).fold(shear.apply(lf.x1), |z, _| shear.apply(p.apply(z)))
}

#[test]
fn leaves_sit_between_axis_and_x1() {
    let lf = lift(1.0, 0.3);
    assert!((lf.x1 * lf.x2 + 1.0).abs() < 1e-12);
    for k in 1..7 {
        let g = pow(&lf.dual, lf.side * k);
        let (u, v) = (g.apply(0.0), g.a / g.c);
        // each leaf separates x1 from the axis and crosses the dual axis
        assert!(u.min(v) < lf.x1 && lf.x1 < u.max(v) && u.max(v) < 0.0);
    }
}

#[test]
fn seven_leaves_land_left_of_bound() {
    // symmetric torus (m = 0) and a torus with m < 0
    for (l, tau) in [(1.0, 0.0), (1.0, 0.7), (0.4, 0.2), (2.0, 1.5)] {
        let lf = lift(l, tau);
        let m = (lf.x1 + lf.x2) / 2.0;
        assert!(m <= 1e-12, "m = {m} at ({l}, {tau})");
        let t = 1.0;
        let bound = twist_endpoint_bound(lf.x1, lf.x2, t).unwrap();
        let one = quake(&lf, t, 1);
        assert!((one - lf.x1 * t.exp()).abs() < 1e-12 * one.abs());
        assert!(one <= bound + 1e-12);
        let mut prev = one;
        let mut gap = f64::INFINITY;
        for n in 2..=7 {
            let img = quake(&lf, t, n);
            assert!(img < bound, "{n} leaves: {img} vs {bound}");
            assert!(img < prev);
            assert!(prev - img < gap);
            gap = prev - img;
            prev = img;
        }
    }
}

#[test]
fn single_leaf_meets_bound_when_symmetric() {
    let lf = lift(1.3, 0.0);
    for t in [0.5, 1.0, 3.0] {
        let b = twist_endpoint_bound(lf.x1, lf.x2, t).unwrap();
        assert!((quake(&lf, t, 1) - b).abs() < 1e-12 * b.abs());
    }
}

#[test]
fn positive_midpoint_lands_right_of_bound() {
    // the displayed bound only holds for m <= 0
    let lf = lift(1.0, -0.7);
    let m = (lf.x1 + lf.x2) / 2.0;
    assert!((m - 0.403).abs() < 1e-3);
    let bound = twist_endpoint_bound(lf.x1, lf.x2, 1.0).unwrap();
    let img = quake(&lf, 1.0, 7);
    assert!((img + 1.952).abs() < 1e-3 && (bound + 2.345).abs() < 1e-3);
    assert!(img > bound);
}

