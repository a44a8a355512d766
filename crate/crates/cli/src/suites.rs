//! Verification suites. Each criterion yields one [`Assertion`] with its measured values.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::time::Instant;

use fns_core::constructions::{
    connect_path, cumulative_point, path_lipschitz_check, sample_path, sum_ratio_lemma, SequenceKind, SequenceSpec,
};
use fns_core::hyp::{groetzsch_mu, quad_modulus_h};
use fns_core::length::{apply_twist, geodesic_length, geodesic_lengths, holonomy_build, rho_of, wolpert_residual, TwistVector};
use fns_core::metrics::{
    calibrate_constants, dls_estimate, dls_twist_upper, dqc_lower_multitwist, ls_membership, twist_comparison,
    CalibrationGrid, CertificateConfig, ConstantsProfile, DeformationLaw, Verdict,
};
use fns_core::surface::{
    build_family, enumerate_curves, four_holed_sphere, one_holed_torus, twisted_dual, Coord, FnPoint, LengthLaw,
    MarkedPair, PantsGraph, SurfaceFamily, TwistLaw,
};
use fns_core::Ext;
use num::bigint::BigInt;
use num::rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{Assertion, SuiteResult};
use crate::{CliError, CliResult};

pub const SUITES: [&str; 6] =
    ["special-functions", "holonomy", "bounds-ordering", "counterexample-trends", "membership", "path"];

/// Criteria run by each suite.
pub fn criteria_of(suite: &str) -> CliResult<&'static [&'static str]> {
    Ok(match suite {
        "special-functions" => &["1"],
        "holonomy" => &["2", "3"],
        "bounds-ordering" => &["4", "5"],
        "counterexample-trends" => &["6a", "6b", "7", "10"],
        "membership" => &["8"],
        "path" => &["9"],
        _ => return Err(CliError::Usage(format!("unknown suite '{suite}'"))),
    })
}

pub fn all_criteria() -> Vec<&'static str> {
    vec!["1", "2", "3", "4", "5", "6a", "6b", "7", "8", "9", "10"]
}

/// Twist magnitudes shared by the grid criteria.
pub const TWIST_GRID: [f64; 10] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0];

pub fn flute_family() -> SurfaceFamily {
    SurfaceFamily::flute(LengthLaw::exp_linear())
}

/// Grid used when no profile is supplied: `l = e^{-n}` for `n = 2..=20`.
pub fn standard_grid() -> CalibrationGrid {
    CalibrationGrid { indices: (2..=20).collect(), twists: TWIST_GRID.to_vec(), twist_depth: 1 }
}

pub fn standard_profile() -> CliResult<ConstantsProfile> {
    Ok(calibrate_constants(&flute_family(), &standard_grid(), &ConstantsProfile::default())?)
}

pub struct Context {
    pub profile: ConstantsProfile,
    pub timing: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn build(f: &SurfaceFamily, n: usize) -> CliResult<(PantsGraph, FnPoint)> {
    Ok(build_family(f, n)?)
}

type Check = CliResult<(bool, Value)>;

fn special_functions() -> Check {
    let mu = groetzsch_mu(FRAC_1_SQRT_2)?;
    let mut worst_pair: f64 = 0.0;
    for j in 1..=50 {
        let r = j as f64 / 51.0;
        let rp = ((1.0 - r) * (1.0 + r)).sqrt();
        worst_pair = worst_pair.max((groetzsch_mu(r)? * groetzsch_mu(rp)? - PI * PI / 4.0).abs());
    }
    let h1 = quad_modulus_h(Ext::from_float(1.0))?;
    let mut increasing = true;
    let mut prev = f64::NEG_INFINITY;
    for j in 0..=2000 {
        let t = Ext::from_ln((-8.0 + 16.0 * j as f64 / 2000.0) * 10f64.ln());
        let h = quad_modulus_h(t)?;
        increasing &= h > prev;
        prev = h;
    }
    let ok = (mu - FRAC_PI_2).abs() <= 1e-12 && worst_pair <= 1e-12 && (h1 - 1.0).abs() <= 1e-10 && increasing;
    Ok((
        ok,
        json!({"mu_inv_sqrt2_error": (mu - FRAC_PI_2).abs(), "mu_product_max_error": worst_pair,
               "h1_error": (h1 - 1.0).abs(), "h_increasing_on_grid": increasing}),
    ))
}

fn random_piece(rng: &mut ChaCha8Rng, torus: bool, l_min: f64) -> CliResult<(PantsGraph, FnPoint, f64)> {
    let l = rng.gen_range(l_min..3.0);
    let tau = rng.gen_range(-3.0..3.0);
    let s = if torus {
        one_holed_torus(l, tau, rng.gen_range(0.0..2.0))?
    } else {
        let mut holes = [0.0; 4];
        for h in &mut holes {
            *h = if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.0..2.0) };
        }
        four_holed_sphere(l, tau, holes)?
    };
    Ok((s.0, s.1, l))
}

fn dual_len(g: &PantsGraph, x: &FnPoint, k: i64) -> CliResult<f64> {
    let h = holonomy_build(g, x)?;
    Ok(geodesic_length(&h, &twisted_dual(g, 0, k)?)?.to_float())
}

fn holonomy_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let (mut trace_err, mut relabel_err, mut wolpert): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for j in 0..100 {
        let torus = j % 2 == 0;
        let (g, x, l) = random_piece(&mut rng, torus, 0.05)?;
        let h = holonomy_build(&g, &x)?;
        let p = h.piece(0)?;
        trace_err = trace_err.max(rel(p.curve_word().trace().abs().to_float(), 2.0 * (l / 2.0).cosh()));
        for (len, tr) in p.boundary_traces() {
            trace_err = trace_err.max(rel(tr.to_float(), 2.0 * (len.to_float() / 2.0).cosh()));
        }
        let k = rng.gen_range(-3i64..=3);
        let mut y = x.clone();
        y.coords[0].twist += k as f64 * l;
        relabel_err = relabel_err.max(rel(dual_len(&g, &x, k)?, dual_len(&g, &y, 0)?));
    }
    for j in 0..100 {
        let (g, x, _) = random_piece(&mut rng, j % 2 == 0, 0.1)?;
        wolpert = wolpert.max(wolpert_residual(&g, &x, 0, 1e-4)?);
    }
    let ok = trace_err <= 1e-9 && relabel_err <= 1e-9 && wolpert <= 1e-5;
    Ok((ok, json!({"boundary_trace_rel_error": trace_err, "relabel_rel_error": relabel_err, "wolpert_residual": wolpert})))
}

fn twist_length_inequality() -> Check {
    let f = flute_family();
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut worst: f64 = f64::NEG_INFINITY;
    for n in 2..=20usize {
        let (g, x) = build(&f, n + 1)?;
        let i = n - 1;
        let fam = enumerate_curves(&g, 2);
        let l0 = geodesic_lengths(&holonomy_build(&g, &x)?, &fam)?;
        for &t in &TWIST_GRID {
            let y = apply_twist(&g, &x, &TwistVector::single(i, t))?;
            let lt = geodesic_lengths(&holonomy_build(&g, &y)?, &fam)?;
            for ((c, a), b) in fam.iter().zip(&l0).zip(&lt) {
                let (a, b) = (a.to_float(), b.to_float());
                let slack = (b - a).abs() - f64::from(c.intersection(i)) * t;
                worst = worst.max(slack / a.max(1.0));
                checked += 1;
                if slack > 1e-9 * a.max(1.0) {
                    violations += 1;
                }
            }
        }
    }
    Ok((violations == 0, json!({"checked": checked, "violations": violations, "worst_relative_slack": worst})))
}

fn bounds_ordering(cp: &ConstantsProfile) -> Check {
    let f = flute_family();
    let (mut lower_v, mut upper_v, mut points, mut skipped) = (0usize, 0usize, 0usize, 0usize);
    for n in 2..=20usize {
        let (g, x) = build(&f, n + 1)?;
        for &t in &TWIST_GRID {
            let c = twist_comparison(&g, &x, n - 1, t, cp)?;
            points += 1;
            if c.measured > c.upper + 1e-12 {
                upper_v += 1;
            }
            match c.lower {
                Some(lo) if lo > c.measured + 1e-12 => lower_v += 1,
                Some(_) => {}
                None => skipped += 1,
            }
        }
    }
    Ok((
        lower_v == 0 && upper_v == 0,
        json!({"points": points, "lower_violations": lower_v, "upper_violations": upper_v,
               "lower_outside_hypothesis": skipped, "d_defect": cp.d_defect, "profile_hash": cp.hash()}),
    ))
}

fn random_pair(rng: &mut ChaCha8Rng, depth: usize) -> CliResult<MarkedPair> {
    let (g, x) = build(&flute_family(), depth)?;
    let mut base = x.clone();
    let mut target = x.clone();
    for (i, c) in g.curves.iter().enumerate() {
        let l = x.length(i);
        if c.is_interior() {
            base.coords[i].twist = rng.gen_range(-1.0..1.0) * l.to_float();
            target.coords[i] = Coord {
                length: l * Ext::from_ln(rng.gen_range(-1.0..1.0)),
                twist: rng.gen_range(-2.0..2.0),
            };
        } else {
            target.coords[i].length = l * Ext::from_ln(rng.gen_range(-1.0..1.0));
        }
    }
    Ok(MarkedPair::new(g, base, target)?)
}

fn exhaustion_monotone() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut violations = 0usize;
    let mut evaluated = 0usize;
    for _ in 0..20 {
        let pair = random_pair(&mut rng, 30)?;
        let mut table = vec![vec![0.0; 6]; 31];
        for (n, row) in table.iter_mut().enumerate().skip(2) {
            let p = pair.truncate(n)?;
            for (k, cell) in row.iter_mut().enumerate() {
                *cell = dls_estimate(&p, k as u32, n)?.bound.value;
                evaluated += 1;
            }
        }
        for (n, row) in table.iter().enumerate().skip(2) {
            for k in 0..row.len() {
                if n > 2 && row[k] < table[n - 1][k] {
                    violations += 1;
                }
                if k > 0 && row[k] < row[k - 1] {
                    violations += 1;
                }
            }
        }
    }
    Ok((violations == 0, json!({"pairs": 20, "estimates": evaluated, "violations": violations})))
}

fn strictly(v: &[f64], decreasing: bool) -> bool {
    v.windows(2).all(|w| if decreasing { w[1] < w[0] } else { w[1] > w[0] })
}

fn dls_upper_trend() -> Check {
    let f = flute_family();
    let (g, x) = build(&f, 51)?;
    let col: Vec<f64> = (5..=50)
        .map(|n| {
            let i = n - 1;
            let t = x.length(i).ln().abs().ln();
            Ok(dls_twist_upper(&g, &x, i, t)?.value)
        })
        .collect::<CliResult<_>>()?;
    let last = *col.last().expect("nonempty");
    Ok((strictly(&col, true) && last < 0.02, json!({"n": [5, 50], "first": col[0], "at_50": last, "decreasing": strictly(&col, true)})))
}

fn dqc_lower_trend() -> Check {
    let (g, x) = build(&flute_family(), 11)?;
    let i = 9;
    let rho = rho_of(&holonomy_build(&g, &x)?, i)?;
    let col: Vec<f64> = (1..=20)
        .map(|t| Ok(dqc_lower_multitwist(&TwistVector::single(i, t as f64), &[(i, rho)])?.value))
        .collect::<CliResult<_>>()?;
    let at20 = col[19];
    Ok((strictly(&col, false) && at20 > 2.0, json!({"curve": "C10", "rho": rho, "at_1": col[0], "at_20": at20, "increasing": strictly(&col, false), "target": 2.0})))
}

fn nondense_bounds(cp: &ConstantsProfile) -> Check {
    let f = flute_family();
    let (g, x) = build(&f, 20)?;
    let mut ok = true;
    let spec = SequenceSpec::new(SequenceKind::Nondense { n_const: 1.0 });
    let p = cumulative_point(&f, &spec, 20)?;
    let pair = MarkedPair::new(g, x, p.point.clone())?;
    let est = dls_estimate(&pair, 1, 20)?.bound.value;
    let law = spec.deformation_law(&f.length_law).expect("nondense law");
    let verdict = ls_membership(&pair, cp.n_member, Some(&law), &CertificateConfig::default())?.verdict;
    ok &= p.dls_upper.value <= 1.0 / (2.0 * p.collar_c) + 1e-12 && est <= p.dls_upper.value && verdict == Verdict::Inside;
    let mut zk = Vec::new();
    for k in [1u32, 2, 4, 8] {
        let z = cumulative_point(&f, &SequenceSpec::new(SequenceKind::Zk { k }), 20)?;
        ok &= z.dls_upper.value <= 1.0 / (2.0 * z.collar_c * f64::from(k)) + 1e-12;
        zk.push(z.dls_upper.value);
    }
    let ratios: Vec<f64> = zk.windows(2).map(|w| w[1] / w[0]).collect();
    ok &= ratios.iter().all(|r| (r / 0.5 - 1.0).abs() <= 0.1);
    Ok((
        ok,
        json!({"nondense_upper": p.dls_upper.value, "n_over_2c": 1.0 / (2.0 * p.collar_c), "measured_estimate": est,
               "membership": verdict, "zk_upper": zk, "halving_ratios": ratios}),
    ))
}

fn membership_dichotomy(cp: &ConstantsProfile) -> Check {
    let f = flute_family();
    let mut out = Vec::new();
    let mut ok = true;
    for (name, tw, want) in [
        ("linear", TwistLaw::Linear { slope: 1.0 }, Verdict::Inside),
        ("exp", TwistLaw::Exp { rate: 1.0 }, Verdict::Outside),
    ] {
        let law = DeformationLaw::twist_only(f.length_law.clone(), tw);
        for depth in [20usize, 40] {
            let (g, x) = build(&f, depth)?;
            let y = law.apply(&g, &x)?;
            let m = ls_membership(&MarkedPair::new(g, x, y)?, cp.n_member, Some(&law), &CertificateConfig::default())?;
            ok &= m.verdict == want && (want != Verdict::Outside || m.certificate.is_some());
            out.push(json!({"law": name, "depth": depth, "verdict": m.verdict, "worst_ratio": m.worst_ratio}));
        }
    }
    Ok((ok, Value::Array(out)))
}

fn path_criterion(cp: &ConstantsProfile) -> Check {
    let f = flute_family();
    let (g, x) = build(&f, 15)?;
    let spec = SequenceSpec::new(SequenceKind::Nondense { n_const: 1.0 });
    let target = cumulative_point(&f, &spec, 15)?.point;
    let pair = MarkedPair::new(g, x, target)?;
    let law = spec.deformation_law(&f.length_law).expect("nondense law");
    let path = connect_path(&pair, Some(&law), cp, 1, 15)?;
    let samples = sample_path(&pair, &path, 10, cp.n_member)?;
    let inside = samples.iter().filter(|s| s.2 == Verdict::Inside).count();
    let checks = path_lipschitz_check(&pair, &path, &samples, 1)?;
    let violations = checks.iter().filter(|c| c.2 > c.3 + 1e-12).count();
    let slack = checks.iter().map(|c| c.3 - c.2).fold(f64::INFINITY, f64::min);
    Ok((
        inside == samples.len() && violations == 0 && checks.len() == 66,
        json!({"samples_inside": inside, "samples": samples.len(), "pairs": checks.len(), "violations": violations,
               "lipschitz": path.lipschitz, "k": path.start.k, "min_slack": slack}),
    ))
}

fn tail_domination() -> Check {
    let f = SurfaceFamily::flute(LengthLaw::ExpDouble);
    let spec = SequenceSpec::new(SequenceKind::BoundaryPoint);
    let mut ok = true;
    let mut beyond = Vec::new();
    let mut prev: Option<Ext> = None;
    for depth in [4usize, 6, 8, 10, 12] {
        let p = cumulative_point(&f, &spec, depth)?;
        let t = p.tail.expect("boundary-point tail");
        let b = t.beyond(depth);
        ok &= prev.is_none_or(|q| b < q);
        ok &= t.total().to_float() <= t.integral_bound && t.tails.windows(2).all(|w| w[1] < w[0]) && t.ratio.holds();
        beyond.push(json!({"depth": depth, "tail": b.to_float(), "integral_bound": t.integral_bound}));
        prev = Some(b);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    let mut lemma_fail = 0usize;
    for _ in 0..1000 {
        let n = rng.gen_range(1..12);
        let mut q = || BigRational::new(BigInt::from(rng.gen_range(1u32..10_000)), BigInt::from(rng.gen_range(1u32..500)));
        let xs: Vec<BigRational> = (0..n).map(|_| q()).collect();
        let ys: Vec<BigRational> = (0..n).map(|_| q()).collect();
        if !sum_ratio_lemma(&xs, &ys)?.holds() {
            lemma_fail += 1;
        }
    }
    ok &= lemma_fail == 0;
    Ok((ok, json!({"tails": beyond, "lemma_tuples": 1000, "lemma_failures": lemma_fail})))
}

fn describe(id: &str) -> &'static str {
    match id {
        "1" => "special functions",
        "2" => "holonomy soundness",
        "3" => "twist-length inequality",
        "4" => "bound ordering",
        "5" => "exhaustion monotonicity",
        "6a" => "length-spectrum upper bound trend",
        "6b" => "quasiconformal lower bound trend",
        "7" => "non-dense point bounds",
        "8" => "membership dichotomy",
        "9" => "path criterion",
        "10" => "tail domination",
        _ => "unknown",
    }
}

/// Runs one criterion; internal errors are reported as a failed assertion.
pub fn run_criterion(id: &str, ctx: &Context) -> Assertion {
    let start = Instant::now();
    let r = match id {
        "1" => special_functions(),
        "2" => holonomy_soundness(),
        "3" => twist_length_inequality(),
        "4" => bounds_ordering(&ctx.profile),
        "5" => exhaustion_monotone(),
        "6a" => dls_upper_trend(),
        "6b" => dqc_lower_trend(),
        "7" => nondense_bounds(&ctx.profile),
        "8" => membership_dichotomy(&ctx.profile),
        "9" => path_criterion(&ctx.profile),
        "10" => tail_domination(),
        _ => Err(CliError::Usage(format!("unknown criterion {id}"))),
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let (passed, measured) = r.unwrap_or_else(|e| (false, json!({"error": e.to_string()})));
    Assertion {
        criterion: id.into(),
        name: describe(id).into(),
        passed,
        measured,
        elapsed_ms: ctx.timing.then_some(elapsed),
    }
}

pub fn run_suite(name: &str, ctx: &Context) -> CliResult<SuiteResult> {
    let assertions: Vec<Assertion> = criteria_of(name)?.iter().map(|id| run_criterion(id, ctx)).collect();
    Ok(SuiteResult { suite: name.into(), passed: assertions.iter().all(|a| a.passed), assertions })
}

/// Suites named by `name`, expanding `all`.
pub fn suite_names(name: &str) -> CliResult<Vec<&'static str>> {
    if name == "all" {
        return Ok(SUITES.to_vec());
    }
    let s = SUITES.iter().find(|s| **s == name).ok_or_else(|| CliError::Usage(format!("unknown suite '{name}'")))?;
    Ok(vec![*s])
}
