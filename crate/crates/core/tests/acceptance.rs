//! Acceptance suite. Prints one PASS/FAIL line per criterion; every tolerance
//! is a named constant below. A criterion listed in `KNOWN_DEVIATIONS` must
//! fail (with the recorded reason); any other failure panics.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pullback_core::algebra::random::{random_mat, random_unit_imaginary, random_unit_vector};
use pullback_core::catalog;
use pullback_core::connection::{
    analyze_point, bracket_with_alpha, curvature_norm, dr_component, AlphaElement, AnalysisOptions, ConnectionVerdict,
    FrameChoice, PointAnalysis, PointContext,
};
use pullback_core::homogeneous::{curvature_normalization, lie_lift, sectional_curvature_g0};
use pullback_core::immersion::{second_fundamental_form, ImmersionChart};
use pullback_core::oracle::{
    curvature_closed_form, curvature_commutator, dr_oracle, lemma_omega_check, vertizontal_curvature_norm,
    CurvaturePath, LEMMA_EPS,
};
use pullback_core::tolerances::Tolerances;
use pullback_core::{Field, FrameLift, GrassPoint, GrassTangent, LieLift, Mat, Quat};

/// Criteria expected to fail, with the reason.
const KNOWN_DEVIATIONS: &[(u32, &str)] = &[];

const SEED: u64 = 0xacce_97;

// 1
const LEMMA_TRIALS: usize = 20;
const LEMMA_C: f64 = 0.5;
const LEMMA_C_TOL: f64 = 1e-3;
// 2
const VERTIZONTAL_H: f64 = 1e-3;
const VERTIZONTAL_REL_TOL: f64 = 1e-4;
/// Denominator floor for the relative error (Lagrangian charts have `|R| = 0`).
const VERTIZONTAL_REL_FLOOR: f64 = 1e-2;
/// Step pair for the order test: at `VERTIZONTAL_H` the extrapolated error is
/// already at roundoff, so convergence is measured on a coarser pair.
const ORDER_H: f64 = 0.04;
const ORDER_MIN_RATIO: f64 = 4.0;
/// Charts whose coarse-step error is below this have no truncation error to
/// measure (the difference scheme is exact on them).
const ORDER_NOISE_FLOOR: f64 = 1e-12;
const VERTIZONTAL_POINTS: usize = 3;
// 3
const DR_TOL: f64 = 2e-3;
const DR_POINTS: usize = 10;
const DR_TRIPLES: usize = 5;
// 4
const THETA_TOL: f64 = 1e-6;
const FAT_TOL: f64 = 1e-6;
const NOT_FAT_TOL: f64 = 1e-8;
const FATNESS_POINTS: usize = 10;
// 5
const PARALLEL_KAHLER_TOL: f64 = 1e-5;
const PARALLEL_GEODESIC_TOL: f64 = 1e-6;
const RADIAL_SLACK: f64 = 1e-12;
const PARALLEL_POINTS: usize = 8;
// 6
const COROLLARY_RHS: f64 = 0.125;
const COROLLARY_RHS_TOL: f64 = 1e-9;
const COROLLARY_POINTS: usize = 12;
// 7
const VERONESE_LAW_TOL: f64 = 1e-4;
const VERONESE_POINTS: usize = 5;
// 8
const PINCH_TOL: f64 = 1e-3;
const PINCH_SAMPLES: usize = 2000;
// 9
const GAUGE_TOL: f64 = 1e-8;
const GAUGE_POINTS: usize = 4;
// 10
const AD_TOL: f64 = 1e-14;
const AD_SAMPLES: usize = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn build(name: &str, field: Option<Field>, params: &[(&str, f64)]) -> ImmersionChart {
    let p: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    catalog::build(name, field, &p).unwrap().chart
}

/// Seeded points in the central 80% of the chart box.
fn sample_points(chart: &ImmersionChart, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            chart
                .domain()
                .iter()
                .map(|(lo, hi)| {
                    let mid = 0.5 * (lo + hi);
                    mid + 0.4 * (hi - lo) * rng.gen_range(-1.0..1.0)
                })
                .collect()
        })
        .collect()
}

fn normalized(chart: &ImmersionChart) -> AnalysisOptions {
    AnalysisOptions {
        normalization: Some(curvature_normalization(chart.field(), chart.ambient_dim(), chart.k()).unwrap()),
        ..Default::default()
    }
}

fn analyze_all(chart: &ImmersionChart, points: &[Vec<f64>], options: &AnalysisOptions) -> Vec<PointAnalysis> {
    points
        .iter()
        .map(|u| analyze_point(chart, u, options).unwrap())
        .collect()
}

/// Orthonormal fiber pair `(w, v)` as `k x 1` coordinates.
fn fiber_pair(field: Field, k: usize, rng: &mut ChaCha8Rng) -> (Mat, Mat) {
    if k == 1 {
        let q = random_unit_imaginary(field, rng);
        return (Mat::column(field, &[Quat::real(1.0)]), Mat::column(field, &[q]));
    }
    let a = random_unit_vector(k, rng);
    let mut b = random_unit_vector(k, rng);
    let d: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    b.iter_mut().zip(&a).for_each(|(y, x)| *y -= d * x);
    let nb = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    let col = |v: &[f64], s: f64| Mat::column(field, &v.iter().map(|x| Quat::real(x / s)).collect::<Vec<_>>());
    (col(&a, 1.0), col(&b, nb))
}

fn max_abs_diff(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    }
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (field, n, k) in [(Field::Real, 4, 2), (Field::Complex, 3, 1)] {
        let r = lemma_omega_check(field, n, k, LEMMA_TRIALS, LEMMA_EPS, &tol()).unwrap();
        worst = worst.max((r.fitted_c - LEMMA_C).abs());
        parts.push(format!("G{k}({field}{n}) c = {:.6}", r.fitted_c));
    }
    outcome(
        worst < LEMMA_C_TOL,
        format!("{}; max |c - 1/2| = {worst:.2e}", parts.join(", ")),
    )
}

fn vertizontal_charts() -> Vec<(&'static str, ImmersionChart)> {
    vec![
        ("veronese d=2", build("veronese", None, &[("d", 2.0)])),
        ("veronese d=3", build("veronese", None, &[("d", 3.0)])),
        ("clifford", build("clifford", None, &[])),
        ("perturbed C", build("perturbed", Some(Field::Complex), &[])),
        ("perturbed H", build("perturbed", Some(Field::Quaternion), &[])),
        ("perturbed R", build("perturbed", Some(Field::Real), &[])),
    ]
}

fn criterion_2() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst_rel: f64 = 0.0;
    let mut worst_ratio = (f64::INFINITY, "");
    let mut exact = Vec::new();
    for (name, chart) in vertizontal_charts() {
        let mut err = [0.0f64; 2];
        for u in sample_points(&chart, VERTIZONTAL_POINTS, SEED + 20) {
            let sff = second_fundamental_form(&chart, &u, &t).unwrap();
            let ctx = PointContext::new(sff.clone(), &AnalysisOptions::default()).unwrap();
            let stiefel = sff.frame().point().stiefel().clone();
            let n = sff.dim();
            let x = random_unit_vector(n, &mut rng);
            let (a, b) = fiber_pair(chart.field(), chart.k(), &mut rng);
            let alpha = AlphaElement::from_fiber_pair(&a, &b).unwrap();
            let xl = lie_lift(ctx.frame_lift(), &sff.frame().vector(&x)).unwrap();
            let formula = curvature_norm(&xl, &alpha, ctx.lifted_basis()).unwrap();
            let (w, v) = (&stiefel * &a, &stiefel * &b);
            let path = CurvaturePath::Commutator {
                h: VERTIZONTAL_H,
                extrapolate: true,
            };
            let oracle = vertizontal_curvature_norm(&chart, &u, &x, &w, &v, path, &t).unwrap();
            worst_rel = worst_rel.max((formula - oracle).abs() / oracle.abs().max(VERTIZONTAL_REL_FLOOR));
            for i in 0..n {
                for j in (i + 1)..n {
                    let exact = curvature_closed_form(&chart, &u, i, j, &w, &t).unwrap();
                    for (slot, h) in err.iter_mut().zip([ORDER_H, 0.5 * ORDER_H]) {
                        let approx = curvature_commutator(&chart, &u, i, j, &w, h, true).unwrap();
                        *slot = slot.max((&approx - &exact).norm());
                    }
                }
            }
        }
        if err[0] < ORDER_NOISE_FLOOR {
            exact.push(name);
            continue;
        }
        let ratio = err[0] / err[1];
        if ratio < worst_ratio.0 {
            worst_ratio = (ratio, name);
        }
    }
    outcome(
        worst_rel < VERTIZONTAL_REL_TOL && worst_ratio.0 >= ORDER_MIN_RATIO,
        format!(
            "max rel err {worst_rel:.2e} at h = {VERTIZONTAL_H}; min error ratio h {ORDER_H} -> {} is {:.1} ({}); exact at both steps: {}",
            0.5 * ORDER_H,
            worst_ratio.0,
            worst_ratio.1,
            exact.join(", ")
        ),
    )
}

fn criterion_3() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for field in [Field::Complex, Field::Quaternion, Field::Real] {
        let chart = build("perturbed", Some(field), &[]);
        // k = 1: shape-operator path with J = ad_alpha, expected 2 dr_oracle;
        // real k >= 2: Lie path, expected dr_oracle.
        let factor = if field == Field::Real { 1.0 } else { 2.0 };
        let (mut num, mut den, mut dev): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for u in sample_points(&chart, DR_POINTS, SEED + 30) {
            let sff = second_fundamental_form(&chart, &u, &t).unwrap();
            let lift = Arc::new(FrameLift::standard(sff.frame().point()));
            let stiefel = sff.frame().point().stiefel().clone();
            let n = sff.dim();
            for _ in 0..DR_TRIPLES {
                let (x, y, z) = (
                    random_unit_vector(n, &mut rng),
                    random_unit_vector(n, &mut rng),
                    random_unit_vector(n, &mut rng),
                );
                let (a, b) = fiber_pair(field, chart.k(), &mut rng);
                let alpha = AlphaElement::from_fiber_pair(&a, &b).unwrap();
                let formula = dr_component(&sff, &lift, &x, &y, &z, &alpha).unwrap();
                let oracle = dr_oracle(&chart, &u, &x, &y, &z, &(&stiefel * &a), &(&stiefel * &b), &t).unwrap();
                dev = dev.max((formula - factor * oracle).abs());
                num += formula * oracle;
                den += oracle * oracle;
            }
        }
        worst = worst.max(dev);
        parts.push(format!(
            "{field}: fitted factor {:.5} (expected {factor}), max dev {dev:.2e}",
            num / den
        ));
    }
    outcome(worst < DR_TOL, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in 1..=3 {
        let chart = build("veronese", None, &[("d", d as f64)]);
        let pts = analyze_all(
            &chart,
            &sample_points(&chart, FATNESS_POINTS, SEED + 40),
            &normalized(&chart),
        );
        let theta = pts.iter().map(|p| p.theta.unwrap()).fold(0.0, f64::max);
        let fat = pts
            .iter()
            .map(|p| (p.fatness_margin.unwrap() - 1.0).abs())
            .fold(0.0, f64::max);
        ok &= theta < THETA_TOL && fat < FAT_TOL;
        parts.push(format!(
            "veronese d={d}: max theta {theta:.1e}, max |fat - 1| {fat:.1e}"
        ));
    }
    let chart = build("totally-real", None, &[("n", 2.0)]);
    let pts = analyze_all(
        &chart,
        &sample_points(&chart, FATNESS_POINTS, SEED + 41),
        &normalized(&chart),
    );
    let fat = pts.iter().map(|p| p.fatness_margin.unwrap().abs()).fold(0.0, f64::max);
    ok &= fat < NOT_FAT_TOL;
    parts.push(format!("totally-real: max fat {fat:.1e}"));
    let chart = build("clifford", None, &[]);
    let pts = analyze_all(
        &chart,
        &sample_points(&chart, FATNESS_POINTS, SEED + 42),
        &normalized(&chart),
    );
    let dev = pts
        .iter()
        .map(|p| (p.theta.unwrap() - FRAC_PI_2).abs())
        .fold(0.0, f64::max);
    ok &= dev < THETA_TOL;
    parts.push(format!("clifford: max |theta - pi/2| {dev:.1e}"));
    outcome(ok, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let groups: [(&str, f64, Vec<ImmersionChart>); 2] = [
        (
            "kahler/quaternionic",
            PARALLEL_KAHLER_TOL,
            vec![
                build("veronese", None, &[("d", 2.0)]),
                build("veronese", None, &[("d", 3.0)]),
                build("hline", None, &[]),
            ],
        ),
        (
            "totally geodesic",
            PARALLEL_GEODESIC_TOL,
            vec![
                build("linear", Some(Field::Complex), &[]),
                build("linear", Some(Field::Quaternion), &[]),
                build("grassmann-sub", None, &[]),
            ],
        ),
    ];
    for (label, bound, charts) in groups {
        let mut worst: f64 = 0.0;
        for chart in charts {
            let pts = analyze_all(
                &chart,
                &sample_points(&chart, PARALLEL_POINTS, SEED + 50),
                &normalized(&chart),
            );
            worst = worst.max(pts.iter().map(|p| p.parallel_residual.unwrap()).fold(0.0, f64::max));
        }
        ok &= worst < bound;
        parts.push(format!("{label}: max parallel {worst:.1e}"));
    }
    let mut violations = 0;
    let mut checked = 0;
    for field in [Field::Complex, Field::Quaternion, Field::Real] {
        let chart = build("perturbed", Some(field), &[]);
        for p in analyze_all(
            &chart,
            &sample_points(&chart, PARALLEL_POINTS, SEED + 51),
            &normalized(&chart),
        ) {
            checked += 1;
            if p.radial_residual.unwrap() > p.parallel_residual.unwrap() + RADIAL_SLACK {
                violations += 1;
            }
        }
    }
    ok &= violations == 0;
    parts.push(format!("perturbed: radial > parallel at {violations}/{checked} points"));
    outcome(ok, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let chart = build("veronese", None, &[("d", 2.0)]);
    let pts = analyze_all(
        &chart,
        &sample_points(&chart, COROLLARY_POINTS, SEED + 60),
        &normalized(&chart),
    );
    let min_margin = pts
        .iter()
        .map(|p| p.inequality_min_margin.unwrap())
        .fold(f64::INFINITY, f64::min);
    let rhs_dev = pts
        .iter()
        .filter(|p| p.theta.unwrap() < THETA_TOL)
        .map(|p| (p.corollary.unwrap().rhs - COROLLARY_RHS).abs())
        .fold(0.0, f64::max);
    let flat_points = pts.iter().filter(|p| p.theta.unwrap() < THETA_TOL).count();
    let mut ok = min_margin > 0.0 && rhs_dev < COROLLARY_RHS_TOL && flat_points == pts.len();
    let mut satisfied = 0;
    let mut unsound = 0;
    let mut total = 0;
    let charts = [
        chart.clone(),
        build("veronese", None, &[("d", 1.0)]),
        build("linear", Some(Field::Complex), &[]),
        build("hline", None, &[]),
        build("perturbed", Some(Field::Complex), &[]),
        build("perturbed", Some(Field::Quaternion), &[]),
    ];
    for c in &charts {
        for p in analyze_all(c, &sample_points(c, COROLLARY_POINTS, SEED + 61), &normalized(c)) {
            total += 1;
            let bound = p.corollary.unwrap();
            if bound.satisfied {
                satisfied += 1;
                if p.inequality_min_margin.unwrap() <= 0.0 {
                    unsound += 1;
                }
            }
        }
    }
    ok &= unsound == 0;
    outcome(
        ok,
        format!(
            "veronese d=2: min margin {min_margin:.4}, max |rhs - 1/8| {rhs_dev:.1e}; corollary holds at {satisfied}/{total} points, margin <= 0 at {unsound} of them"
        ),
    )
}

fn binomial(n: usize, k: usize) -> usize {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

fn criterion_7() -> Outcome {
    let mut curvature = Vec::new();
    let mut dims_ok = true;
    for d in 1..=4usize {
        let chart = build("veronese", None, &[("d", d as f64)]);
        dims_ok &= chart.ambient_dim() == binomial(1 + d, d);
        let pts = analyze_all(
            &chart,
            &sample_points(&chart, VERONESE_POINTS, SEED + 70),
            &normalized(&chart),
        );
        curvature.push(pts.iter().map(|p| p.base_curvature.unwrap()).collect::<Vec<_>>());
    }
    let mut worst: f64 = 0.0;
    for (i, ks) in curvature.iter().enumerate() {
        let d = (i + 1) as f64;
        for (k, k1) in ks.iter().zip(&curvature[0]) {
            worst = worst.max((k / k1 - 1.0 / d).abs());
        }
    }
    outcome(
        worst < VERONESE_LAW_TOL && dims_ok,
        format!("max |k_B(d)/k_B(1) - 1/d| = {worst:.1e}; ambient dimensions match: {dims_ok}"),
    )
}

fn criterion_8() -> Outcome {
    let field = Field::Complex;
    let norm = curvature_normalization(field, 3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let record = |k: f64, lo: &mut f64, hi: &mut f64| {
        *lo = lo.min(k);
        *hi = hi.max(k);
    };
    let tangent = |base: &Arc<GrassPoint>, rng: &mut ChaCha8Rng| {
        let t = GrassTangent::from_ambient_frame(base.clone(), &random_mat(field, 3, 1, rng));
        t.scale(1.0 / t.norm())
    };
    let mut random_range = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..PINCH_SAMPLES {
        let base = Arc::new(GrassPoint::from_stiefel(random_mat(field, 3, 1, &mut rng)).unwrap());
        let x = tangent(&base, &mut rng);
        let y = tangent(&base, &mut rng);
        let y = y.add_scaled(-y.inner(&x), &x);
        let y = y.scale(1.0 / y.norm());
        let k = norm.normalize_curvature(sectional_curvature_g0(&x, &y).unwrap());
        record(k, &mut lo, &mut hi);
        random_range = (random_range.0.min(k), random_range.1.max(k));
        // holomorphic plane and a totally real plane through X
        let jx = x.mul_right(Quat::I);
        record(
            norm.normalize_curvature(sectional_curvature_g0(&x, &jx).unwrap()),
            &mut lo,
            &mut hi,
        );
        let z = tangent(&base, &mut rng);
        let z = z.add_scaled(-z.inner(&x), &x);
        let z = z.add_scaled(-z.inner(&jx), &jx);
        let z = z.scale(1.0 / z.norm());
        record(
            norm.normalize_curvature(sectional_curvature_g0(&x, &z).unwrap()),
            &mut lo,
            &mut hi,
        );
    }
    let inside = lo >= 0.25 - PINCH_TOL && hi <= 1.0 + PINCH_TOL;
    let attained = (lo - 0.25).abs() < PINCH_TOL && (hi - 1.0).abs() < PINCH_TOL;
    outcome(
        inside && attained,
        format!(
            "range [{lo:.6}, {hi:.6}] over {} planes (random planes alone: [{:.4}, {:.4}])",
            3 * PINCH_SAMPLES,
            random_range.0,
            random_range.1
        ),
    )
}

fn verdict_distance(a: &ConnectionVerdict, b: &ConnectionVerdict) -> f64 {
    let cor = |v: &ConnectionVerdict| v.corollary.map(|c| (c.lhs, c.rhs));
    let (ca, cb) = (cor(a), cor(b));
    [
        max_abs_diff(a.fatness_margin, b.fatness_margin),
        max_abs_diff(a.parallel_residual, b.parallel_residual),
        max_abs_diff(a.radial_residual, b.radial_residual),
        max_abs_diff(a.inequality_min_margin, b.inequality_min_margin),
        max_abs_diff(a.max_theta, b.max_theta),
        max_abs_diff(ca.map(|c| c.0), cb.map(|c| c.0)),
        max_abs_diff(ca.map(|c| c.1), cb.map(|c| c.1)),
        if a.fat == b.fat && a.strict == b.strict && a.corollary_satisfied_points == b.corollary_satisfied_points {
            0.0
        } else {
            f64::INFINITY
        },
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn criterion_9() -> Outcome {
    let charts = [
        build("veronese", None, &[("d", 2.0)]),
        build("totally-real", None, &[("n", 2.0)]),
        build("perturbed", Some(Field::Complex), &[]),
        build("perturbed", Some(Field::Quaternion), &[]),
        build("perturbed", Some(Field::Real), &[]),
        build("grassmann-sub", None, &[]),
    ];
    let mut worst: f64 = 0.0;
    for chart in &charts {
        let pts = sample_points(chart, GAUGE_POINTS, SEED + 90);
        let base = normalized(chart);
        let mut verdicts = Vec::new();
        for frame in [FrameChoice::Standard, FrameChoice::ComplementRotation { seed: 91 }] {
            for gauge_seed in [None, Some(92)] {
                let opts = AnalysisOptions {
                    frame,
                    gauge_seed,
                    ..base.clone()
                };
                verdicts.push(ConnectionVerdict::aggregate(
                    &analyze_all(chart, &pts, &opts),
                    &opts.tol,
                ));
            }
        }
        for v in &verdicts[1..] {
            worst = worst.max(verdict_distance(&verdicts[0], v));
        }
    }
    outcome(
        worst < GAUGE_TOL,
        format!("max verdict spread over 2 frame completions x 2 gauges: {worst:.1e}"),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut worst: f64 = 0.0;
    for (field, k) in [(Field::Real, 2), (Field::Complex, 1), (Field::Quaternion, 1)] {
        let n = 4;
        for _ in 0..AD_SAMPLES {
            let base = GrassPoint::from_stiefel(random_mat(field, n, k, &mut rng)).unwrap();
            let lift = Arc::new(FrameLift::standard(&base));
            let h = random_mat(field, n - k, k, &mut rng);
            let a = if k == 1 {
                Mat::column(field, &[random_unit_imaginary(field, &mut rng)])
            } else {
                let m = random_mat(field, k, k, &mut rng);
                &m - &m.adjoint()
            };
            let x = LieLift::from_block(lift.clone(), h.clone());
            let alpha = AlphaElement::new(a.clone()).unwrap();
            // [diag(q, 0), X~] = -[X~, alpha]
            let direct = LieLift::from_p_part(lift, &Mat::commutator(&alpha.embedded(n), x.matrix()));
            let via_formula = bracket_with_alpha(&x, &alpha).unwrap();
            let expected = (&h * &a).scale(-1.0);
            let scale = expected.norm().max(1.0);
            worst = worst
                .max((direct.block() - &expected).norm() / scale)
                .max((via_formula.block() + &expected).norm() / scale);
        }
    }
    outcome(
        worst < AD_TOL,
        format!(
            "max |[diag(q,0), X~]^p + H q| = {worst:.1e} over {} inputs",
            3 * AD_SAMPLES
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut problems = Vec::new();
    for (id, run) in criteria {
        let o = run();
        let known = KNOWN_DEVIATIONS.iter().find(|(k, _)| *k == id);
        println!(
            "criterion {id:>2}: {}  {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        match (o.pass, known) {
            (false, None) => problems.push(format!("criterion {id} failed unexpectedly")),
            (true, Some(_)) => problems.push(format!("criterion {id} is a known deviation but passed")),
            (false, Some((_, why))) => println!("              known deviation: {why}"),
            (true, None) => {}
        }
    }
    assert!(problems.is_empty(), "{}", problems.join("; "));
}
