//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use backscatter::dataset::{
    add_noise, default_polarization, directions_sphere, synthesize, synthesize_with, Band, DataSet, DirectionSet,
    Method, Polarization, SynthesisOptions,
};
use backscatter::geometry::{mesh_shape, CVec3, Shape, Strip, UnitVec, Vec3};
use backscatter::inversion::{
    decay_profile, indicator_fields, indicator_single, profile_line, read_field_csv, strip_estimate, IndicatorField,
    SamplingGrid,
};
use backscatter::mie::{mie_far_field, mie_far_field_with_order, MieCoefficients, MieParams};
use backscatter::physical_optics::{u_infty_analytic, u_infty_po, IncidenceConfig, PoSurface};
use backscatter_cli::{cmd_invert, cmd_synthesize, InvertArgs, SynthesizeArgs};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const ELLIPSOID: &str = "ellipsoid:1.0,0.4,0.7";
const TWO_SPHERES: &str = "ball:0.8@0,0,1.5+ball:0.8@0,0,-1.5";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn shape(spec: &str) -> Shape {
    spec.parse().unwrap()
}

fn standard_band() -> Band {
    Band::new(10.0, 20.0, 40).unwrap()
}

fn axes() -> [UnitVec; 3] {
    [UnitVec::E1, UnitVec::E2, UnitVec::E3]
}

fn coordinate_pairs() -> DirectionSet {
    let mut directions = axes().to_vec();
    directions.extend(axes().map(|d| -d));
    DirectionSet {
        directions,
        tag: "coordinate axes".into(),
    }
}

fn rel(a: CVec3, b: CVec3) -> f64 {
    (a - b).norm() / b.norm()
}

/// Strip along `d` at threshold 0.5 from a profile through the origin.
fn strip_of(ds: &DataSet, d: UnitVec) -> Strip {
    let profile = profile_line(ds, d, Vec3::ZERO, (-6.0, 6.0), 1201).unwrap();
    strip_estimate(&profile, 0.5).unwrap()
}

fn c1_divergence_theorem_oracle() -> Outcome {
    let body = shape(ELLIPSOID);
    let dirs = directions_sphere(8).unwrap();
    let worst = |h: f64| {
        let surface = PoSurface::new(&mesh_shape(&body, h).unwrap());
        let mut worst: f64 = 0.0;
        for &d in &dirs.directions {
            for k in [10.0, 12.0, 14.0, 16.0, 18.0, 20.0] {
                let cfg = IncidenceConfig::new(d, default_polarization(d), k).unwrap();
                let po = u_infty_po(&surface, -d, &cfg).unwrap();
                worst = worst.max(rel(po, u_infty_analytic(&body, -d, &cfg)));
            }
        }
        worst
    };
    let (e1, e2) = (worst(0.04), worst(0.02));
    outcome(
        e1 < 1e-2 && e1 >= 3.0 * e2,
        format!("max relative error {e1:.2e} at h = 0.04, {e2:.2e} at h = 0.02 (drop {:.2}x)", e1 / e2),
    )
}

fn c2_backscatter_closed_form() -> Outcome {
    let k: f64 = 10.0;
    let ball = shape("ball:1");
    let exact = 2.0 * PI / k * ((2.0 * k).sin() - 2.0 * k * (2.0 * k).cos());
    let surface = PoSurface::new(&mesh_shape(&ball, 2.0 * PI / (8.0 * 20.0)).unwrap());
    let mut worst: f64 = 0.0;
    for d in directions_sphere(6).unwrap().directions {
        let p = default_polarization(d);
        let cfg = IncidenceConfig::new(d, p, k).unwrap();
        let want = CVec3::from_real(*p, Complex64::new(exact, 0.0));
        worst = worst
            .max(rel(u_infty_analytic(&ball, -d, &cfg), want))
            .max(rel(u_infty_po(&surface, -d, &cfg).unwrap(), want));
    }
    outcome(
        worst < 1e-2 && (exact + 4.5547).abs() < 1e-3,
        format!("closed form {exact:.4}, worst relative error {worst:.2e} over analytic and PO"),
    )
}

fn c3_translation_invariance() -> Outcome {
    let ds = synthesize(
        &shape("ellipsoid:1.0,0.4,0.7@0.2,-0.1,0.3"),
        &directions_sphere(8).unwrap(),
        standard_band(),
        Method::Analytic,
    )
    .unwrap();
    let dirs = ds.directions();
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = dirs[rng.random_range(0..dirs.len())];
        let z = Vec3::new(
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        );
        let r = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let perp = UnitVec::normalize(r - *d * r.dot(*d)).unwrap();
        let alpha = rng.random_range(-5.0..5.0);
        let grid = SamplingGrid::line(z, perp, (0.0, alpha), 2);
        let grid = match grid {
            Ok(g) => g,
            Err(_) => SamplingGrid::line(z, -perp, (0.0, -alpha), 2).unwrap(),
        };
        let f = indicator_single(&ds, d, &grid).unwrap();
        worst = worst.max((f.values[1] - f.values[0]).abs() / f.values[0]);
    }
    outcome(worst < 1e-12, format!("worst relative change {worst:.2e} over 100 samples"))
}

fn c4_polarization_independence() -> Outcome {
    let body = shape(ELLIPSOID);
    let dirs = directions_sphere(8).unwrap();
    let grid: SamplingGrid = "plane:x2=0.1:-2,2:41".parse().unwrap();
    let a = synthesize(&body, &dirs, standard_band(), Method::Po).unwrap();
    let mut worst: f64 = 0.0;
    for degrees in [37.0, 90.0] {
        let opts = SynthesisOptions {
            polarization: Polarization::Rotated(f64::to_radians(degrees)),
            ..Default::default()
        };
        let b = synthesize_with(&body, &dirs, standard_band(), Method::Po, &opts).unwrap();
        let fa = indicator_fields(&a, &dirs.directions, &grid).unwrap();
        let fb = indicator_fields(&b, &dirs.directions, &grid).unwrap();
        for (x, y) in fa.iter().zip(&fb) {
            let m = x.max();
            for (u, v) in x.values.iter().zip(&y.values) {
                worst = worst.max((u - v).abs() / m);
            }
        }
    }
    outcome(worst < 1e-12, format!("worst change {worst:.2e} relative to max I_d"))
}

fn strip_report(name: &str, body: &Shape, d: UnitVec, s: (f64, f64)) -> (f64, String) {
    let hull = body.strip_hull(d);
    let err = (s.0 - hull.lo).abs().max((s.1 - hull.hi).abs());
    (
        err,
        format!("{name} {d}: [{:.3}, {:.3}] vs [{:.3}, {:.3}]", s.0, s.1, hull.lo, hull.hi),
    )
}

fn c5_strips_noiseless() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (name, spec) in [("ellipsoid", ELLIPSOID), ("two spheres", TWO_SPHERES)] {
        let body = shape(spec);
        let ds = synthesize(&body, &coordinate_pairs(), standard_band(), Method::Po).unwrap();
        for d in axes() {
            let s = strip_of(&ds, d);
            let (err, line) = strip_report(name, &body, d, (s.lo, s.hi));
            worst = worst.max(err);
            lines.push(line);
        }
    }
    outcome(worst < 0.2, format!("worst endpoint error {worst:.3}; {}", lines.join("; ")))
}

fn c6_strips_noisy() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (name, spec) in [("ellipsoid", ELLIPSOID), ("two spheres", TWO_SPHERES)] {
        let body = shape(spec);
        let clean = synthesize(&body, &coordinate_pairs(), standard_band(), Method::Po).unwrap();
        let noisy: Vec<DataSet> = (1..=5).map(|seed| add_noise(&clean, 0.1, seed).unwrap()).collect();
        for d in axes() {
            let (mut lo, mut hi) = (0.0, 0.0);
            for ds in &noisy {
                let s = strip_of(ds, d);
                lo += s.lo / 5.0;
                hi += s.hi / 5.0;
            }
            let (err, line) = strip_report(name, &body, d, (lo, hi));
            worst = worst.max(err);
            lines.push(line);
        }
    }
    outcome(worst < 0.3, format!("worst seed-averaged endpoint error {worst:.3}; {}", lines.join("; ")))
}

fn c7_decay_law() -> Outcome {
    let ds = synthesize(&shape("ball:1"), &coordinate_pairs(), standard_band(), Method::Analytic).unwrap();
    let mut slopes = Vec::new();
    for d in axes() {
        let profile = profile_line(&ds, d, Vec3::ZERO, (-8.0, 8.0), 1601).unwrap();
        let strip = strip_estimate(&profile, 0.5).unwrap();
        slopes.push(decay_profile(&profile, &strip).unwrap());
    }
    let pass = slopes.iter().all(|s| (-2.5..=-1.5).contains(s));
    outcome(pass, format!("log-log slopes {slopes:.3?}"))
}

fn c8_mie_self_consistency() -> Outcome {
    let d = UnitVec::from_xyz(0.3, -0.2, 0.9).unwrap();
    let p = default_polarization(d);
    let others = [-d, UnitVec::from_xyz(0.5, 0.5, -0.1).unwrap(), UnitVec::E1];

    let origin = MieParams::new(Vec3::ZERO, 1.0).unwrap();
    let mut order: f64 = 0.0;
    for k in [1.0, 5.0, 10.0, 20.0] {
        let cfg = IncidenceConfig::new(d, p, k).unwrap();
        let n = MieCoefficients::converged(&origin, k).unwrap().order();
        for &xhat in &others {
            let e = mie_far_field_with_order(&origin, n, xhat, &cfg);
            let e10 = mie_far_field_with_order(&origin, n + 10, xhat, &cfg);
            order = order.max(rel(e10, e));
        }
    }

    let c = Vec3::new(0.4, -1.1, 1.5);
    let moved = MieParams::new(c, 1.0).unwrap();
    let mut phase: f64 = 0.0;
    for k in [3.0, 11.0] {
        let cfg = IncidenceConfig::new(d, p, k).unwrap();
        for &xhat in &others {
            let e0 = mie_far_field(&origin, xhat, &cfg).unwrap();
            let e1 = mie_far_field(&moved, xhat, &cfg).unwrap();
            let shifted = e0.scale(Complex64::cis(k * (*d - *xhat).dot(c)));
            phase = phase.max((e1 - shifted).norm() / e0.norm());
        }
    }

    let cfg = IncidenceConfig::new(d, p, 20.0).unwrap();
    let back = mie_far_field(&origin, -d, &cfg).unwrap().norm();
    let go = 2.0 * PI;
    let dev = (back - go).abs() / go;
    outcome(
        order < 1e-10 && phase < 1e-12 && dev < 0.15,
        format!(
            "order stability {order:.2e}, translation phase {phase:.2e}, |E(-d)| = {back:.4} vs 2 pi a = {go:.4} ({:.1}%)",
            100.0 * dev
        ),
    )
}

fn c9_mie_strips() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for spec in ["ball:0.8", "ball:0.8@0,0,1.5"] {
        let body = shape(spec);
        let ds = synthesize(&body, &coordinate_pairs(), standard_band(), Method::Mie).unwrap();
        for d in axes() {
            let s = strip_of(&ds, d);
            let (err, line) = strip_report(spec, &body, d, (s.lo, s.hi));
            worst = worst.max(err);
            lines.push(line);
        }
    }
    outcome(worst < 0.25, format!("worst endpoint error {worst:.3}; {}", lines.join("; ")))
}

fn run_pipeline(dir: &Path, spec: &str, circle: &str, grid: &str) -> IndicatorField {
    let data = dir.join(format!("{circle}.txt"));
    let mut synth = SynthesizeArgs::new(spec, &format!("circle:{circle}:40"), "po", &data);
    synth.noise = Some(0.1);
    synth.seed = 1;
    cmd_synthesize(&synth).unwrap();
    let out = dir.join(format!("{circle}.csv"));
    cmd_invert(&InvertArgs {
        data,
        grid: grid.into(),
        power: 0.5,
        project: None,
        out: out.clone(),
    })
    .unwrap();
    read_field_csv(std::fs::File::open(out).unwrap()).unwrap()
}

/// Grid points holding the largest 5% of the values.
fn top_five_percent(field: &IndicatorField) -> Vec<Vec3> {
    let mut sorted = field.values.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let cut = sorted[(field.values.len() as f64 * 0.05).ceil() as usize - 1];
    field
        .grid
        .points()
        .into_iter()
        .zip(&field.values)
        .filter(|(_, v)| **v >= cut)
        .map(|(z, _)| z)
        .collect()
}

fn c10_figure_reproduction() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let semi = [1.0, 0.4, 0.7];
    let mut lines = Vec::new();
    let mut pass = true;
    for (circle, axis) in [("xy", 2), ("xz", 1), ("yz", 0)] {
        let grid = format!("plane:x{}=0:-2,2:161", axis + 1);
        let field = run_pipeline(tmp.path(), ELLIPSOID, circle, &grid);
        let (i, j) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let boundary: Vec<Vec3> = (0..4000)
            .map(|m| {
                let t = 2.0 * PI * m as f64 / 4000.0;
                let mut p = [0.0; 3];
                p[i] = semi[i] * t.cos();
                p[j] = semi[j] * t.sin();
                Vec3::from_array(p)
            })
            .collect();
        let worst = top_five_percent(&field)
            .iter()
            .map(|z| boundary.iter().map(|b| b.distance(*z)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        pass &= worst < 0.3;
        lines.push(format!("ellipsoid {circle} directions on x{}=0: {worst:.3}", axis + 1));
    }
    let field = run_pipeline(tmp.path(), TWO_SPHERES, "xz", "plane:x2=0:-3,3:241");
    let top = top_five_percent(&field);
    let centroid = |upper: bool| {
        let pts: Vec<&Vec3> = top.iter().filter(|z| (z.z > 0.0) == upper).collect();
        pts.iter().fold(Vec3::ZERO, |acc, z| acc + **z) * (1.0 / pts.len().max(1) as f64)
    };
    let (up, down) = (centroid(true), centroid(false));
    let e_up = up.distance(Vec3::new(0.0, 0.0, 1.5));
    let e_down = down.distance(Vec3::new(0.0, 0.0, -1.5));
    pass &= e_up < 0.4 && e_down < 0.4;
    lines.push(format!("two spheres centroids {up} and {down} ({e_up:.3}, {e_down:.3} off)"));
    outcome(pass, format!("max distance of top 5% to the boundary: {}", lines.join("; ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("divergence-theorem oracle", c1_divergence_theorem_oracle),
        ("backscatter closed form", c2_backscatter_closed_form),
        ("translation invariance", c3_translation_invariance),
        ("polarization independence", c4_polarization_independence),
        ("strip reconstruction, noiseless", c5_strips_noiseless),
        ("strip reconstruction under noise", c6_strips_noisy),
        ("decay law", c7_decay_law),
        ("Mie self-consistency", c8_mie_self_consistency),
        ("exact-data inversion", c9_mie_strips),
        ("figure-class reproduction", c10_figure_reproduction),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2} {name}: {} ({:.1}s)",
            if result.pass { "PASS" } else { "FAIL" },
            n + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
