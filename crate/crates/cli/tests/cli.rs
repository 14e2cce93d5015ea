use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use backscatter::dataset::Band;
use backscatter::geometry::Vec3;
use backscatter::inversion::{read_field_csv, write_field_csv, IndicatorField, SamplingGrid};
use backscatter_cli::render::{pixel_point, viridis};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_backscatter"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &TempDir, name: &str, shape: &str, dirs: &str, method: &str, extra: &[&str]) -> PathBuf {
    let out = dir.path().join(name);
    let mut args = vec![
        "synthesize",
        "--shape",
        shape,
        "--directions",
        dirs,
        "--kmin",
        "10",
        "--kmax",
        "20",
        "--nk",
        "40",
        "--method",
        method,
        "--out",
        path_str(&out),
    ];
    args.extend_from_slice(extra);
    let o = bin().args(&args).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn read_field(path: &Path) -> IndicatorField {
    read_field_csv(std::fs::File::open(path).unwrap()).unwrap()
}

fn write_field(path: &Path, grid: &str, f: impl Fn(Vec3) -> f64) {
    let grid: SamplingGrid = grid.parse().unwrap();
    let field = IndicatorField {
        values: grid.points().into_iter().map(f).collect(),
        grid,
        directions: Vec::new(),
        power: Some(0.5),
        band: Band::new(10.0, 20.0, 40).unwrap(),
    };
    write_field_csv(&field, std::fs::File::create(path).unwrap()).unwrap();
}

fn ppm_pixels(path: &Path) -> (usize, usize, Vec<u8>) {
    let bytes = std::fs::read(path).unwrap();
    let text = String::from_utf8_lossy(&bytes[..20]).to_string();
    let mut it = text.split_ascii_whitespace();
    assert_eq!(it.next(), Some("P6"));
    let w: usize = it.next().unwrap().parse().unwrap();
    let h: usize = it.next().unwrap().parse().unwrap();
    assert_eq!(it.next(), Some("255"));
    let header = format!("P6\n{w} {h}\n255\n").len();
    (w, h, bytes[header..].to_vec())
}

#[test]
fn synthesize_po_ellipsoid_has_1600_records() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("e.txt");
    let o = run(&[
        "synthesize",
        "--shape",
        "ellipsoid:1.0,0.4,0.7",
        "--directions",
        "circle:xy:40",
        "--kmin",
        "10",
        "--kmax",
        "20",
        "--nk",
        "40",
        "--method",
        "po",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("1600 records"), "{stdout}");
    assert!(stdout.contains("method po") && stdout.contains("[10, 20]"), "{stdout}");
    let ds = backscatter::dataset::read_dataset(&out).unwrap();
    assert_eq!(ds.len(), 1600);
}

#[test]
fn noisy_synthesis_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let extra = ["--noise", "0.1", "--seed", "7"];
    let a = synth(&dir, "a.txt", "ball:1", "sphere:8", "analytic", &extra);
    let b = synth(&dir, "b.txt", "ball:1", "sphere:8", "analytic", &extra);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let a = synth(&dir, "a.txt", "ellipsoid:1,0.4,0.7", "circle:xz:4", "po", &["--threads", "1"]);
    let b = synth(&dir, "b.txt", "ellipsoid:1,0.4,0.7", "circle:xz:4", "po", &["--threads", "3"]);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    let out = dir.path().join("c.txt");
    let o = bin()
        .env("BACKSCATTER_THREADS", "2")
        .args(["synthesize", "--shape", "ellipsoid:1,0.4,0.7", "--directions", "circle:xz:4", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn synthesize_validation_failures_exit_2_without_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.txt");
    let cases: [&[&str]; 7] = [
        &["--shape", "ellipsoid:1,0.4,0.7", "--directions", "circle:xy:39"],
        &["--shape", "ellipsoid:1,0.4,0.7", "--directions", "circle:xy:4", "--method", "mie"],
        &["--shape", "blob:1", "--directions", "circle:xy:4"],
        &["--shape", "ball:1", "--directions", "circle:xy:4", "--kmin", "20", "--kmax", "10"],
        &["--shape", "ball:1", "--directions", "circle:xy:4", "--noise", "-0.1"],
        &["--shape", "ball:1", "--directions", "circle:xy:4", "--max-edge", "0.5"],
        &["--shape", "ball:1", "--directions", "circle:xy:4", "--method", "bem"],
    ];
    for extra in cases {
        let o = bin()
            .arg("synthesize")
            .args(extra)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert_eq!(code(&o), 2, "{extra:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn io_failures_exit_3() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "synthesize",
        "--shape",
        "ball:1",
        "--directions",
        "circle:xy:4",
        "--out",
        path_str(&dir.path().join("missing/x.txt")),
    ]);
    assert_eq!(code(&o), 3);
    let o = run(&[
        "invert",
        "--data",
        path_str(&dir.path().join("none.txt")),
        "--grid",
        "plane:x3=0:-1,1:5",
        "--out",
        path_str(&dir.path().join("f.csv")),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_2_and_help_exits_0() {
    assert_eq!(code(&run(&["synthesize", "--bogus"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn invert_plane_maxima_hug_the_ellipse() {
    let dir = TempDir::new().unwrap();
    let data = synth(&dir, "e.txt", "ellipsoid:1.0,0.4,0.7", "circle:xy:40", "po", &[]);
    let out = dir.path().join("f.csv");
    let o = run(&[
        "invert",
        "--data",
        path_str(&data),
        "--grid",
        "plane:x3=0:-2,2:81",
        "--power",
        "0.5",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let field = read_field(&out);
    assert_eq!(field.power, Some(0.5));
    let boundary: Vec<Vec3> = (0..4000)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 4000.0;
            Vec3::new(t.cos(), 0.4 * t.sin(), 0.0)
        })
        .collect();
    let max = field.max();
    for (z, v) in field.grid.points().iter().zip(&field.values) {
        if *v >= 0.95 * max {
            let dist = boundary.iter().map(|b| b.distance(*z)).fold(f64::INFINITY, f64::min);
            assert!(dist < 0.25, "maximum at {z} is {dist} from the ellipse");
        }
    }
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(meta["power"], 0.5);
    assert_eq!(meta["directions"], 40);
    assert_eq!(meta["method"], "po");
    assert_eq!(meta["points"], 81 * 81);
}

#[test]
fn invert_line_through_two_spheres_has_two_bands() {
    let dir = TempDir::new().unwrap();
    let data = synth(
        &dir,
        "s.txt",
        "ball:0.8@0,0,1.5+ball:0.8@0,0,-1.5",
        "circle:xz:40",
        "analytic",
        &[],
    );
    let out = dir.path().join("l.csv");
    let o = run(&[
        "invert",
        "--data",
        path_str(&data),
        "--grid",
        "line:0,0,0:0,0,1:-4,4:801",
        "--power",
        "0.5",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let field = read_field(&out);
    let max = field.max();
    let edges = [-2.3, -0.7, 0.7, 2.3];
    let mut near_edge = [false; 4];
    for (z, v) in field.grid.points().iter().zip(&field.values) {
        if *v >= 0.95 * max {
            let (i, dist) = edges
                .iter()
                .map(|e| (z.z - e).abs())
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(dist < 0.2, "high value at z = {}", z.z);
            near_edge[i] = true;
        }
    }
    assert_eq!(near_edge, [true; 4]);
    let at = |t: f64| {
        let i = ((t + 4.0) / 0.01).round() as usize;
        field.values[i]
    };
    assert!(at(1.5) < 0.3 * max && at(-1.5) < 0.3 * max);
}

#[test]
fn invert_rejects_unsupported_power_and_bad_grid() {
    let dir = TempDir::new().unwrap();
    let data = synth(&dir, "b.txt", "ball:1", "circle:xy:4", "analytic", &[]);
    let out = dir.path().join("f.csv");
    for (grid, power) in [("plane:x3=0:-1,1:5", "0.25"), ("plane:x4=0:-1,1:5", "0.5")] {
        let o = run(&[
            "invert",
            "--data",
            path_str(&data),
            "--grid",
            grid,
            "--power",
            power,
            "--out",
            path_str(&out),
        ]);
        assert_eq!(code(&o), 2);
        assert!(!out.exists());
    }
}

#[test]
fn invert_reports_malformed_dataset_as_validation_error() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("bad.txt");
    std::fs::write(&data, "# backscatter-dataset schema=1\n1 2 3\n").unwrap();
    let o = run(&[
        "invert",
        "--data",
        path_str(&data),
        "--grid",
        "plane:x3=0:-1,1:5",
        "--out",
        path_str(&dir.path().join("f.csv")),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn invert_with_scalar_projection() {
    let dir = TempDir::new().unwrap();
    let data = synth(&dir, "b.txt", "ball:1", "circle:xy:2", "analytic", &[]);
    let out = dir.path().join("f.csv");
    let base = ["invert", "--data", path_str(&data), "--grid", "line:0,0,0:1,0,0:-3,3:61"];
    // default polarization for +-e1 is -e2 / +e2
    let o = bin().args(base).args(["--project", "0,1,0", "--out", path_str(&out)]).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = bin().args(base).args(["--project", "0,0,1", "--out", path_str(&out)]).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn profile_unit_ball_strip() {
    let dir = TempDir::new().unwrap();
    let data = synth(&dir, "b.txt", "ball:1", "circle:xz:8", "analytic", &[]);
    let out = dir.path().join("p.csv");
    let o = run(&[
        "profile",
        "--data",
        path_str(&data),
        "--direction",
        "0,0,1",
        "--threshold",
        "0.5",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let inner = text.split('[').nth(1).unwrap().split(']').next().unwrap();
    let ends: Vec<f64> = inner.split(',').map(|s| s.trim().parse().unwrap()).collect();
    assert!((ends[0] + 1.0).abs() < 0.2 && (ends[1] - 1.0).abs() < 0.2, "{text}");
    let profile = read_field(&out);
    assert_eq!(profile.values.len(), 1201);
    assert!(matches!(profile.grid, SamplingGrid::Line { .. }));
}

#[test]
fn profile_single_direction_covers_both_spheres() {
    let dir = TempDir::new().unwrap();
    let data = synth(
        &dir,
        "s.txt",
        "ball:0.8@0,0,1.5+ball:0.8@0,0,-1.5",
        "circle:yz:4",
        "analytic",
        &[],
    );
    let out = dir.path().join("p.csv");
    let o = run(&["profile", "--data", path_str(&data), "--direction", "0,0,1", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let inner = text.split('[').nth(1).unwrap().split(']').next().unwrap();
    let ends: Vec<f64> = inner.split(',').map(|s| s.trim().parse().unwrap()).collect();
    assert!((ends[0] + 2.3).abs() < 0.2 && (ends[1] - 2.3).abs() < 0.2, "{text}");
}

#[test]
fn profile_validation() {
    let dir = TempDir::new().unwrap();
    let data = synth(&dir, "b.txt", "ball:1", "circle:xy:4", "analytic", &[]);
    let out = dir.path().join("p.csv");
    for extra in [
        ["--threshold", "1.5"],
        ["--direction", "9"],
        ["--direction", "0,0,1"],
        ["--extent", "-1,1"],
    ] {
        let mut args = vec!["profile", "--data", path_str(&data), "--out", path_str(&out)];
        if extra[0] != "--direction" {
            args.extend(["--direction", "0"]);
        }
        args.extend(extra);
        let o = run(&args);
        assert_eq!(code(&o), 2, "{extra:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists());
    }
}

#[test]
fn render_constant_field_is_uniform() {
    let dir = TempDir::new().unwrap();
    let field = dir.path().join("c.csv");
    write_field(&field, "plane:x3=0:-1,1:7,5", |_| 0.3);
    let out = dir.path().join("c.ppm");
    let o = run(&["render", "--field", path_str(&field), "--out", path_str(&out), "--scale", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (w, h, px) = ppm_pixels(&out);
    assert_eq!((w, h), (14, 10));
    assert!(px.chunks(3).all(|c| c == &px[..3]));
}

#[test]
fn inverted_colormap_maps_v_to_one_minus_v() {
    let dir = TempDir::new().unwrap();
    let f = |z: Vec3| (z.x + 1.0) * 4.0 + (z.y + 1.0) * 4.0;
    let plain = dir.path().join("a.csv");
    let flipped = dir.path().join("b.csv");
    write_field(&plain, "plane:x3=0:-1,1:9", f);
    write_field(&flipped, "plane:x3=0:-1,1:9", |z| 16.0 - f(z));
    let a = dir.path().join("a.ppm");
    let b = dir.path().join("b.ppm");
    let o = run(&["render", "--field", path_str(&plain), "--out", path_str(&a), "--invert-colormap"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["render", "--field", path_str(&flipped), "--out", path_str(&b)])), 0);
    let (_, _, pa) = ppm_pixels(&a);
    let (_, _, pb) = ppm_pixels(&b);
    assert_eq!(pa, pb);
    assert_eq!(&pa[24..27], &viridis(0.0)[..]);
}

#[test]
fn overlay_draws_the_ellipse_cross_section() {
    let dir = TempDir::new().unwrap();
    let field = dir.path().join("e.csv");
    let spec = "plane:x3=0:-1.5,1.5:301";
    write_field(&field, spec, |z| z.norm());
    let out = dir.path().join("e.ppm");
    let o = run(&[
        "render",
        "--field",
        path_str(&field),
        "--out",
        path_str(&out),
        "--overlay-shape",
        "ellipsoid:1.0,0.4,0.7",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (w, _, px) = ppm_pixels(&out);
    let grid: SamplingGrid = spec.parse().unwrap();
    let (mut xmax, mut ymax, mut count) = (0.0f64, 0.0f64, 0);
    for (i, c) in px.chunks(3).enumerate() {
        if c != [0, 0, 0] {
            continue;
        }
        let z = pixel_point(&grid, 1, i % w, i / w).unwrap();
        let r = (z.x * z.x + (z.y / 0.4).powi(2)).sqrt();
        assert!((0.95..1.0).contains(&r), "outline pixel at {z} has r = {r}");
        xmax = xmax.max(z.x.abs());
        ymax = ymax.max(z.y.abs());
        count += 1;
    }
    assert!(count > 100);
    assert!(xmax > 0.98 && ymax > 0.38, "{xmax} {ymax}");
}

#[test]
fn render_rejects_bad_inputs() {
    let dir = TempDir::new().unwrap();
    let field = dir.path().join("f.csv");
    std::fs::write(&field, "# grid: plane:x3=0:-1,1:2\nx,y,z,value\n0,0,0,nan\n").unwrap();
    let out = dir.path().join("f.ppm");
    assert_eq!(code(&run(&["render", "--field", path_str(&field), "--out", path_str(&out)])), 2);
    let line = dir.path().join("l.csv");
    write_field(&line, "line:0,0,0:1,0,0:-1,1:5", |_| 1.0);
    assert_eq!(code(&run(&["render", "--field", path_str(&line), "--out", path_str(&out)])), 2);
    let good = dir.path().join("g.csv");
    write_field(&good, "plane:x3=0:-1,1:5", |_| 1.0);
    assert_eq!(code(&run(&["render", "--field", path_str(&good), "--out", path_str(&dir.path().join("g.bmp"))])), 2);
    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&run(&["render", "--field", path_str(&missing), "--out", path_str(&out)])), 3);
    assert!(!out.exists());
}

#[cfg(feature = "png")]
#[test]
fn png_output_has_signature() {
    let dir = TempDir::new().unwrap();
    let field = dir.path().join("f.csv");
    write_field(&field, "plane:x2=0:-1,1:4", |z| z.x.abs());
    let out = dir.path().join("f.png");
    assert_eq!(code(&run(&["render", "--field", path_str(&field), "--out", path_str(&out)])), 0);
    let bytes = std::fs::read(out).unwrap();
    assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
}
