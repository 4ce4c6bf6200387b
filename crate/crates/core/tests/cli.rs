use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use unicritical::analysis::SweepRow;
use unicritical::cli::{csv_string, emit_csv, format_sig12, parse_csv, ppm_bytes, run_with};
use unicritical::exact_angle::Tag;
use unicritical::raster::{default_multibrot_window, filled_julia_grid, multibrot_log_slice, RasterMode, Window};

const DISK_SHA256: &str = "a797276e392b6b1e528fea140d93c9de0dad857c26bc2b05a395c349056a9c80";
const MULTIBROT_SHA256: &str = "05138944d4e34daa6be064236dce064ddcd9059127b59c9c553acf021475422e";

fn golden(name: &str) -> Vec<u8> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read(path).unwrap()
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Outcome {
    let argv: Vec<String> = std::iter::once("unicritical").chain(args.iter().copied()).map(String::from).collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(&argv, &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

#[test]
fn classify_exceptional() {
    let o = run(&["classify", "--theta", "13/15", "--n", "426"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout, "OnCircleFixed f=1/3 exceptional p=71 q=368\n");
}

#[test]
fn classify_zero_angle_warns() {
    let o = run(&["classify", "--theta", "0/1", "--n", "100"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("Disconnected r_n=2"), "{}", o.stdout);
    assert!(o.stderr.contains("excluded by the theorem"));
}

#[test]
fn classify_real_angle_and_trap() {
    let o = run(&["classify", "--theta-real", "0.4", "--n", "40", "--trap-epsilon", "0.3", "--trap-samples", "500"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("Connected r_n=0.618"), "{}", o.stdout);
    assert!(o.stdout.contains("trap regime=Attracting radius_ok=true"), "{}", o.stdout);
}

#[test]
fn table_marks_on_circle_cells() {
    let o = run(&["table", "--q", "15", "--n", "421..450", "--p", "1..30"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines.len(), 31);
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    let row: Vec<&str> = lines.iter().find(|l| l.trim_start().starts_with("426 ")).unwrap().split_whitespace().collect();
    let cell = |p: &str| row[header.iter().position(|h| *h == p).unwrap()];
    assert_eq!(cell("26"), "o");
    assert_eq!(cell("28"), "o");

    let csv = run(&["table", "--q", "15", "--n", "421..450", "--p", "1..30", "--format", "csv"]);
    assert!(csv.stdout.starts_with("n,1,2,3,"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&[]).code, 2);
    assert_eq!(run(&["classify", "--theta", "1/3", "--n", "1"]).code, 2);
    assert_eq!(run(&["classify", "--theta", "1/0", "--n", "5"]).code, 2);
    assert_eq!(run(&["classify", "--n", "5"]).code, 2);
    assert_eq!(run(&["classify", "--theta", "1/3", "--theta-real", "0.3", "--n", "5"]).code, 2);
    assert_eq!(run(&["classify", "--theta", "1/3", "--n", "5", "--trap-epsilon", "0"]).code, 2);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.ppm");
    let out = out.to_str().unwrap();
    assert_eq!(run(&["render", "--theta", "1/3", "--n", "5", "--resolution", "8", "--output", out]).code, 2);
    assert_eq!(run(&["render", "--theta", "1/3", "--n", "5", "--escape-radius", "0.5", "--output", out]).code, 2);
    assert_eq!(run(&["multibrot", "--n", "10", "--re-min", "1", "--re-max", "-1", "--output", out]).code, 2);
    assert_eq!(run(&["sweep", "--theta", "2/5", "--n", "1..3"]).code, 2);
    assert_eq!(run(&["equidist", "--theta-real", "0.4", "--N", "10"]).code, 2);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("classify"));
}

#[test]
fn runtime_errors_exit_1() {
    let o = run(&["render", "--theta", "1/3", "--n", "5", "--resolution", "16", "--output", "/nonexistent-dir/x.ppm"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("/nonexistent-dir/x.ppm"), "{}", o.stderr);
    // r_n = 1 for θ = 1/3, n = 2, so no trap regime applies.
    let o = run(&["classify", "--theta", "1/3", "--n", "2", "--trap-epsilon", "0.1"]);
    assert_eq!(o.code, 1, "{}", o.stdout);
    assert!(o.stderr.contains("inconclusive"));
}

#[test]
fn golden_disk_render() {
    let window = Window::default_square(64).unwrap();
    let grid = filled_julia_grid(2, num_complex::Complex64::new(0.0, 0.0), &window, 1000, 2.0).unwrap();
    let bytes = ppm_bytes(&grid);
    assert_eq!(sha256_hex(&bytes), DISK_SHA256);
    assert_eq!(bytes, golden("disk_n2_64.ppm"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("disk.ppm");
    let o = run(&["render", "--c", "0,0", "--n", "2", "--resolution", "64", "--output", path.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(fs::read(&path).unwrap(), bytes);
}

#[test]
fn golden_multibrot_render() {
    let window = default_multibrot_window(256, 128).unwrap();
    let grid = multibrot_log_slice(10, &window, 1000).unwrap();
    let bytes = ppm_bytes(&grid);
    assert_eq!(sha256_hex(&bytes), MULTIBROT_SHA256);
    assert_eq!(bytes, golden("multibrot_n10_256x128.ppm"));
}

#[test]
fn renders_are_stable_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let path = dir.path().join(format!("mb{threads}.ppm"));
        std::env::set_var("UNICRITICAL_THREADS", threads);
        let o = run(&["multibrot", "--n", "10", "--width", "256", "--height", "128", "--output", path.to_str().unwrap()]);
        std::env::remove_var("UNICRITICAL_THREADS");
        assert_eq!(o.code, 0, "{}", o.stderr);
        outputs.push(fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(sha256_hex(&outputs[0]), MULTIBROT_SHA256);
}

#[test]
fn ppm_two_pixel_example() {
    let window = Window::new(0.0, 2.0, 0.0, 1.0, 2, 1).unwrap();
    let grid = unicritical::raster::RasterGrid::from_mask(window, 10, vec![true, false]).unwrap();
    let mut expected = b"P5\n2 1\n255\n".to_vec();
    expected.extend([0x00, 0xFF]);
    assert_eq!(ppm_bytes(&grid), expected);
}

fn row(n: u64, tag: Tag, r: f64, dc: f64, dd: f64) -> SweepRow {
    SweepRow {
        n,
        classification: tag,
        r_n: r,
        dist_to_circle: dc,
        dist_to_disk: dd,
        excluded_by_theorem: false,
        mode: RasterMode::Center,
    }
}

#[test]
fn csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_csv(&[], &path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "n,classification,r_n,dist_to_circle,dist_to_disk\n");

    let path = dir.path().join("one.csv");
    emit_csv(&[row(30, Tag::Connected, 0.618_033_988_749_895, 0.5, 0.02)], &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(text.lines().nth(1).unwrap(), "30,Connected,0.618033988750,0.500000000000,0.0200000000000");
    assert!(!text.contains('\r'));
}

#[test]
fn csv_round_trip() {
    let rows: Vec<SweepRow> = (0..200u64)
        .map(|k| {
            let x = (k as f64 * 0.737).sin().abs() * 10f64.powi(k as i32 % 7 - 4);
            row(k + 2, if k % 2 == 0 { Tag::Connected } else { Tag::Disconnected }, 1.0 + x, x / 3.0, x * 7.0)
        })
        .collect();
    let text = csv_string(&rows);
    let parsed = parse_csv(&text).unwrap();
    assert_eq!(parsed.len(), rows.len());
    for (a, b) in rows.iter().zip(&parsed) {
        assert_eq!(a.n, b.n);
        assert_eq!(a.classification, b.classification);
        for (x, y) in [(a.r_n, b.r_n), (a.dist_to_circle, b.dist_to_circle), (a.dist_to_disk, b.dist_to_disk)] {
            assert_eq!(format_sig12(x), format_sig12(y));
            assert!((x - y).abs() <= 5e-12 * x.abs());
        }
    }
    assert_eq!(csv_string(&parsed), text);
}

#[test]
fn sweep_matches_partition_labels() {
    let o = run(&["sweep", "--theta", "2/5", "--n", "25..34", "--resolution", "64", "--max-iter", "200"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = parse_csv(&o.stdout).unwrap();
    assert_eq!(rows.len(), 10);
    let partition = unicritical::analysis::partition_subsequences(
        unicritical::exact_angle::RationalAngle::new(2, 5).unwrap(),
        25..=34,
        Some(0.1),
    )
    .unwrap();
    for r in &rows {
        let expected = if partition.to_disk.contains(&r.n) { Tag::Connected } else { Tag::Disconnected };
        assert_eq!(r.classification, expected, "n={}", r.n);
    }
}

#[test]
fn symmetry_and_equidist_commands() {
    let o = run(&["symmetry", "--theta", "2/5", "--n", "27", "--resolution", "256"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("defect="));
    let o = run(&["equidist", "--cf", "1,2*60", "--N", "10000"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("rational_like=none"), "{}", o.stdout);
    let o = run(&["equidist", "--theta-real", "0.5", "--N", "1000"]);
    assert!(o.stdout.contains("connected_fraction=0.5 ") && o.stdout.contains("rational_like=1/2"), "{}", o.stdout);
}
