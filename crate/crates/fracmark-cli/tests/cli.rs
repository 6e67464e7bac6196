//! End-to-end tests of the binary: exit-code contract, file outputs,
//! reproducibility of the CSV reports.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fracmark() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracmark"))
}

fn run(args: &[&str]) -> Output {
    fracmark().args(args).output().expect("binary runs")
}

fn assert_code(output: &Output, expected: i32) {
    let stdout = String::from_utf8_lossy(&output.stdout);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert_eq!(
        output.status.code(),
        Some(expected),
        "stdout:\n{stdout}\nstderr:\n{stderr}"
    );
}

fn path_str(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Workspace {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        Workspace { _dir: dir, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// keygen with the fixed demo parameters; returns the key path.
    fn keygen(&self) -> PathBuf {
        let key = self.path("key.json");
        let output = run(&[
            "keygen",
            "--out",
            path_str(&key),
            "--kind",
            "hilbert",
            "--n",
            "3",
            "--r",
            "1",
            "--m",
            "4",
            "--o",
            "2",
            "--x0",
            "0.31",
            "--a",
            "3.91",
            "--k",
            "250",
            "--d",
            "7",
        ]);
        assert_code(&output, 0);
        key
    }

    /// one synthetic 256x256 image on disk
    fn synth_image(&self, name: &str, seed: u64) -> PathBuf {
        let path = self.path(name);
        fracmark::synth::synthetic_image(256, seed)
            .save_with_format(&path, image::ImageFormat::Png)
            .unwrap();
        path
    }
}

#[test]
fn keygen_writes_key_and_fingerprint() {
    let ws = Workspace::new();
    let key = ws.keygen();
    let text = std::fs::read_to_string(&key).unwrap();
    assert!(text.contains("\"kind\": \"hilbert\""));
    assert!(text.contains("\"x0\""));
    // seeded mode is deterministic
    let k1 = ws.path("seeded1.json");
    let k2 = ws.path("seeded2.json");
    assert_code(&run(&["keygen", "--out", path_str(&k1), "--seed", "99"]), 0);
    assert_code(&run(&["keygen", "--out", path_str(&k2), "--seed", "99"]), 0);
    assert_eq!(
        std::fs::read(&k1).unwrap(),
        std::fs::read(&k2).unwrap()
    );
}

#[test]
fn keygen_rejects_out_of_range_parameters() {
    let ws = Workspace::new();
    let out = ws.path("bad.json");
    // a = 4.0 is outside the half-open range
    let output = run(&[
        "keygen", "--out", path_str(&out), "--kind", "hilbert", "--x0", "0.31", "--a", "4.0",
        "--k", "250", "--d", "7",
    ]);
    assert_code(&output, 2);
    assert!(!out.exists());
}

#[test]
fn embed_verify_round_trip_is_real() {
    let ws = Workspace::new();
    let key = ws.keygen();
    let input = ws.synth_image("plain.png", 400);
    let marked = ws.path("marked.png");

    let output = run(&[
        "embed",
        path_str(&input),
        "--key",
        path_str(&key),
        "--out",
        path_str(&marked),
    ]);
    assert_code(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("psnr:"), "{stdout}");

    let overlay = ws.path("overlay.png");
    let output = run(&[
        "verify",
        path_str(&marked),
        "--key",
        path_str(&key),
        "--overlay",
        path_str(&overlay),
    ]);
    assert_code(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("patch_rate: 1.000000"), "{stdout}");
    assert!(stdout.contains("verdict: real"), "{stdout}");
    // no tampering: the overlay equals the verified image
    assert_eq!(
        image::open(&overlay).unwrap().into_rgb8().as_raw(),
        image::open(&marked).unwrap().into_rgb8().as_raw()
    );
}

#[test]
fn verify_flags_spliced_image_as_fake() {
    let ws = Workspace::new();
    let key = ws.keygen();
    let input = ws.synth_image("victim.png", 401);
    let donor = ws.synth_image("donor.png", 402);
    let marked = ws.path("marked.png");
    let spliced = ws.path("spliced.png");

    assert_code(
        &run(&[
            "embed",
            path_str(&input),
            "--key",
            path_str(&key),
            "--out",
            path_str(&marked),
        ]),
        0,
    );
    let output = run(&[
        "attack",
        path_str(&marked),
        "--out",
        path_str(&spliced),
        "--spec",
        "splice:x=2,y=2,w=4,h=4",
        "--donor",
        path_str(&donor),
    ]);
    assert_code(&output, 0);

    let csv = ws.path("report.csv");
    let output = run(&[
        "verify",
        path_str(&spliced),
        "--key",
        path_str(&key),
        "--csv",
        path_str(&csv),
    ]);
    assert_code(&output, 1); // fake
    let report = std::fs::read_to_string(&csv).unwrap();
    assert!(report.starts_with("image,attack,params,bit_rate,patch_rate,verdict,mask"));
    assert!(report.contains("fake"), "{report}");
}

#[test]
fn verify_unwatermarked_image_is_fake_at_chance_level() {
    let ws = Workspace::new();
    let key = ws.keygen();
    let input = ws.synth_image("plain.png", 403);
    let output = run(&["verify", path_str(&input), "--key", path_str(&key)]);
    assert_code(&output, 1);
    let stdout = String::from_utf8_lossy(&output.stdout);
    let rate: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("patch_rate: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(rate < 0.25, "chance-level rate {rate}");
}

#[test]
fn wrong_image_size_exits_2_and_missing_file_exits_3() {
    let ws = Workspace::new();
    let key = ws.keygen();
    let odd = ws.path("odd.png");
    fracmark::synth::synthetic_image(96, 7)
        .save_with_format(&odd, image::ImageFormat::Png)
        .unwrap();
    let out = ws.path("out.png");
    let output = run(&[
        "embed",
        path_str(&odd),
        "--key",
        path_str(&key),
        "--out",
        path_str(&out),
    ]);
    assert_code(&output, 2); // 96 != 32 * 2^n... (96 = 32*3)

    let missing = ws.path("nope.png");
    let output = run(&[
        "embed",
        path_str(&missing),
        "--key",
        path_str(&key),
        "--out",
        path_str(&out),
    ]);
    assert_code(&output, 3);
}

#[test]
fn evaluate_writes_deterministic_csv_and_heatmap() {
    let ws = Workspace::new();
    let key = ws.keygen();
    let corpus = ws.path("corpus");
    assert_code(
        &run(&[
            "synth",
            "--out-dir",
            path_str(&corpus),
            "--count",
            "4",
            "--size",
            "256",
            "--seed",
            "1000",
        ]),
        0,
    );

    let csv1 = ws.path("run1.csv");
    let csv2 = ws.path("run2.csv");
    let attacks = "identity;jpeg:quality=80;splice:x=2,y=2,w=4,h=4";
    for csv in [&csv1, &csv2] {
        let output = run(&[
            "evaluate",
            "--corpus",
            path_str(&corpus),
            "--key",
            path_str(&key),
            "--attacks",
            attacks,
            "--csv",
            path_str(csv),
        ]);
        assert_code(&output, 0);
        let stdout = String::from_utf8_lossy(&output.stdout);
        assert!(stdout.contains("identity"), "{stdout}");
    }
    let bytes1 = std::fs::read(&csv1).unwrap();
    assert_eq!(bytes1, std::fs::read(&csv2).unwrap(), "CSV not reproducible");

    // identity rows must be perfect
    let text = String::from_utf8(bytes1).unwrap();
    for line in text.lines().filter(|l| l.contains("identity")) {
        assert!(line.contains("1.000000,1.000000,real"), "{line}");
    }

    let heat = ws.path("heat.png");
    let output = run(&["heatmap", path_str(&csv1), "--out", path_str(&heat), "--cell", "8"]);
    assert_code(&output, 0);
    let img = image::open(&heat).unwrap().into_rgb8();
    assert_eq!(img.dimensions(), (64, 64));
    // spliced center must be hotter than the untouched corner
    let center = img.get_pixel(32, 32)[0] as u32;
    let corner = img.get_pixel(4, 4)[0] as u32;
    assert!(center > corner, "center {center} corner {corner}");
}

#[test]
fn evaluate_rejects_empty_corpus() {
    let ws = Workspace::new();
    let key = ws.keygen();
    let empty = ws.path("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let output = run(&[
        "evaluate",
        "--corpus",
        path_str(&empty),
        "--key",
        path_str(&key),
        "--csv",
        path_str(&ws.path("out.csv")),
    ]);
    assert_code(&output, 2);
}

#[test]
fn prepare_center_crops_to_requested_size() {
    let ws = Workspace::new();
    let wide = ws.path("wide.png");
    // 300x200 -> crop to 200x200 -> resize to 64
    let mut img = image::RgbImage::new(300, 200);
    for (x, _, p) in img.enumerate_pixels_mut() {
        let v = (x % 256) as u8;
        *p = image::Rgb([v, v, v]);
    }
    img.save_with_format(&wide, image::ImageFormat::Png).unwrap();
    let out_dir = ws.path("prepared");
    let output = run(&[
        "prepare",
        path_str(&wide),
        "--out-dir",
        path_str(&out_dir),
        "--size",
        "64",
    ]);
    assert_code(&output, 0);
    let prepared = image::open(out_dir.join("wide.png")).unwrap();
    assert_eq!((prepared.width(), prepared.height()), (64, 64));

    // invalid target size
    let output = run(&[
        "prepare",
        path_str(&wide),
        "--out-dir",
        path_str(&out_dir),
        "--size",
        "100",
    ]);
    assert_code(&output, 2);
}

#[test]
fn key_env_variable_is_honored() {
    let ws = Workspace::new();
    let key = ws.keygen();
    let input = ws.synth_image("img.png", 404);
    let marked = ws.path("marked.png");
    let output = fracmark()
        .env("FRACMARK_KEY", &key)
        .args(["embed", path_str(&input), "--out", path_str(&marked)])
        .output()
        .unwrap();
    assert_code(&output, 0);

    let output = fracmark()
        .env_remove("FRACMARK_KEY")
        .args(["verify", path_str(&marked)])
        .output()
        .unwrap();
    assert_code(&output, 2); // no key source at all
}
