use std::path::PathBuf;

use num_complex::Complex64;

use semijulia::distance::{directed_px, hausdorff_px};
use semijulia::dynamics::{circle_raster, julia_chaos, julia_survivor_default};
use semijulia::verify::{run_suite, SuiteConfig, Verdict};
use semijulia::{GeneratorSet, GridSpec, Polynomial};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("semijulia-oracles-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn square_map_gives_unit_circle() {
    let gens = GeneratorSet::from_polys(vec![Polynomial::monomial(c(1.0, 0.0), 2)]).unwrap();
    let grid = GridSpec::square(c(0.0, 0.0), 1.5, 512).unwrap();
    let j = julia_survivor_default(&gens, &grid, 200).unwrap();
    let circle = circle_raster(&grid, c(0.0, 0.0), 1.0);
    assert!(directed_px(&circle, &j) <= 1.0);
    assert!(directed_px(&j, &circle) <= 3.0);
}

#[test]
fn shifted_squares_give_their_circles() {
    for (center, r) in [(c(0.5, -0.25), 1.2), (c(-1.0, 1.0), 0.6)] {
        let gens = GeneratorSet::from_polys(vec![Polynomial::shifted_square(center, c(r, 0.0))]).unwrap();
        let grid = GridSpec::square(center, 1.5 * r, 384).unwrap();
        let circle = circle_raster(&grid, center, r);
        let chaos = julia_chaos(&gens, None, 200_000, &grid, 7).unwrap();
        assert!(hausdorff_px(&chaos, &circle).unwrap() <= 2.0, "circle about {center}");
    }
}

#[test]
fn suite_is_deterministic_and_recomputable_from_artifacts() {
    let dir = scratch_dir("suite");
    let cfg = SuiteConfig::from_json(
        r#"{
            "suite": "cantor-small",
            "construction": {"name": "cantor", "a": [1.0, 0.0], "k": 2, "b": [0.25, 0.0], "j": 2, "m1": 2, "m2": 2},
            "grid": "-4.2:-4.2:4.2:4.2:384",
            "algorithms": {"survivor_iters": 40},
            "checks": ["invariance", "hyperbolic"],
            "artifacts": "out"
        }"#,
    )
    .unwrap();
    let first = run_suite(&cfg, &dir).unwrap();
    let second = run_suite(&cfg, &dir).unwrap();
    assert_eq!(first.to_json().unwrap(), second.to_json().unwrap());
    assert!(first.checks.iter().all(|ch| ch.verdict != Verdict::Fail), "{}", first.to_json().unwrap());

    let gens = cfg.construction.as_ref().unwrap().build().unwrap().gens;
    std::fs::write(dir.join("gens.json"), gens.to_json().unwrap()).unwrap();
    let replay = SuiteConfig::from_json(
        r#"{
            "suite": "cantor-small",
            "gens": "gens.json",
            "julia": "out/julia.pgm",
            "checks": ["invariance", "hyperbolic"]
        }"#,
    )
    .unwrap();
    let again = run_suite(&replay, &dir).unwrap();
    assert_eq!(first.checks.len(), again.checks.len());
    for (a, b) in first.checks.iter().zip(&again.checks) {
        assert_eq!(a.name, b.name);
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.metric, b.metric, "{}", a.name);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn suite_config_requires_generators() {
    let cfg = SuiteConfig::from_json(r#"{"suite": "x", "checks": ["invariance"]}"#).unwrap();
    assert!(run_suite(&cfg, &scratch_dir("missing")).is_err());
}
