//! Acceptance criteria at desk scale. One PASS/FAIL line per criterion; the
//! process exits non-zero when any criterion fails.

use std::time::Instant;

use num_complex::Complex64;
use semijulia::constructions::{
    cantor_circles, figure1_semigroup, hmin_not, hmin_not_min_m3, nothyp_pair, ConstructionResult, ConstructionSpec,
};
use semijulia::distance::{directed_px, hausdorff_px};
use semijulia::dynamics::{
    circle_raster, julia_chaos, julia_survivor_default, julia_word_union, union_of_preimages,
};
use semijulia::semigroup::{filled_in_window, postcritical_bounded_check, DEFAULT_DEPTH};
use semijulia::topology::{
    containment_report, find_jmin_jmax, is_jordan_curve, jmin_component, label_components, order_components,
    OrderResult,
};
use semijulia::verify::{check_fiberwise_cantor, check_hyperbolic, generator_julia_rasters};
use semijulia::{GeneratorSet, GridSpec, Polynomial, RasterSet};

const WIDTH: usize = 1024;
const TRIANGULATION_WIDTH: usize = 512;
const CONVERGED: usize = 200;
const ORACLE_PX: f64 = 2.0;
const TRIANGULATION_PX: f64 = 3.0;
const INVARIANCE_PX: f64 = 2.0;
const CONTAINMENT_PX: usize = 2;
const MIN_DIST_PX: f64 = 2.0;
const WITNESS_PX: f64 = 1.0;
const CHAOS_SAMPLES: usize = 1_000_000;
const SEED: u64 = 1;

type Outcome = Result<(bool, String), semijulia::Error>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cantor() -> ConstructionResult {
    cantor_circles(c(1.0, 0.0), c(0.25, 0.0), 2, 2, 2, 2).expect("cantor construction")
}

fn hmin() -> ConstructionResult {
    hmin_not(5, hmin_not_min_m3(5).expect("m3 search")).expect("hmin construction")
}

fn k_components(k: u32) -> semijulia::Result<ConstructionResult> {
    ConstructionSpec::KComponents {
        k,
        m2: 5,
        m3: None,
        m4: None,
    }
    .build()
}

fn within(set: &RasterSet, container: &RasterSet, px: usize) -> bool {
    set.is_subset_of(&container.dilate(px)).unwrap_or(false)
}

fn criterion1() -> Outcome {
    let gens = GeneratorSet::from_polys(vec![Polynomial::monomial(c(1.0, 0.0), 2)])?;
    let radius = gens.generators[0].leading_capacity()?;
    let grid = GridSpec::square(c(0.0, 0.0), 1.5, WIDTH)?;
    let truth = circle_raster(&grid, c(0.0, 0.0), radius);
    let d = [
        hausdorff_px(&julia_survivor_default(&gens, &grid, CONVERGED)?, &truth)?,
        hausdorff_px(&julia_chaos(&gens, None, CHAOS_SAMPLES, &grid, SEED)?, &truth)?,
        hausdorff_px(&julia_word_union(&gens, 6, &grid, CONVERGED)?, &truth)?,
    ];
    let ok = d.iter().all(|&x| x <= ORACLE_PX);
    Ok((ok, format!("survivor/chaos/word-union vs C(0,{radius}): {:.2}/{:.2}/{:.2} px", d[0], d[1], d[2])))
}

fn criterion2() -> Outcome {
    let res = cantor();
    let grid = res.window.grid(WIDTH)?;
    let khat = filled_in_window(&res.gens, &grid, CONVERGED);
    let j1 = circle_raster(&grid, c(0.0, 0.0), res.derived_constants["radius_g1"]);
    let j2 = circle_raster(&grid, c(0.0, 0.0), res.derived_constants["radius_g2"]);
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=5usize {
        let s = julia_survivor_default(&res.gens, &grid, n)?;
        let l = label_components(&s);
        let count_ok = l.count as usize == 1 << n;
        let jordan = l.ids().all(|id| is_jordan_curve(&l.component(id)));
        let total = matches!(order_components(&l, c(0.0, 0.0)), Ok(OrderResult::TotalOrder(_)));
        let extremes = match find_jmin_jmax(&l, &khat) {
            Ok((jmin, jmax)) => {
                within(&j1, &l.component(jmin), CONTAINMENT_PX) && within(&j2, &l.component(jmax), CONTAINMENT_PX)
            }
            Err(_) => false,
        };
        let pass = count_ok && jordan && total && extremes;
        ok &= pass;
        parts.push(format!(
            "n={n}: {}/{} comps{}{}{}",
            l.count,
            1 << n,
            if jordan { "" } else { ", non-Jordan" },
            if total { "" } else { ", order not total" },
            if extremes { "" } else { ", extremes wrong" },
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion3() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, res) in [("cantor", cantor()), ("figure1", figure1_semigroup()?)] {
        let grid = res.window.grid(TRIANGULATION_WIDTH)?;
        let s = julia_survivor_default(&res.gens, &grid, 40)?;
        let ch = julia_chaos(&res.gens, None, CHAOS_SAMPLES, &grid, SEED)?;
        let w = julia_word_union(&res.gens, 6, &grid, CONVERGED)?;
        let d = [hausdorff_px(&s, &ch)?, hausdorff_px(&s, &w)?, hausdorff_px(&ch, &w)?];
        ok &= d.iter().all(|&x| x <= TRIANGULATION_PX);
        parts.push(format!("{name} S-C/S-W/C-W {:.2}/{:.2}/{:.2} px", d[0], d[1], d[2]));
    }
    Ok((ok, parts.join("; ")))
}

fn all_examples() -> semijulia::Result<Vec<(String, ConstructionResult)>> {
    let mut v = vec![
        ("cantor".to_string(), cantor()),
        ("figure1".to_string(), figure1_semigroup()?),
        ("hmin-not".to_string(), hmin()),
    ];
    for k in 2..=4 {
        v.push((format!("k-components({k})"), k_components(k)?));
    }
    v.push(("nothyp".to_string(), nothyp_pair(0.1, 1, 1)?));
    Ok(v)
}

fn criterion4() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, res) in all_examples()? {
        let grid = res.window.grid(WIDTH)?;
        let j = julia_survivor_default(&res.gens, &grid, CONVERGED)?;
        let d = hausdorff_px(&j, &union_of_preimages(&res.gens, &j))?;
        ok &= d <= INVARIANCE_PX;
        parts.push(format!("{name} {d:.2} px"));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion5() -> Outcome {
    let res = figure1_semigroup()?;
    let bounded = postcritical_bounded_check(&res.gens, DEFAULT_DEPTH)?.is_bounded();
    let grid = res.window.grid(WIDTH)?;
    let j = julia_survivor_default(&res.gens, &grid, CONVERGED)?;
    let comps = label_components(&j).count;
    let rep = check_hyperbolic(&res.gens, &j, DEFAULT_DEPTH, MIN_DIST_PX);
    let dist = rep.checks[0].metric.unwrap_or(f64::NAN);
    let ok = bounded && comps >= 2 && rep.passed();
    Ok((ok, format!("bounded={bounded}, {comps} components, postcritical distance {dist:.2} px")))
}

fn criterion6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, res) in [("cantor", cantor()), ("figure1", figure1_semigroup()?), ("hmin-not", hmin())] {
        let grid = res.window.grid(WIDTH)?;
        let j = julia_survivor_default(&res.gens, &grid, CONVERGED)?;
        let khat = filled_in_window(&res.gens, &grid, CONVERGED);
        let l = label_components(&j);
        let jmin = l.component(jmin_component(&l, &khat)?);
        let d = directed_px(&khat.boundary(), &jmin);
        ok &= d <= CONTAINMENT_PX as f64;
        parts.push(format!("{name} {d:.2} px"));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion7() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 2..=4u32 {
        let res = k_components(k)?;
        let grid = res.window.grid(WIDTH)?;
        let j = julia_survivor_default(&res.gens, &grid, CONVERGED)?;
        let l = label_components(&j);
        let khat = filled_in_window(&res.gens, &grid, CONVERGED);
        let middle_clean = match find_jmin_jmax(&l, &khat) {
            Ok((jmin, jmax)) => {
                let gj = generator_julia_rasters(&res.gens, &grid)?;
                let r = containment_report(&l, &gj, jmin, jmax)?;
                r.components
                    .iter()
                    .filter(|c| c.id != jmin && c.id != jmax)
                    .all(|c| c.generators.is_empty())
            }
            Err(_) => false,
        };
        let pass = l.count as usize == k as usize && middle_clean;
        ok &= pass;
        parts.push(format!(
            "k={k}: {} components{}",
            l.count,
            if middle_clean { "" } else { ", middle component holds a generator Julia set" }
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion8() -> Outcome {
    let res = hmin();
    let dc = &res.derived_constants;
    let (p, r, eps) = (dc["P"], dc["r"], dc["eps"]);
    let p_err = (p / 2f64.powf(31.0 / 64.0) - 1.0).abs();
    let on = |z: Complex64| ((z - c(eps, 0.0)).norm() - r).abs();
    let circle_err = on(c(-p * p, 0.0)).max(on(c(p.powi(4), 0.0)));
    let disjoint = res
        .assumption_checks
        .iter()
        .any(|a| a.description == "h1^{-1}(J(f3)) and J(f3) disjoint" && a.passed);
    let grid = res.window.grid(WIDTH)?;
    let j = julia_survivor_default(&res.gens, &grid, CONVERGED)?;
    let l = label_components(&j);
    let khat = filled_in_window(&res.gens, &grid, CONVERGED);
    let jmin = jmin_component(&l, &khat)?;
    let jmin_d = l.component(jmin).dilate(CONTAINMENT_PX);
    let jh1 = circle_raster(&grid, c(0.0, 0.0), 1.0);
    let pre = circle_raster(&grid, c(0.0, 0.0), p);
    let jh3 = circle_raster(&grid, c(eps, 0.0), r);
    let same = jh1.is_subset_of(&jmin_d)? && pre.is_subset_of(&jmin_d)?;
    let h3_other = l
        .ids()
        .filter(|&id| id != jmin)
        .any(|id| jh3.is_subset_of(&l.component(id).dilate(CONTAINMENT_PX)).unwrap_or(false));
    let ok = p_err <= 1e-12 && circle_err <= 1e-10 * r && disjoint && same && h3_other;
    Ok((
        ok,
        format!(
            "P rel err {p_err:.1e}, circle err {circle_err:.1e}, disjoint={disjoint}, J(h1)+h2^-1(J(h1)) in jmin={same}, J(h3) elsewhere={h3_other}"
        ),
    ))
}

fn criterion9() -> Outcome {
    let res = cantor();
    let grid = res.window.grid(WIDTH)?;
    let rep = check_fiberwise_cantor(&res.gens, &grid, 4);
    let detail = rep
        .checks
        .iter()
        .map(|c| format!("{} {:?} ({:?})", c.name, c.verdict, c.metric))
        .collect::<Vec<_>>()
        .join("; ");
    Ok((rep.passed(), detail))
}

fn criterion10() -> Outcome {
    let res = nothyp_pair(0.1, 1, 1)?;
    let grid = res.window.grid(WIDTH)?;
    let j = julia_survivor_default(&res.gens, &grid, CONVERGED)?;
    let full = check_hyperbolic(&res.gens, &j, DEFAULT_DEPTH, MIN_DIST_PX);
    let d_full = full.checks[0].metric.unwrap_or(f64::NAN);
    let witness = full.checks[0].witness.as_ref().and_then(|w| w.point);
    let h2 = res.gens.subset(&[1])?;
    let j2 = julia_survivor_default(&h2, &grid, CONVERGED)?;
    let sub = check_hyperbolic(&h2, &j2, DEFAULT_DEPTH, MIN_DIST_PX);
    let d_sub = sub.checks[0].metric.unwrap_or(f64::NAN);
    let ok = !full.passed() && d_full <= WITNESS_PX && sub.passed();
    Ok((
        ok,
        format!("<h1,h2>: distance {d_full:.2} px at {witness:?}; <h2>: distance {d_sub:.2} px"),
    ))
}

fn criterion11() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, res) in [("cantor", cantor()), ("figure1", figure1_semigroup()?)] {
        let grid = res.window.grid(TRIANGULATION_WIDTH)?;
        let mut bytes = Vec::new();
        for _ in 0..2 {
            let mut buf = Vec::new();
            julia_chaos(&res.gens, None, CHAOS_SAMPLES, &grid, SEED)?.write_pgm(&mut buf)?;
            bytes.push(buf);
        }
        let same = bytes[0] == bytes[1];
        ok &= same;
        parts.push(format!("{name} identical={same}"));
    }
    Ok((ok, parts.join("; ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("single-map oracle", criterion1),
        ("cantor circles components", criterion2),
        ("cross-algorithm triangulation", criterion3),
        ("backward self-similarity", criterion4),
        ("figure 1 hyperbolic and disconnected", criterion5),
        ("J_min contains the boundary of K-hat", criterion6),
        ("exactly k components", criterion7),
        ("three-map identities", criterion8),
        ("fiberwise Cantor family", criterion9),
        ("non-hyperbolic pair", criterion10),
        ("chaos determinism", criterion11),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let n = k + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let (ok, detail) = match f() {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {}: {name} [{:.1}s] {detail}",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
