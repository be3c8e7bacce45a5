//! Builders for the explicit semigroups: nested Cantor circles, the two-map
//! Figure 1 example, the three-map semigroup whose `J_min` misses `J(h_3)`,
//! the four-map family with exactly `k` Julia components, and a
//! non-hyperbolic pair.
//!
//! Every builder verifies the hypotheses it relies on and returns them as
//! [`AssumptionCheck`]s; a failing hypothesis is an error.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RasterSet};
use crate::poly::Polynomial;
use crate::semigroup::{postcritical_bounded_check, Generator, GeneratorSet, DEFAULT_DEPTH};

/// Equispaced samples per circle in all circle-set checks.
pub const CIRCLE_SAMPLES: usize = 4096;
/// Largest exponent tried by the automatic exponent searches.
pub const MAX_SWEEP_EXPONENT: u32 = 30;
/// Tolerance for the on-circle identities of the three-map example.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Depth of the forward-orbit sampling in condition (iii) of the four-map
/// construction.
pub const ORBIT_CHECK_DEPTH: usize = 12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub description: String,
    pub passed: bool,
    pub margin: f64,
}

/// Rectangle of the complex plane that contains `J(G)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Window {
    fn around(center: Complex64, half: f64) -> Self {
        Self {
            xmin: center.re - half,
            ymin: center.im - half,
            xmax: center.re + half,
            ymax: center.im + half,
        }
    }

    /// Grid of `width` columns over the window (square pixels).
    pub fn grid(&self, width: usize) -> Result<GridSpec> {
        GridSpec::from_corners(self.xmin, self.ymin, self.xmax, self.ymax, width)
    }
}

/// Parameters of a construction. Optional exponents are chosen by search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConstructionSpec {
    Cantor {
        a: Complex64,
        k: u32,
        b: Complex64,
        j: u32,
        m1: u32,
        m2: u32,
    },
    Figure1,
    HminNot {
        m2: u32,
        #[serde(default)]
        m3: Option<u32>,
    },
    KComponents {
        k: u32,
        m2: u32,
        #[serde(default)]
        m3: Option<u32>,
        #[serde(default)]
        m4: Option<u32>,
    },
    Nothyp {
        c: f64,
        m1: u32,
        m2: u32,
    },
}

impl ConstructionSpec {
    pub fn build(&self) -> Result<ConstructionResult> {
        match *self {
            ConstructionSpec::Cantor { a, k, b, j, m1, m2 } => cantor_circles(a, b, k, j, m1, m2),
            ConstructionSpec::Figure1 => figure1_semigroup(),
            ConstructionSpec::HminNot { m2, m3 } => {
                let m3 = match m3 {
                    Some(m) => m,
                    None => hmin_not_min_m3(m2)?,
                };
                hmin_not(m2, m3)
            }
            ConstructionSpec::KComponents { k, m2, m3, m4 } => {
                let m3 = match m3 {
                    Some(m) => m,
                    None => k_components_min_m3(k, m2)?,
                };
                let m4 = match m4 {
                    Some(m) => m,
                    None => k_components_min_m4(k, m2, m3)?,
                };
                k_components(k, m2, m3, m4)
            }
            ConstructionSpec::Nothyp { c, m1, m2 } => nothyp_pair(c, m1, m2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionResult {
    /// Parameters with every searched exponent filled in.
    pub spec: ConstructionSpec,
    pub gens: GeneratorSet,
    pub derived_constants: BTreeMap<String, f64>,
    pub assumption_checks: Vec<AssumptionCheck>,
    pub window: Window,
}

impl ConstructionResult {
    /// Rebuilds from the recorded parameters and compares.
    pub fn replay(&self) -> Result<bool> {
        let again = self.spec.build()?;
        Ok(again.gens == self.gens && again.assumption_checks == self.assumption_checks)
    }
}

#[derive(Default)]
struct Checks {
    list: Vec<AssumptionCheck>,
}

impl Checks {
    /// Records `margin > 0` (or `>= 0` when `closed`).
    fn margin(&mut self, description: impl Into<String>, margin: f64, closed: bool) {
        let passed = if closed { margin >= 0.0 } else { margin > 0.0 };
        self.list.push(AssumptionCheck {
            description: description.into(),
            passed,
            margin,
        });
    }

    fn all_pass(&self) -> bool {
        self.list.iter().all(|c| c.passed)
    }

    fn finish(self, hint: &str) -> Result<Vec<AssumptionCheck>> {
        if let Some(bad) = self.list.iter().find(|c| !c.passed) {
            return Err(Error::Construction {
                name: bad.description.clone(),
                margin: bad.margin,
                hint: hint.to_string(),
            });
        }
        Ok(self.list)
    }
}

fn circle(center: Complex64, radius: f64, n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |t| center + Complex64::from_polar(radius, TAU * t as f64 / n as f64))
}

/// `(ln|c|, D)` for a generator whose base is a monomial `a z^d`, so that the
/// generator is `c z^D`.
fn monomial_log_params(g: &Generator) -> Option<(f64, f64)> {
    let (a, d) = g.base.as_monomial()?;
    let d = d as f64;
    let big = d.powi(g.power as i32);
    let expo = if d == 1.0 { g.power as f64 } else { (big - 1.0) / (d - 1.0) };
    Some((a.norm().ln() * expo, big))
}

/// Smallest exponent in `1..=MAX_SWEEP_EXPONENT` for which `ok` holds,
/// assuming monotonicity: doubling until success, then bisection.
fn sweep_exponent(what: &str, mut ok: impl FnMut(u32) -> Result<bool>) -> Result<u32> {
    let mut lo = 0u32;
    let mut hi = 1u32;
    loop {
        if ok(hi)? {
            break;
        }
        if hi == MAX_SWEEP_EXPONENT {
            return Err(Error::Construction {
                name: format!("no {what} up to {MAX_SWEEP_EXPONENT} satisfies the conditions"),
                margin: f64::NAN,
                hint: String::new(),
            });
        }
        lo = hi;
        hi = (hi * 2).min(MAX_SWEEP_EXPONENT);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn constants(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// `g1 = (a z^k)^{∘m1}`, `g2 = (b z^j)^{∘m2}`: `J(G)` is a Cantor family of
/// round circles between the two generator circles.
pub fn cantor_circles(a: Complex64, b: Complex64, k: u32, j: u32, m1: u32, m2: u32) -> Result<ConstructionResult> {
    if k < 2 || j < 2 {
        return Err(Error::InvalidParameter("k and j must be at least 2".into()));
    }
    if m1 < 1 || m2 < 1 {
        return Err(Error::InvalidParameter("m1 and m2 must be at least 1".into()));
    }
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::InvalidParameter("a and b must be nonzero".into()));
    }
    let la = a.norm().ln() * (k - 1) as f64;
    let lb = b.norm().ln() * (j - 1) as f64;
    if (la - lb).abs() <= 1e-12 * la.abs().max(lb.abs()).max(1.0) {
        return Err(Error::InvalidParameter(
            "|a|^(k-1) = |b|^(j-1): the generator Julia circles coincide".into(),
        ));
    }
    let g1 = Generator::iterate("g1", Polynomial::monomial(a, k as usize), m1);
    let g2 = Generator::iterate("g2", Polynomial::monomial(b, j as usize), m2);
    let rho1 = a.norm().powf(-1.0 / (k - 1) as f64);
    let rho2 = b.norm().powf(-1.0 / (j - 1) as f64);
    let (lo, hi) = (rho1.min(rho2), rho1.max(rho2));
    let (llo, lhi) = (lo.ln(), hi.ln());

    // preimage of the annulus [lo, hi] under c z^D, in log-radius
    let pre = |g: &Generator| -> (f64, f64) {
        let (lc, d) = monomial_log_params(g).expect("monomial");
        ((llo - lc) / d, (lhi - lc) / d)
    };
    let (p1, p2) = (pre(&g1), pre(&g2));
    let mut checks = Checks::default();
    checks.margin(
        "g1^{-1}(A) within A",
        (p1.0 - llo).min(lhi - p1.1),
        true,
    );
    checks.margin(
        "g2^{-1}(A) within A",
        (p2.0 - llo).min(lhi - p2.1),
        true,
    );
    let gap = if p1.1 < p2.0 { p2.0 - p1.1 } else { p1.0 - p2.1 };
    checks.margin("g1^{-1}(A) and g2^{-1}(A) disjoint", gap, false);
    let assumption_checks = checks.finish(": increase m1/m2")?;

    let gens = GeneratorSet::new(vec![g1, g2])?;
    Ok(ConstructionResult {
        spec: ConstructionSpec::Cantor { a, k, b, j, m1, m2 },
        derived_constants: constants(&[
            ("radius_g1", rho1),
            ("radius_g2", rho2),
            ("R", gens.escape_radius()),
        ]),
        window: Window::around(c(0.0, 0.0), hi * 1.05),
        gens,
        assumption_checks,
    })
}

/// `h1 = (z²−1)²−1`, `h2 = (z²/4)² = z⁴/64`.
pub fn figure1_semigroup() -> Result<ConstructionResult> {
    let g1 = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
    let g2 = Polynomial::monomial(c(0.25, 0.0), 2);
    let gens = GeneratorSet::new(vec![Generator::iterate("h1", g1, 2), Generator::iterate("h2", g2, 2)])?;
    let verdict = postcritical_bounded_check(&gens, DEFAULT_DEPTH)?;
    let sample = verdict.sample();
    let max_modulus = sample.points.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut checks = Checks::default();
    checks.margin(
        "postcritical set bounded at depth 12",
        if verdict.is_bounded() {
            gens.escape_radius() - max_modulus
        } else {
            -1.0
        },
        false,
    );
    let assumption_checks = checks.finish("")?;
    Ok(ConstructionResult {
        spec: ConstructionSpec::Figure1,
        derived_constants: constants(&[("R", gens.escape_radius()), ("postcritical_max_modulus", max_modulus)]),
        window: Window::around(c(0.0, 0.0), 4.2),
        gens,
        assumption_checks,
    })
}

/// Quantities shared by the three- and four-map examples.
struct ThreeMap {
    h1: Generator,
    h2: Generator,
    p: f64,
    r: f64,
    eps: f64,
    /// Samples of `h1^{-1}(J(f3)) ∪ h2^{-1}(J(f3))`.
    outer_samples: Vec<Complex64>,
    /// `max |z − ε|` over those samples.
    rho_out: f64,
    /// The annulus `A′` about `ε`.
    annulus: (f64, f64),
    checks: Checks,
}

fn three_map(m2: u32) -> Result<ThreeMap> {
    if m2 < 2 {
        return Err(Error::InvalidParameter("m2 must be at least 2".into()));
    }
    if m2 > 12 {
        return Err(Error::InvalidParameter("m2 above 12 is not supported".into()));
    }
    let h1 = Generator::new("h1", Polynomial::monomial(c(-1.0, 0.0), 2));
    let h2 = Generator::iterate("h2", Polynomial::monomial(c(FRAC_1_SQRT_2, 0.0), 2), m2);
    // h2 = c z^D, and P > 0 solves |h2(P)| = 1
    let (lc, d) = monomial_log_params(&h2).expect("monomial");
    let p = (-lc / d).exp();
    let p2 = p * p;
    let p4 = p2 * p2;
    let r = (p4 + p2) / 2.0;
    let eps = (p4 - p2) / 2.0;
    let center = c(eps, 0.0);

    let mut outer_samples = Vec::new();
    let mut pre1_extremes = (f64::INFINITY, 0.0f64);
    let mut pre2_max = 0.0f64;
    for w in circle(center, r, CIRCLE_SAMPLES) {
        for z in h1.base.preimages(w)? {
            let dz = (z - center).norm();
            pre1_extremes = (pre1_extremes.0.min((dz - r).abs()), pre1_extremes.1.max(dz));
            outer_samples.push(z);
        }
        for z in h2.base.preimages(w)? {
            pre2_max = pre2_max.max((z - center).norm());
            outer_samples.push(z);
        }
    }
    let rho_out = pre1_extremes.1.max(pre2_max);
    let annulus = (rho_out + (r - rho_out) / 3.0, rho_out + 2.0 * (r - rho_out) / 3.0);

    let mut checks = Checks::default();
    checks.margin("h1^{-1}(J(f3)) and J(f3) disjoint", pre1_extremes.0, false);
    checks.margin("h1^{-1}(J(f3)) inside J(f3)", r - pre1_extremes.1, false);
    checks.margin("h2^{-1}(J(f3)) inside J(f3)", r - pre2_max, false);
    let on_circle = |z: Complex64| ((z - center).norm() - r).abs();
    let worst = on_circle(c(-p2, 0.0)).max(on_circle(c(p4, 0.0)));
    checks.margin("-P^2 and P^4 on C(eps, r)", IDENTITY_TOL * r - worst, true);
    let chain = h1.eval(h1.eval(Complex64::from_polar(p, PI / 4.0)));
    checks.margin(
        "h1^2(e^{i pi/4} P) = P^4",
        IDENTITY_TOL - (chain - c(p4, 0.0)).norm() / p4,
        true,
    );
    Ok(ThreeMap {
        h1,
        h2,
        p,
        r,
        eps,
        outer_samples,
        rho_out,
        annulus,
        checks,
    })
}

/// `r (ρ/r)^{2^{n}}`: image radius about `ε` of the circle of radius `ρ`
/// under `f3^{n}`; negative `n` gives preimages.
fn f3_radius(r: f64, rho: f64, n: f64) -> f64 {
    r * ((rho / r).ln() * n.exp2()).exp()
}

fn h3_of(m3: u32, eps: f64, r: f64) -> Generator {
    Generator::iterate("h3", Polynomial::shifted_square(c(eps, 0.0), c(r, 0.0)), m3)
}

fn check_h3_contracts(t: &mut ThreeMap, m3: u32) {
    let (eps, r) = (t.eps, t.r);
    let image = eps + f3_radius(r, t.annulus.1, m3 as f64);
    t.checks.margin("h3(A') inside B(0,1)", 1.0 - image, false);
    let unit = eps + f3_radius(r, 1.0 + eps, m3 as f64);
    t.checks.margin("h3(B(0,1)) inside B(0,1)", 1.0 - unit, false);
}

fn three_map_window(eps: f64, r: f64) -> Window {
    Window::around(c(eps, 0.0), r * 1.03)
}

/// `h1 = −z²`, `h2 = (z²/√2)^{∘m2}`, `h3 = f3^{∘m3}` with
/// `f3 = (z−ε)²/r + ε`, `J(f3) = C(ε, r)` through `−P²` and `P⁴`.
pub fn hmin_not(m2: u32, m3: u32) -> Result<ConstructionResult> {
    if m3 < 1 {
        return Err(Error::InvalidParameter("m3 must be at least 1".into()));
    }
    let mut t = three_map(m2)?;
    check_h3_contracts(&mut t, m3);
    let h3 = h3_of(m3, t.eps, t.r);
    let assumption_checks = std::mem::take(&mut t.checks).finish(": increase m2/m3")?;
    let gens = GeneratorSet::new(vec![t.h1, t.h2, h3])?;
    let formula = 2f64.powf((2f64.powi(m2 as i32) - 1.0) / 2f64.powi(m2 as i32 + 1));
    Ok(ConstructionResult {
        spec: ConstructionSpec::HminNot { m2, m3: Some(m3) },
        derived_constants: constants(&[
            ("P", t.p),
            ("P_closed_form", formula),
            ("r", t.r),
            ("eps", t.eps),
            ("rho_out", t.rho_out),
            ("annulus_inner", t.annulus.0),
            ("annulus_outer", t.annulus.1),
            ("m3", m3 as f64),
            ("R", gens.escape_radius()),
        ]),
        window: three_map_window(t.eps, t.r),
        gens,
        assumption_checks,
    })
}

/// Smallest `m3` accepted by [`hmin_not`].
pub fn hmin_not_min_m3(m2: u32) -> Result<u32> {
    let base = three_map(m2)?;
    if !base.checks.all_pass() {
        return Err(Error::Construction {
            name: "three-map hypotheses fail independently of m3".into(),
            margin: f64::NAN,
            hint: ": increase m2".into(),
        });
    }
    sweep_exponent("m3", |m3| {
        let mut t = three_map(m2)?;
        check_h3_contracts(&mut t, m3);
        Ok(t.checks.all_pass())
    })
}

/// Geometry of the four-map construction that depends on `m3` only.
struct FourMap {
    t: ThreeMap,
    m3: u32,
    ell: u32,
    eps0: f64,
    r0: f64,
    /// Radii about `ε` of the round annuli making up `A_0`.
    a0: Vec<(f64, f64)>,
    levels: Vec<(f64, f64)>,
}

fn four_map(k: u32, m2: u32, m3: u32) -> Result<FourMap> {
    if k < 2 {
        return Err(Error::InvalidParameter(
            "k must be at least 2 (k = 1 is any connected example)".into(),
        ));
    }
    if m3 < 1 {
        return Err(Error::InvalidParameter("m3 must be at least 1".into()));
    }
    let mut t = three_map(m2)?;
    check_h3_contracts(&mut t, m3);
    let ell = k - 2;
    let (r, eps) = (t.r, t.eps);
    let center = c(eps, 0.0);
    let p4 = t.p.powi(4);
    // B lies between C(0,1) and the outer curve; radially about ε it spans
    let rho_in = 1.0 - eps.abs();
    let level = |n: u32| -> (f64, f64) {
        let s = -((n * m3) as f64);
        (f3_radius(r, rho_in, s), f3_radius(r, t.rho_out, s))
    };
    let levels: Vec<(f64, f64)> = (0..=ell + 2).map(level).collect();
    t.checks.margin("h3^{-1}(B) beyond A'", levels[1].0 - t.annulus.1, false);

    // smallest circle tangent to C(ε, r) at P⁴ enclosing h3^{-(ℓ+1)}(B):
    // its radius is the largest |d|²/(−2 Re d), d = z − P⁴
    let depth = ((ell + 1) * m3) as i32;
    let turns = 2f64.powi(depth);
    let mut r0 = 0.0f64;
    for &w in &t.outer_samples {
        let dw = w - center;
        let (rho, theta) = (dw.norm(), dw.arg());
        let radius = f3_radius(r, rho, -(depth as f64));
        let k0 = ((PI * turns - theta) / TAU).round();
        for dk in [-1.0, 0.0, 1.0] {
            let psi = PI + (theta + TAU * (k0 + dk) - PI * turns) / turns;
            let d = center + Complex64::from_polar(radius, psi) - c(p4, 0.0);
            if d.re < 0.0 {
                r0 = r0.max(d.norm_sqr() / (-2.0 * d.re));
            }
        }
    }
    let eps0 = p4 - r0;
    t.checks.margin("eps0 inside B(0,1)", 1.0 - eps0.abs(), false);
    let (b_ell, a_next) = (levels[ell as usize].1, levels[ell as usize + 1].0);
    t.checks.margin("C(eps0, r0) beyond h3^{-l}(B)", 2.0 * r0 - r - b_ell, false);
    t.checks.margin("gap between h3^{-l}(B) and h3^{-(l+1)}(B)", a_next - b_ell, false);
    let gap = a_next - b_ell;
    let a2 = (b_ell + gap / 3.0, b_ell + 2.0 * gap / 3.0);
    t.checks.margin(
        "h3^{l+1}(A'') inside B(0,1)",
        1.0 - eps - f3_radius(r, a2.1, depth as f64),
        false,
    );
    let mut a0 = vec![t.annulus];
    for jj in 0..=ell {
        let s = (jj * m3) as f64;
        a0.push((f3_radius(r, a2.0, s), f3_radius(r, a2.1, s)));
    }
    Ok(FourMap {
        t,
        m3,
        ell,
        eps0,
        r0,
        a0,
        levels,
    })
}

/// Modulus of `g(z)`, stopping early once beyond `escape` (moduli beyond the
/// escape radius only grow).
fn modulus_lower_bound(g: &Generator, z: Complex64, escape: f64) -> f64 {
    let mut w = z;
    for _ in 0..g.power {
        w = g.base.eval(w);
        if !(w.norm() <= escape) {
            return if w.norm().is_finite() { w.norm() } else { f64::MAX };
        }
    }
    w.norm()
}

fn four_map_checks(f: &FourMap, m4: u32) -> Result<(Generator, GeneratorSet, Checks)> {
    if m4 < 1 {
        return Err(Error::InvalidParameter("m4 must be at least 1".into()));
    }
    let t = &f.t;
    let (eps, r) = (t.eps, t.r);
    let center = c(eps, 0.0);
    let center0 = c(f.eps0, 0.0);
    let shift = (f.eps0 - eps).abs();
    let f4 = Polynomial::shifted_square(center0, c(f.r0, 0.0));
    let h4 = Generator::iterate("h4", f4, m4);
    let h3 = h3_of(f.m3, eps, r);
    let gens = GeneratorSet::new(vec![t.h1.clone(), t.h2.clone(), h3.clone(), h4.clone()])?;
    let big_r = gens.escape_radius();
    let mut checks = Checks::default();

    // (i) h4(A0) ⊂ B(0,1), radially about ε0
    let s = f.a0.iter().map(|a| a.1).fold(0.0, f64::max) + shift;
    let worst = f.eps0.abs() + f3_radius(f.r0, s, m4 as f64);
    checks.margin("(i) h4(A0) inside B(0,1)", 1.0 - worst, false);

    // (ii) h4^{-1}(C(0,1)) meets h3^{-(l+1)}(J_min): the connected curve
    // h3^{-(l+1)}(γ2) has points on both sides of it
    let depth = ((f.ell + 1) * f.m3) as i32;
    let turns = 2f64.powi(depth);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &w in t.outer_samples.iter().step_by(8) {
        let dw = w - center;
        let radius = f3_radius(r, dw.norm(), -(depth as f64));
        let theta = dw.arg();
        let k_pi = ((PI * turns - theta) / TAU).round();
        for psi in [theta / turns, PI + (theta + TAU * k_pi - PI * turns) / turns] {
            let z = center + Complex64::from_polar(radius, psi);
            let m = modulus_lower_bound(&h4, z, big_r);
            lo = lo.min(m);
            hi = hi.max(m);
        }
    }
    // the maximiser of r0 lies on C(ε0, r0), which h4 preserves
    let on_c = center0 - c(f.r0, 0.0);
    hi = hi.max(modulus_lower_bound(&h4, on_c, big_r));
    checks.margin("(ii) h4^{-1}(C(0,1)) meets h3^{-(l+1)}(J_min)", (1.0 - lo).min(hi - 1.0), false);

    // (iii) h4 sends every h∘h_j(A0), j = 1, 2, h ∈ <h1,h2,h3> ∪ {id}, beyond R
    let mut frontier: Vec<Complex64> = Vec::new();
    for &(inner, outer) in &f.a0 {
        for q in 0..4 {
            let rho = inner + (outer - inner) * q as f64 / 3.0;
            for z in circle(center, rho, CIRCLE_SAMPLES / 4) {
                frontier.push(t.h1.eval(z));
                frontier.push(t.h2.eval(z));
            }
        }
    }
    let key = |z: Complex64| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut margin = f64::INFINITY;
    let mut visited = 0usize;
    for _ in 0..=ORBIT_CHECK_DEPTH {
        let mut next = Vec::new();
        for z in frontier {
            if !(z.norm() <= big_r) || !seen.insert(key(z)) {
                continue;
            }
            visited += 1;
            margin = margin.min(modulus_lower_bound(&h4, z, big_r) - big_r);
            for g in [&t.h1, &t.h2, &h3] {
                next.push(g.eval(z));
            }
        }
        frontier = next;
        if visited > crate::semigroup::ORBIT_BUDGET {
            return Err(Error::Budget {
                what: "orbit points in condition (iii)",
                count: visited,
                budget: crate::semigroup::ORBIT_BUDGET,
            });
        }
    }
    checks.margin("(iii) h4 maps the forward images of h1(A0), h2(A0) beyond R", margin, false);

    // (iv) h4^{-1}(C(0,1)) surrounds h3^{-l}(B)
    let inner = f3_radius(f.r0, 1.0 - f.eps0.abs(), -(m4 as f64));
    let b_ell = f.levels[f.ell as usize].1;
    checks.margin("(iv) h4^{-1}(C(0,1)) beyond h3^{-l}(B)", inner - (b_ell + shift), false);
    Ok((h4, gens, checks))
}

/// Four generators `h1, h2, h3, h4` with exactly `k` Julia components: the
/// three-map example plus `h4 = f4^{∘m4}`, `J(f4)` the circle internally
/// tangent to `J(h3)` at `P⁴` that just encloses `h3^{-(k-1)}(B)`.
pub fn k_components(k: u32, m2: u32, m3: u32, m4: u32) -> Result<ConstructionResult> {
    let f = four_map(k, m2, m3)?;
    let (_, gens, checks) = four_map_checks(&f, m4)?;
    let mut all = Checks::default();
    all.list.extend(f.t.checks.list.iter().cloned());
    all.list.extend(checks.list);
    let assumption_checks = all.finish(": increase m3 (geometry) or m4 (conditions i-iv)")?;
    let mut derived = constants(&[
        ("P", f.t.p),
        ("r", f.t.r),
        ("eps", f.t.eps),
        ("l", f.ell as f64),
        ("eps0", f.eps0),
        ("r0", f.r0),
        ("m3", m3 as f64),
        ("m4", m4 as f64),
        ("R", gens.escape_radius()),
    ]);
    for (n, (a, b)) in f.levels.iter().enumerate() {
        derived.insert(format!("level{n}_inner"), *a);
        derived.insert(format!("level{n}_outer"), *b);
    }
    Ok(ConstructionResult {
        spec: ConstructionSpec::KComponents {
            k,
            m2,
            m3: Some(m3),
            m4: Some(m4),
        },
        derived_constants: derived,
        window: three_map_window(f.t.eps, f.t.r),
        gens,
        assumption_checks,
    })
}

/// Smallest `m3` for which the `m3`-dependent hypotheses of
/// [`k_components`] hold.
pub fn k_components_min_m3(k: u32, m2: u32) -> Result<u32> {
    sweep_exponent("m3", |m3| Ok(four_map(k, m2, m3)?.t.checks.all_pass()))
}

/// Smallest `m4` for which conditions (i)–(iv) hold.
pub fn k_components_min_m4(k: u32, m2: u32, m3: u32) -> Result<u32> {
    let f = four_map(k, m2, m3)?;
    if !f.t.checks.all_pass() {
        return Err(Error::Construction {
            name: "hypotheses on m3 fail".into(),
            margin: f64::NAN,
            hint: ": increase m3".into(),
        });
    }
    sweep_exponent("m4", |m4| Ok(four_map_checks(&f, m4)?.2.all_pass()))
}

/// `h1 = (z²+c)^{∘m1}`, `h2 = ((z−z0)²/(c−z0) + z0)^{∘m2}` with `z0` the
/// attracting fixed point of `z²+c`. The critical value `c` of `h1` lies on
/// `J(h2)`, so the semigroup is not hyperbolic.
pub fn nothyp_pair(cpar: f64, m1: u32, m2: u32) -> Result<ConstructionResult> {
    if !(cpar > 0.0 && cpar < 0.25) {
        return Err(Error::InvalidParameter("c must lie in (0, 1/4)".into()));
    }
    if m1 < 1 || m2 < 1 {
        return Err(Error::InvalidParameter("m1 and m2 must be at least 1".into()));
    }
    let z0 = (1.0 - (1.0 - 4.0 * cpar).sqrt()) / 2.0;
    let rho = (cpar - z0).abs();
    let f1 = Polynomial::from_real(&[cpar, 0.0, 1.0]);
    let f2 = Polynomial::shifted_square(c(z0, 0.0), c(cpar - z0, 0.0));
    let h1 = Generator::iterate("h1", f1, m1);
    let h2 = Generator::iterate("h2", f2, m2);
    let mut checks = Checks::default();
    for h in [&h1, &h2] {
        let worst = circle(c(z0, 0.0), rho, CIRCLE_SAMPLES)
            .map(|z| (h.eval(z) - z0).norm())
            .fold(0.0, f64::max);
        checks.margin(
            format!("{} maps the closed disk B(z0, |c-z0|) into itself", h.name),
            rho * (1.0 + 1e-12) - worst,
            true,
        );
    }
    let assumption_checks = checks.finish(": increase m1/m2")?;
    let gens = GeneratorSet::new(vec![h1, h2])?;

    // window: bounding box of the filled Julia set of z² + c
    let probe = GridSpec::square(c(0.0, 0.0), 2.0, 256)?;
    let f1 = Polynomial::from_real(&[cpar, 0.0, 1.0]);
    let filled = RasterSet::from_fn(probe, |z0| {
        let mut z = z0;
        for _ in 0..200 {
            z = f1.eval(z);
            if z.norm() > 2.0 {
                return false;
            }
        }
        true
    });
    let half = filled
        .members()
        .map(|i| {
            let z = probe.center_of_index(i);
            z.re.abs().max(z.im.abs())
        })
        .fold(0.0, f64::max)
        + 4.0 * probe.delta();
    Ok(ConstructionResult {
        spec: ConstructionSpec::Nothyp { c: cpar, m1, m2 },
        derived_constants: constants(&[
            ("c", cpar),
            ("z0", z0),
            ("radius_J(f2)", rho),
            ("witness_distance_to_J(h2)", ((cpar - z0).abs() - rho).abs()),
            ("R", gens.escape_radius()),
        ]),
        window: Window::around(c(0.0, 0.0), half),
        gens,
        assumption_checks,
    })
}
