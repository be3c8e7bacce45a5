//! Generators, words, escape radius, postcritical sampling and the smallest
//! filled-in Julia set.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::dynamics::PolyMap;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, RasterSet};
use crate::poly::Polynomial;

/// Resolution at which postcritical orbit points are merged.
pub const ORBIT_DEDUP: f64 = 1e-9;
/// Default orbit-point budget for [`postcritical_bounded_check`].
pub const ORBIT_BUDGET: usize = 10_000_000;
/// Default depth for postcritical sampling.
pub const DEFAULT_DEPTH: usize = 12;

/// A generator `base^{∘power}`. High iterates are kept in this lazy form so
/// that coefficients never blow up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    #[serde(rename = "coeffs")]
    pub base: Polynomial,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub power: u32,
}

fn one() -> u32 {
    1
}

fn is_one(p: &u32) -> bool {
    *p == 1
}

/// Composed degrees above this stay lazy.
pub const MAX_EXPANDED_DEGREE: usize = 16;

impl Generator {
    pub fn new(name: impl Into<String>, base: Polynomial) -> Self {
        Self {
            name: name.into(),
            base,
            power: 1,
        }
    }

    /// `base^{∘power}`, expanded to coefficients when the result has degree at
    /// most [`MAX_EXPANDED_DEGREE`] (monomials are always expanded in closed
    /// form).
    pub fn iterate(name: impl Into<String>, base: Polynomial, power: u32) -> Self {
        let name = name.into();
        assert!(power >= 1, "iterate needs power >= 1");
        if let Some((a, d)) = base.as_monomial() {
            // a z^d composed m times is a^{(d^m - 1)/(d - 1)} z^{d^m}
            if let Some(deg) = (d as u64).checked_pow(power).filter(|&e| e <= u32::MAX as u64) {
                let expo = if d == 1 {
                    power as f64
                } else {
                    (deg as f64 - 1.0) / (d as f64 - 1.0)
                };
                let coeff = Complex64::from_polar(a.norm().powf(expo), a.arg() * expo);
                if deg as usize <= 1 << 16 {
                    return Self::new(name, Polynomial::monomial(coeff, deg as usize));
                }
            }
            return Self { name, base, power };
        }
        let d = base.degree();
        let fits = (d as u64).checked_pow(power).is_some_and(|e| e <= MAX_EXPANDED_DEGREE as u64);
        if fits {
            let mut p = base.clone();
            for _ in 1..power {
                p = base.compose(&p);
            }
            Self::new(name, p)
        } else {
            Self { name, base, power }
        }
    }

    /// Degree of the composed map (saturating).
    pub fn degree(&self) -> u64 {
        (self.base.degree() as u64).saturating_pow(self.power)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (0..self.power).fold(z, |w, _| self.base.eval(w))
    }

    /// Value and derivative by the chain rule.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut w = z;
        let mut dw = Complex64::new(1.0, 0.0);
        for _ in 0..self.power {
            let (v, dv) = self.base.eval_with_derivative(w);
            dw *= dv;
            w = v;
        }
        (w, dw)
    }

    /// Finite critical values: `base^k(c)` for critical points `c` of the base
    /// and `1 ≤ k ≤ power`.
    pub fn critical_values(&self) -> Result<Vec<Complex64>> {
        let mut out = Vec::new();
        for c in self.base.critical_points()? {
            let mut w = c;
            for _ in 0..self.power {
                w = self.base.eval(w);
                out.push(w);
            }
        }
        Ok(out)
    }

    pub fn leading_capacity(&self) -> Result<f64> {
        self.base.leading_capacity()
    }

    /// A uniformly random preimage: one branch of the base inverse is picked
    /// uniformly at each of the `power` stages.
    pub fn random_preimage<R: Rng>(&self, w: Complex64, rng: &mut R) -> Result<Complex64> {
        let d = self.base.degree();
        let mut z = w;
        for _ in 0..self.power {
            z = self.base.preimage_branch(z, rng.gen_range(0..d))?;
        }
        Ok(z)
    }

    /// Repelling fixed point of largest modulus.
    pub fn repelling_fixed_point(&self) -> Result<Complex64> {
        let mut shifted = self.base.coeffs().to_vec();
        shifted.resize(shifted.len().max(2), Complex64::new(0.0, 0.0));
        shifted[1] -= Complex64::new(1.0, 0.0);
        let fixed = Polynomial::new(shifted).roots()?;
        fixed
            .into_iter()
            .filter(|&z| self.base.eval_with_derivative(z).1.norm() > 1.0 + 1e-9)
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .ok_or_else(|| Error::NoRepellingFixedPoint(self.name.clone()))
    }
}

impl PolyMap for Generator {
    fn eval(&self, z: Complex64) -> Complex64 {
        Generator::eval(self, z)
    }

    fn disk_image(&self, c: Complex64, rho: f64, escape: f64) -> Option<(Complex64, f64)> {
        let base_escape = doubling_radius(&self.base);
        let mut center = c;
        let mut radius = rho;
        for step in 0..self.power {
            if !radius.is_finite() {
                return Some((center, f64::INFINITY));
            }
            let (c2, r2) = self.base.disk_image(center, radius);
            center = c2;
            radius = r2;
            // beyond the base escape radius the modulus at least doubles
            let low = center.norm() - radius;
            if low > base_escape {
                let remaining = (self.power - step - 1).min(1023) as i32;
                if low * 2f64.powi(remaining) > escape {
                    return None;
                }
            }
        }
        Some((center, radius))
    }
}

/// A finite family of generators of degree at least two.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorSet {
    pub generators: Vec<Generator>,
    #[serde(skip)]
    escape_radius: f64,
}

#[derive(Deserialize)]
struct GeneratorSetDoc {
    generators: Vec<Generator>,
}

impl<'de> Deserialize<'de> for GeneratorSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = GeneratorSetDoc::deserialize(d)?;
        GeneratorSet::new(doc.generators).map_err(serde::de::Error::custom)
    }
}

impl GeneratorSet {
    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::NoGenerators);
        }
        for g in &generators {
            if g.base.degree() < 2 {
                return Err(Error::DegreeTooLow {
                    degree: g.base.degree(),
                    required: 2,
                });
            }
        }
        let escape_radius = escape_radius_of(&generators);
        Ok(Self {
            generators,
            escape_radius,
        })
    }

    pub fn from_polys(polys: Vec<Polynomial>) -> Result<Self> {
        Self::new(
            polys
                .into_iter()
                .enumerate()
                .map(|(i, p)| Generator::new(format!("h{}", i + 1), p))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn escape_radius(&self) -> f64 {
        self.escape_radius
    }

    pub fn get(&self, i: usize) -> Result<&Generator> {
        self.generators.get(i).ok_or(Error::InvalidIndex {
            index: i,
            count: self.len(),
        })
    }

    /// Sub-semigroup generated by the listed generators.
    pub fn subset(&self, indices: &[usize]) -> Result<GeneratorSet> {
        let gens = indices
            .iter()
            .map(|&i| self.get(i).cloned())
            .collect::<Result<Vec<_>>>()?;
        GeneratorSet::new(gens)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `max_h max(1, ((2 + Σ_{i<d} |a_i|) / |a_d|)^{1/(d-1)})` over the base
/// polynomials. Beyond this radius every base map (hence every iterate) at
/// least doubles the modulus.
pub fn escape_radius(gens: &GeneratorSet) -> f64 {
    gens.escape_radius
}

fn escape_radius_of(gens: &[Generator]) -> f64 {
    gens.iter().map(|g| doubling_radius(&g.base)).fold(1.0, f64::max)
}

/// Smallest `R >= 1` with `R^(d-2) (|a_d| R - s) >= 2`, `s` the sum of the
/// lower coefficient moduli. Then `|p(z)| >= 2|z|` whenever `|z| >= R`.
fn doubling_radius(p: &Polynomial) -> f64 {
    let c = p.coeffs();
    let d = p.degree();
    let lead = c[d].norm();
    let s: f64 = c[..d].iter().map(|a| a.norm()).sum();
    let ok = |r: f64| r.powi(d as i32 - 2) * (lead * r - s) >= 2.0;
    if ok(1.0) {
        return 1.0;
    }
    let mut lo = 1.0;
    let mut hi = ((2.0 + s) / lead).max(1.0);
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Generator indices `(i_1, …, i_n)`; the map is `h_{i_n} ∘ … ∘ h_{i_1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Self(indices))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, gens: &GeneratorSet) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::EmptyWord);
        }
        for &i in &self.0 {
            gens.get(i)?;
        }
        Ok(())
    }

    /// All words of length `1..=max_len` over `m` letters, shortest first.
    pub fn enumerate(m: usize, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * m);
            for w in &layer {
                for i in 0..m {
                    let mut v = w.clone();
                    v.push(i);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned().map(Word));
            layer = next;
        }
        out
    }

    /// Whether the word is a proper power `u^k`, `k ≥ 2`.
    pub fn is_proper_power(&self) -> bool {
        let n = self.0.len();
        (1..n).any(|p| n % p == 0 && (p..n).all(|i| self.0[i] == self.0[i - p]))
    }
}

/// Outcome of evaluating a word map with an escape test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WordValue {
    Value(Complex64),
    /// Number of maps applied when the modulus first exceeded the radius.
    Escaped(usize),
}

/// Chained evaluation of `h_{i_n} ∘ … ∘ h_{i_1}` at `z`.
pub fn eval_word(gens: &GeneratorSet, w: &Word, z: Complex64, escape_radius: f64) -> Result<WordValue> {
    w.validate(gens)?;
    let mut v = z;
    for (step, &i) in w.0.iter().enumerate() {
        v = gens.generators[i].eval(v);
        if !(v.norm() <= escape_radius) {
            return Ok(WordValue::Escaped(step + 1));
        }
    }
    Ok(WordValue::Value(v))
}

/// Sampled planar postcritical set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PostcriticalSample {
    pub points: Vec<Complex64>,
    pub depth: usize,
    /// Word and critical value whose image left the escape disk.
    pub escaped_witness: Option<(Word, Complex64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PostcriticalVerdict {
    /// Bounded up to the sampled depth; not a proof.
    Bounded(PostcriticalSample),
    Escapes(PostcriticalSample),
}

impl PostcriticalVerdict {
    pub fn sample(&self) -> &PostcriticalSample {
        match self {
            Self::Bounded(s) | Self::Escapes(s) => s,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Self::Bounded(_))
    }
}

fn dedup_key(z: Complex64) -> (i64, i64) {
    ((z.re / ORBIT_DEDUP).round() as i64, (z.im / ORBIT_DEDUP).round() as i64)
}

pub fn postcritical_bounded_check(gens: &GeneratorSet, depth: usize) -> Result<PostcriticalVerdict> {
    postcritical_bounded_check_with_budget(gens, depth, ORBIT_BUDGET)
}

/// Breadth-first forward orbits of all finite critical values under all
/// words of length up to `depth`.
pub fn postcritical_bounded_check_with_budget(
    gens: &GeneratorSet,
    depth: usize,
    budget: usize,
) -> Result<PostcriticalVerdict> {
    if depth == 0 {
        return Err(Error::InvalidParameter("postcritical depth must be at least 1".into()));
    }
    let r = gens.escape_radius();
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut points = Vec::new();
    // (point, originating critical value, word so far)
    let mut frontier: Vec<(Complex64, Complex64, Vec<usize>)> = Vec::new();
    for g in &gens.generators {
        for cv in g.critical_values()? {
            if cv.norm() > r {
                points.push(cv);
                return Ok(PostcriticalVerdict::Escapes(PostcriticalSample {
                    points,
                    depth: 0,
                    escaped_witness: Some((Word(Vec::new()), cv)),
                }));
            }
            if seen.insert(dedup_key(cv)) {
                points.push(cv);
                frontier.push((cv, cv, Vec::new()));
            }
        }
    }
    let mut processed = 0usize;
    for level in 1..=depth {
        let mut next = Vec::new();
        for (z, cv, word) in &frontier {
            for (i, g) in gens.generators.iter().enumerate() {
                processed += 1;
                if processed > budget {
                    return Err(Error::Budget {
                        what: "postcritical orbit points",
                        count: processed,
                        budget,
                    });
                }
                let w = g.eval(*z);
                let mut wd = word.clone();
                wd.push(i);
                if !(w.norm() <= r) {
                    points.push(w);
                    return Ok(PostcriticalVerdict::Escapes(PostcriticalSample {
                        points,
                        depth: level,
                        escaped_witness: Some((Word(wd), *cv)),
                    }));
                }
                if seen.insert(dedup_key(w)) {
                    points.push(w);
                    next.push((w, *cv, wd));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(PostcriticalVerdict::Bounded(PostcriticalSample {
        points,
        depth,
        escaped_witness: None,
    }))
}

/// Raster approximation of the smallest filled-in Julia set.
///
/// Greatest-fixed-point iteration from the escape disk: a pixel survives when
/// the pixel containing the image of its centre under every generator is in
/// the previous raster.
pub fn smallest_filled_julia(gens: &GeneratorSet, grid: &GridSpec, iters: usize) -> Result<RasterSet> {
    let r = gens.escape_radius();
    if !grid.covers_disk(r) {
        return Err(Error::GridDoesNotCoverDisk { radius: r });
    }
    if iters == 0 {
        return Err(Error::InvalidParameter("iters must be at least 1".into()));
    }
    Ok(filled_in_window(gens, grid, iters))
}

/// Same iteration without the covering requirement: images leaving the
/// window count as escaping. Exact whenever the window contains the true
/// filled set, which is forward invariant.
pub fn filled_in_window(gens: &GeneratorSet, grid: &GridSpec, iters: usize) -> RasterSet {
    let r = gens.escape_radius();
    let targets: Vec<Vec<Option<usize>>> = gens
        .generators
        .iter()
        .map(|g| {
            (0..grid.len())
                .into_par_iter()
                .with_min_len(grid.width)
                .map(|i| {
                    let w = g.eval(grid.center_of_index(i));
                    if w.norm() <= r {
                        grid.pixel_of(w)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let k0 = RasterSet::from_fn(*grid, |z| z.norm() <= r);
    let mut current = k0.clone();
    for _ in 0..iters {
        let next = RasterSet {
            grid: *grid,
            bits: (0..grid.len())
                .map(|i| k0.bits[i] && targets.iter().all(|t| t[i].is_some_and(|j| current.bits[j])))
                .collect(),
        };
        if next == current {
            break;
        }
        current = next;
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mono(a: f64, d: usize) -> Polynomial {
        Polynomial::monomial(c(a, 0.0), d)
    }

    #[test]
    fn eval_word_examples() {
        let gens = GeneratorSet::from_polys(vec![mono(1.0, 2), mono(0.25, 2)]).unwrap();
        let v = eval_word(&gens, &Word(vec![0, 1]), c(2.0, 0.0), 100.0).unwrap();
        assert_eq!(v, WordValue::Value(c(4.0, 0.0)));
        let sq = GeneratorSet::from_polys(vec![mono(1.0, 2)]).unwrap();
        assert_eq!(
            eval_word(&sq, &Word(vec![0]), c(0.0, 0.0), 2.0).unwrap(),
            WordValue::Value(c(0.0, 0.0))
        );
        assert_eq!(
            eval_word(&sq, &Word(vec![0, 0, 0]), c(3.0, 0.0), 2.0).unwrap(),
            WordValue::Escaped(1)
        );
        assert!(matches!(
            eval_word(&sq, &Word(vec![1]), c(0.0, 0.0), 2.0),
            Err(Error::InvalidIndex { .. })
        ));
    }

    #[test]
    fn escape_radius_examples() {
        let r = |ps: Vec<Polynomial>| GeneratorSet::from_polys(ps).unwrap().escape_radius();
        assert_eq!(r(vec![mono(1.0, 2)]), 2.0);
        assert_eq!(r(vec![mono(1.0, 2), mono(0.25, 2)]), 8.0);
        assert!((r(vec![mono(1.0 / 64.0, 4)]) - 128f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn escape_radius_doubles() {
        let gens = GeneratorSet::from_polys(vec![
            Polynomial::from_real(&[0.3, -1.0, 0.5, 2.0]),
            Polynomial::shifted_square(c(0.9, 0.1), c(2.9, 0.0)),
        ])
        .unwrap();
        let r = gens.escape_radius();
        for k in 0..360 {
            let z = Complex64::from_polar(r, k as f64 * 0.0174533);
            for g in &gens.generators {
                assert!(g.eval(z).norm() >= 2.0 * r * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn iterate_composes_monomials_in_closed_form() {
        let g = Generator::iterate("g", mono(0.25, 2), 2);
        assert_eq!(g.power, 1);
        assert_eq!(g.base.degree(), 4);
        assert!((g.base.leading() - c(1.0 / 64.0, 0.0)).norm() < 1e-15);

        let f = Polynomial::shifted_square(c(0.95, 0.0), c(2.9, 0.0));
        let lazy = Generator::iterate("h3", f.clone(), 8);
        assert_eq!(lazy.power, 8);
        let small = Generator::iterate("h", f.clone(), 2);
        assert_eq!(small.power, 1);
        let z = c(0.3, 0.7);
        assert!((small.eval(z) - f.eval(f.eval(z))).norm() < 1e-12);
    }

    #[test]
    fn postcritical_examples() {
        let sq = GeneratorSet::from_polys(vec![mono(1.0, 2)]).unwrap();
        let v = postcritical_bounded_check(&sq, 8).unwrap();
        assert!(v.is_bounded());
        assert_eq!(v.sample().points, vec![c(0.0, 0.0)]);

        let g = GeneratorSet::from_polys(vec![Polynomial::from_real(&[3.0, 0.0, 1.0])]).unwrap();
        match postcritical_bounded_check(&g, 4).unwrap() {
            PostcriticalVerdict::Escapes(s) => {
                let (w, cv) = s.escaped_witness.unwrap();
                assert_eq!(cv, c(3.0, 0.0));
                assert_eq!(w, Word(vec![0]));
                assert_eq!(*s.points.last().unwrap(), c(12.0, 0.0));
            }
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn escape_witness_keeps_doubling() {
        let g = GeneratorSet::from_polys(vec![Polynomial::from_real(&[3.0, 0.0, 1.0])]).unwrap();
        let s = postcritical_bounded_check(&g, 4).unwrap();
        let mut z = *s.sample().points.last().unwrap();
        for _ in 0..4 {
            let w = g.generators[0].eval(z);
            assert!(w.norm() >= 2.0 * z.norm());
            z = w;
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = GeneratorSet::from_polys(vec![
            Polynomial::from_real(&[-0.1, 0.0, 1.0]),
            Polynomial::from_real(&[0.1, 0.0, 0.9]),
        ])
        .unwrap();
        assert!(matches!(
            postcritical_bounded_check_with_budget(&g, 30, 1000),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn words_enumerate_and_detect_powers() {
        assert_eq!(Word::enumerate(2, 3).len(), 14);
        assert!(Word(vec![0, 1, 0, 1]).is_proper_power());
        assert!(!Word(vec![0, 1, 1]).is_proper_power());
    }

    #[test]
    fn generator_set_json_schema() {
        let gens = GeneratorSet::from_polys(vec![mono(1.0, 2)]).unwrap();
        let s = serde_json::to_string(&gens).unwrap();
        assert_eq!(s, r#"{"generators":[{"name":"h1","coeffs":[[0.0,0.0],[0.0,0.0],[1.0,0.0]]}]}"#);
        assert_eq!(GeneratorSet::from_json(&s).unwrap(), gens);
        assert!(GeneratorSet::from_json(r#"{"generators":[{"name":"x","coeffs":[[1,0],[1,0]]}]}"#).is_err());
    }
}
