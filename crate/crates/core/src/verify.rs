//! Pass/fail checks on Julia rasters and the suite runner that strings them
//! together from a JSON description.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constructions::ConstructionSpec;
use crate::distance::{hausdorff_px, squared_distance_to};
use crate::dynamics::{
    fiberwise_filled, julia_chaos, julia_survivor_default, julia_word_union, preimage_raster, union_of_preimages,
    DEFAULT_ESCAPE_ITERS,
};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, RasterSet};
use crate::semigroup::{filled_in_window, postcritical_bounded_check, GeneratorSet, PostcriticalVerdict, DEFAULT_DEPTH};
use crate::topology::{
    classify_fatou_components, containment_report, find_jmin_jmax, is_jordan_curve, label_components,
    min_distance_px, order_components, surrounding_compare, FatouClass, OrderResult, Relation,
};

pub const DEFAULT_CONTAINMENT_PX: f64 = 2.0;
pub const DEFAULT_HAUSDORFF_PX: f64 = 3.0;
pub const DEFAULT_MIN_DIST_PX: f64 = 2.0;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SURVIVOR_ITERS: usize = 200;
pub const DEFAULT_CHAOS_SAMPLES: usize = 1_000_000;
pub const DEFAULT_WORD_LEN: usize = 6;
pub const DEFAULT_FIBER_DEPTH: usize = 4;
pub const DEFAULT_WIDTH: usize = 1024;
/// Survivor iterations for single-generator Julia rasters.
pub const GENERATOR_ITERS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pixel: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    pub metric: Option<f64>,
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl CheckResult {
    fn new(name: impl Into<String>, pass: bool, metric: Option<f64>, threshold: Option<f64>) -> Self {
        Self {
            name: name.into(),
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            metric,
            threshold,
            elapsed_s: None,
            witness: None,
        }
    }

    fn skip(name: impl Into<String>, why: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::Skip,
            metric: None,
            threshold: None,
            elapsed_s: None,
            witness: Some(Witness {
                note: Some(why.into()),
                ..Witness::default()
            }),
        }
    }

    fn error(name: impl Into<String>, e: &Error) -> Self {
        let mut c = Self::new(name, false, None, None);
        c.witness = Some(Witness {
            note: Some(e.to_string()),
            ..Witness::default()
        });
        c
    }

    fn at_most(name: impl Into<String>, metric: f64, threshold: f64) -> Self {
        Self::new(name, metric <= threshold, Some(metric), Some(threshold))
    }

    fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    fn with_point(self, z: Complex64) -> Self {
        self.with_witness(Witness {
            point: Some(z),
            ..Witness::default()
        })
    }

    fn with_note(self, note: impl Into<String>) -> Self {
        self.with_witness(Witness {
            note: Some(note.into()),
            ..Witness::default()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub overall: Verdict,
    pub defaults: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<serde_json::Value>,
}

fn default_table() -> BTreeMap<String, serde_json::Value> {
    let mut m = BTreeMap::new();
    m.insert("depth".into(), DEFAULT_DEPTH.into());
    m.insert("iters".into(), DEFAULT_ESCAPE_ITERS.into());
    m.insert("survivor_iters".into(), DEFAULT_SURVIVOR_ITERS.into());
    m.insert("tolerance_px".into(), DEFAULT_CONTAINMENT_PX.into());
    m.insert("hausdorff_px".into(), DEFAULT_HAUSDORFF_PX.into());
    m.insert("min_dist_px".into(), DEFAULT_MIN_DIST_PX.into());
    m.insert("seed".into(), DEFAULT_SEED.into());
    m.insert("chaos_samples".into(), DEFAULT_CHAOS_SAMPLES.into());
    m.insert("word_len".into(), DEFAULT_WORD_LEN.into());
    m
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            checks: Vec::new(),
            overall: Verdict::Pass,
            defaults: default_table(),
            parameters: None,
        }
    }

    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
        self.update();
    }

    /// Appends the checks of `other`, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.checks.push(c);
        }
        self.update();
    }

    fn update(&mut self) {
        self.overall = if self.checks.iter().all(|c| c.verdict != Verdict::Fail) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
    }

    pub fn passed(&self) -> bool {
        self.overall == Verdict::Pass
    }

    pub fn strip_timings(&mut self) {
        for c in &mut self.checks {
            c.elapsed_s = None;
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Largest distance from a pixel of `from` to `to`, with that pixel.
fn farthest(from: &RasterSet, to: &RasterSet) -> (f64, Option<usize>) {
    let d = squared_distance_to(to);
    let mut best = (0.0, None);
    for i in from.members() {
        if d[i] > best.0 {
            best = (d[i], Some(i));
        }
    }
    (best.0.sqrt(), best.1)
}

fn pixel_witness(grid: &GridSpec, i: Option<usize>) -> Witness {
    match i {
        Some(i) => Witness {
            point: Some(grid.center_of_index(i)),
            pixel: Some((i % grid.width, i / grid.width)),
            note: None,
        },
        None => Witness::default(),
    }
}

/// Backward invariance `h^{-1}(J) ⊂ J` per generator, and backward
/// self-similarity `J = ∪ h^{-1}(J)`, both up to `tol_px`.
pub fn check_invariance(gens: &GeneratorSet, julia: &RasterSet, tol_px: f64) -> Report {
    let mut rep = Report::new("invariance");
    if julia.is_empty() {
        rep.push(CheckResult::new("julia raster nonempty", false, None, None));
        return rep;
    }
    for g in &gens.generators {
        let t = Instant::now();
        let pre = preimage_raster(g, julia, &julia.grid);
        let (d, at) = farthest(&pre, julia);
        let mut c = CheckResult::at_most(format!("{}^-1(J) within J", g.name), d, tol_px)
            .with_witness(pixel_witness(&julia.grid, at));
        c.elapsed_s = Some(t.elapsed().as_secs_f64());
        rep.push(c);
    }
    let t = Instant::now();
    let union = union_of_preimages(gens, julia);
    let mut c = match hausdorff_px(julia, &union) {
        Ok(d) => CheckResult::at_most("backward self-similarity", d, tol_px),
        Err(e) => CheckResult::error("backward self-similarity", &e),
    };
    c.elapsed_s = Some(t.elapsed().as_secs_f64());
    rep.push(c);
    rep
}

/// Julia rasters of the individual generators on `grid`.
pub fn generator_julia_rasters(gens: &GeneratorSet, grid: &GridSpec) -> Result<Vec<RasterSet>> {
    (0..gens.len())
        .map(|k| julia_survivor_default(&gens.subset(&[k])?, grid, GENERATOR_ITERS))
        .collect()
}

/// Order totality, Fatou classes, `J_min ⊃ ∂K̂`, optional component count,
/// and the `J_min ⊃ M′`, `J_max ⊃ M″` containment.
pub fn check_structure(
    gens: &GeneratorSet,
    julia: &RasterSet,
    khat: &RasterSet,
    expected_components: Option<usize>,
    tol_px: f64,
) -> Report {
    let mut rep = Report::new("structure");
    if julia.grid != khat.grid {
        rep.push(CheckResult::error("shared grid", &Error::GridMismatch));
        return rep;
    }
    let l = label_components(julia);
    match khat.centroid() {
        Some(anchor) => match order_components(&l, anchor) {
            Ok(OrderResult::TotalOrder(ids)) => {
                rep.push(CheckResult::new("components totally ordered", true, Some(ids.len() as f64), None))
            }
            Ok(OrderResult::NotTotal { first, second, verdict }) => rep.push(
                CheckResult::new("components totally ordered", false, None, None).with_witness(Witness {
                    note: Some(format!("components {first} and {second}: {:?}", verdict.relation)),
                    ..pixel_witness(&julia.grid, verdict.witness)
                }),
            ),
            Err(e) => rep.push(CheckResult::error("components totally ordered", &e)),
        },
        None => rep.push(CheckResult::error("components totally ordered", &Error::EmptyRaster("K-hat raster"))),
    }

    let fatou = classify_fatou_components(julia);
    let bad: Vec<_> = fatou
        .iter()
        .filter(|f| matches!(f.class, FatouClass::Other { .. }))
        .collect();
    let mut c = CheckResult::at_most("Fatou components simply or doubly connected", bad.len() as f64, 0.0);
    if let Some(f) = bad.first() {
        c = c.with_note(format!("Fatou component {} is {:?} ({} px)", f.id, f.class, f.pixels));
    }
    rep.push(c);

    if let Some(n) = expected_components {
        rep.push(CheckResult::new(
            "component count",
            l.count as usize == n,
            Some(l.count as f64),
            Some(n as f64),
        ));
    }

    let extremes = find_jmin_jmax(&l, khat);
    match &extremes {
        Ok((jmin, _)) => {
            let (d, at) = farthest(&khat.boundary(), &l.component(*jmin));
            rep.push(
                CheckResult::at_most("J_min contains boundary of K-hat", d, tol_px)
                    .with_witness(pixel_witness(&julia.grid, at)),
            );
        }
        Err(e) => rep.push(CheckResult::error("J_min contains boundary of K-hat", e)),
    }

    let contain = extremes.and_then(|(jmin, jmax)| {
        let gj = generator_julia_rasters(gens, &julia.grid)?;
        containment_report(&l, &gj, jmin, jmax)
    });
    match contain {
        Ok(r) => {
            let ok = r.jmin_contains_m_prime && r.jmax_contains_m_double_prime;
            rep.push(CheckResult::new("J_min contains M', J_max contains M''", ok, None, None).with_note(format!(
                "M' = {:?}, M'' = {:?}, J_min contains M': {}, J_max contains M'': {}",
                r.m_prime, r.m_double_prime, r.jmin_contains_m_prime, r.jmax_contains_m_double_prime
            )));
        }
        Err(e) => rep.push(CheckResult::error("J_min contains M', J_max contains M''", &e)),
    }
    rep
}

/// Distance in pixels from the sampled postcritical set to the Julia raster
/// must be at least `min_dist_px`.
pub fn check_hyperbolic(gens: &GeneratorSet, julia: &RasterSet, depth: usize, min_dist_px: f64) -> Report {
    let mut rep = Report::new("hyperbolic");
    let name = "postcritical set away from J";
    let t = Instant::now();
    let verdict = match postcritical_bounded_check(gens, depth) {
        Ok(v) => v,
        Err(e) => {
            rep.push(CheckResult::error(name, &e));
            return rep;
        }
    };
    if let PostcriticalVerdict::Escapes(s) = &verdict {
        let note = match &s.escaped_witness {
            Some((w, z)) => format!("postcritical orbit escapes: word {:?} from {z}", w.0),
            None => "postcritical orbit escapes".to_string(),
        };
        rep.push(CheckResult::skip(name, note));
        return rep;
    }
    let mut c = match min_distance_px(&verdict.sample().points, julia) {
        Some((d, z)) => {
            CheckResult::new(name, d >= min_dist_px, Some(d), Some(min_dist_px)).with_point(z)
        }
        None => CheckResult::error(name, &Error::EmptyRaster("postcritical sample")),
    };
    c.elapsed_s = Some(t.elapsed().as_secs_f64());
    rep.push(c);
    rep
}

/// Structural part of the fiberwise picture for a nested pair: the
/// boundaries of `K_x^{(N)}` over all `2^N` prefixes are pairwise disjoint
/// Jordan curves, totally ordered by surrounding.
pub fn check_fiberwise_cantor(gens: &GeneratorSet, grid: &GridSpec, prefix_depth: usize) -> Report {
    let mut rep = Report::new("fiberwise");
    if gens.len() != 2 {
        rep.push(CheckResult::skip("precondition", "needs exactly two generators"));
        return rep;
    }
    if prefix_depth == 0 || prefix_depth > 12 {
        rep.push(CheckResult::error(
            "precondition",
            &Error::InvalidParameter("prefix depth must be in 1..=12".into()),
        ));
        return rep;
    }
    let gj = match generator_julia_rasters(gens, grid) {
        Ok(g) => g,
        Err(e) => {
            rep.push(CheckResult::error("precondition", &e));
            return rep;
        }
    };
    match surrounding_compare(&gj[0], &gj[1]) {
        Ok(v) if matches!(v.relation, Relation::Less | Relation::Greater) => {}
        Ok(v) => {
            rep.push(CheckResult::skip(
                "precondition",
                format!("generator Julia rasters are not disjoint and nested ({:?})", v.relation),
            ));
            return rep;
        }
        Err(e) => {
            rep.push(CheckResult::error("precondition", &e));
            return rep;
        }
    }

    let t = Instant::now();
    let n = 1usize << prefix_depth;
    let mut curves = Vec::with_capacity(n);
    for bits in 0..n {
        let prefix: Vec<usize> = (0..prefix_depth).map(|k| (bits >> k) & 1).collect();
        match fiberwise_filled(gens, &prefix, grid) {
            Ok(k) => curves.push((prefix, k.boundary())),
            Err(e) => {
                rep.push(CheckResult::error("fiber boundaries", &e));
                return rep;
            }
        }
    }
    let not_jordan: Vec<&Vec<usize>> = curves
        .iter()
        .filter(|(_, c)| c.is_empty() || !is_jordan_curve(c))
        .map(|(p, _)| p)
        .collect();
    let mut c = CheckResult::at_most("every boundary is a Jordan curve", not_jordan.len() as f64, 0.0);
    if let Some(p) = not_jordan.first() {
        c = c.with_note(format!("prefix {p:?}"));
    }
    rep.push(c);

    let mut touching = None;
    let mut unordered = None;
    let (mut n_touch, mut n_unordered) = (0usize, 0usize);
    for i in 0..n {
        for j in i + 1..n {
            match surrounding_compare(&curves[i].1, &curves[j].1) {
                Ok(v) => match v.relation {
                    Relation::Intersects => {
                        n_touch += 1;
                        touching.get_or_insert((i, j, v.witness));
                    }
                    Relation::Outside => {
                        n_unordered += 1;
                        unordered.get_or_insert((i, j, v.witness));
                    }
                    _ => {}
                },
                Err(_) => n_unordered += 1,
            }
        }
    }
    let note = |w: Option<(usize, usize, Option<usize>)>| -> Witness {
        match w {
            Some((i, j, px)) => Witness {
                note: Some(format!("prefixes {:?} and {:?}", curves[i].0, curves[j].0)),
                ..pixel_witness(grid, px)
            },
            None => Witness::default(),
        }
    };
    rep.push(
        CheckResult::at_most("boundaries pairwise disjoint after 1-px dilation", n_touch as f64, 0.0)
            .with_witness(note(touching)),
    );
    let mut c = CheckResult::at_most("boundaries totally ordered", n_unordered as f64, 0.0).with_witness(note(unordered));
    c.elapsed_s = Some(t.elapsed().as_secs_f64());
    rep.push(c);
    rep
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub survivor_iters: usize,
    pub chaos_samples: usize,
    pub seed: u64,
    pub word_len: usize,
    pub escape_iters: usize,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            survivor_iters: DEFAULT_SURVIVOR_ITERS,
            chaos_samples: DEFAULT_CHAOS_SAMPLES,
            seed: DEFAULT_SEED,
            word_len: DEFAULT_WORD_LEN,
            escape_iters: DEFAULT_ESCAPE_ITERS,
        }
    }
}

/// Pairwise Hausdorff distances between the survivor, chaos-game and
/// word-union rasters.
pub fn check_triangulation(gens: &GeneratorSet, grid: &GridSpec, algos: &AlgorithmConfig, tol_px: f64) -> Report {
    let mut rep = Report::new("triangulation");
    let t = Instant::now();
    let rasters = (|| -> Result<[RasterSet; 3]> {
        Ok([
            julia_survivor_default(gens, grid, algos.survivor_iters)?,
            julia_chaos(gens, None, algos.chaos_samples, grid, algos.seed)?,
            julia_word_union(gens, algos.word_len, grid, algos.escape_iters)?,
        ])
    })();
    let rasters = match rasters {
        Ok(r) => r,
        Err(e) => {
            rep.push(CheckResult::error("render", &e));
            return rep;
        }
    };
    let names = ["survivor", "chaos", "word-union"];
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let name = format!("{} vs {}", names[a], names[b]);
        rep.push(match hausdorff_px(&rasters[a], &rasters[b]) {
            Ok(d) => CheckResult::at_most(name, d, tol_px),
            Err(e) => CheckResult::error(name, &e),
        });
    }
    if let Some(c) = rep.checks.last_mut() {
        c.elapsed_s = Some(t.elapsed().as_secs_f64());
    }
    rep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Invariance,
    Structure,
    Hyperbolic,
    FiberwiseCantor,
    Triangulation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub containment_px: f64,
    pub hausdorff_px: f64,
    pub min_dist_px: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            containment_px: DEFAULT_CONTAINMENT_PX,
            hausdorff_px: DEFAULT_HAUSDORFF_PX,
            min_dist_px: DEFAULT_MIN_DIST_PX,
        }
    }
}

/// A check name, or an object naming the check with per-check overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckEntry {
    Plain(CheckKind),
    Detailed {
        check: CheckKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        survivor_iters: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expected_components: Option<usize>,
    },
}

impl CheckEntry {
    pub fn kind(&self) -> CheckKind {
        match self {
            CheckEntry::Plain(k) | CheckEntry::Detailed { check: k, .. } => *k,
        }
    }

    fn survivor_iters(&self) -> Option<usize> {
        match self {
            CheckEntry::Plain(_) => None,
            CheckEntry::Detailed { survivor_iters, .. } => *survivor_iters,
        }
    }

    fn expected_components(&self) -> Option<usize> {
        match self {
            CheckEntry::Plain(_) => None,
            CheckEntry::Detailed { expected_components, .. } => *expected_components,
        }
    }
}

fn default_depth() -> usize {
    DEFAULT_DEPTH
}

fn default_fiber_depth() -> usize {
    DEFAULT_FIBER_DEPTH
}

/// A suite description. The generators come from `construction` or from a
/// GeneratorSet JSON file (`gens`); the Julia raster is rendered with the
/// survivor algorithm unless a PGM is supplied (`julia`). Relative paths
/// resolve against the directory of the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub julia: Option<PathBuf>,
    /// `xmin:ymin:xmax:ymax:width`; defaults to the construction window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default)]
    pub algorithms: AlgorithmConfig,
    pub checks: Vec<CheckEntry>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_components: Option<usize>,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_fiber_depth")]
    pub fiberwise_depth: usize,
    /// Keep wall-clock timings in the report (makes it non-reproducible).
    #[serde(default)]
    pub timings: bool,
    /// Directory for the rendered PGM rasters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artifacts: Option<PathBuf>,
}

impl SuiteConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| {
            Error::Parse(format!("suite config, line {} column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)?;
        let cfg = Self::from_json(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Runs the checks of `cfg` in order. `base` resolves relative paths.
pub fn run_suite(cfg: &SuiteConfig, base: &Path) -> Result<Report> {
    let mut effective = cfg.clone();
    let (gens, window) = match (&cfg.construction, &cfg.gens) {
        (Some(spec), None) => {
            let built = spec.build()?;
            effective.construction = Some(built.spec.clone());
            (built.gens, Some(built.window))
        }
        (None, Some(path)) => (GeneratorSet::from_json(&std::fs::read_to_string(resolve(base, path))?)?, None),
        _ => {
            return Err(Error::Parse(
                "suite config: exactly one of \"construction\" and \"gens\" is required".into(),
            ))
        }
    };
    let julia = match &cfg.julia {
        Some(path) => Some(RasterSet::load_pgm(&resolve(base, path))?),
        None => None,
    };
    let grid = match (&cfg.grid, &julia, window) {
        (Some(s), _, _) => GridSpec::parse(s)?,
        (None, Some(j), _) => j.grid,
        (None, None, Some(w)) => w.grid(DEFAULT_WIDTH)?,
        (None, None, None) => {
            return Err(Error::Parse("suite config: \"grid\" is required with \"gens\"".into()))
        }
    };
    let julia = match julia {
        Some(j) if j.grid == grid => j,
        Some(_) => return Err(Error::GridMismatch),
        None => julia_survivor_default(&gens, &grid, cfg.algorithms.survivor_iters)?,
    };
    let mut coarse: BTreeMap<usize, RasterSet> = BTreeMap::new();
    for entry in &cfg.checks {
        if let Some(n) = entry.survivor_iters() {
            if let std::collections::btree_map::Entry::Vacant(v) = coarse.entry(n) {
                v.insert(julia_survivor_default(&gens, &grid, n)?);
            }
        }
    }
    let th = &cfg.thresholds;
    let mut report = Report::new(cfg.suite.clone());
    let needs_khat = cfg.checks.iter().any(|c| c.kind() == CheckKind::Structure);
    let khat = needs_khat.then(|| filled_in_window(&gens, &grid, cfg.algorithms.escape_iters));
    if let Some(dir) = &cfg.artifacts {
        let dir = resolve(base, dir);
        std::fs::create_dir_all(&dir)?;
        julia.save_pgm(&dir.join("julia.pgm"))?;
        for (n, r) in &coarse {
            r.save_pgm(&dir.join(format!("julia_iters{n}.pgm")))?;
        }
        if let Some(k) = &khat {
            k.save_pgm(&dir.join("khat.pgm"))?;
        }
    }
    for entry in &cfg.checks {
        let j = match entry.survivor_iters() {
            Some(n) => &coarse[&n],
            None => &julia,
        };
        let expected = entry.expected_components().or(cfg.expected_components);
        let sub = match entry.kind() {
            CheckKind::Invariance => check_invariance(&gens, j, th.containment_px),
            CheckKind::Structure => {
                check_structure(&gens, j, khat.as_ref().expect("computed"), expected, th.containment_px)
            }
            CheckKind::Hyperbolic => check_hyperbolic(&gens, j, cfg.depth, th.min_dist_px),
            CheckKind::FiberwiseCantor => check_fiberwise_cantor(&gens, &grid, cfg.fiberwise_depth),
            CheckKind::Triangulation => check_triangulation(&gens, &grid, &cfg.algorithms, th.hausdorff_px),
        };
        let prefix = match entry.survivor_iters() {
            Some(n) => format!("{}@iters{n}", sub.suite),
            None => sub.suite.clone(),
        };
        report.absorb(&prefix, sub);
    }
    if !cfg.timings {
        report.strip_timings();
    }
    report.parameters = Some(serde_json::to_value(&effective)?);
    Ok(report)
}
