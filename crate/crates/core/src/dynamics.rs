//! Pixel-grid computations of Julia-type sets.
//!
//! Three independent routes to `J(G)`:
//! * [`julia_survivor`]: backward self-similarity, `A_{n+1} = ∪_h h^{-1}(A_n) ∩ A_0`;
//! * [`julia_chaos`]: random backward orbits of a point of `J(G)`;
//! * [`julia_word_union`]: union of the Julia sets of short words.
//!
//! Pullbacks are evaluated on whole pixels: each pixel is enclosed in a disk,
//! the disk is pushed through the map with a Taylor bound, and the pixel is a
//! member when the image disk reaches the target set. Thin sets therefore
//! survive strong expansion without fragmenting.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

use crate::distance::squared_distance_to;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, RasterSet};
use crate::poly::Polynomial;
use crate::semigroup::{filled_in_window, GeneratorSet, Word};

pub use crate::distance::hausdorff_px;

/// Extra reach, in target pixels, granted on top of the image-disk radius.
pub const PULLBACK_SLACK_PX: f64 = 0.0;
/// Steps discarded at the start of every chaos-game chain.
pub const CHAOS_BURN_IN: usize = 100;
/// Independent chaos-game chains; fixed so that output does not depend on
/// the thread count.
pub const CHAOS_CHAINS: usize = 8;
/// Default escape-time iteration cap per word map.
pub const DEFAULT_ESCAPE_ITERS: usize = 200;
/// Default cap on the number of words in [`julia_word_union`].
pub const WORD_BUDGET: usize = 10_000;

/// A polynomial map that can be evaluated pointwise and on disks.
pub trait PolyMap: Sync {
    fn eval(&self, z: Complex64) -> Complex64;

    /// Enclosure `(center, radius)` of the image of `B(c, rho)`, or `None`
    /// when the image certainly lies beyond `escape`.
    fn disk_image(&self, c: Complex64, rho: f64, escape: f64) -> Option<(Complex64, f64)>;
}

impl PolyMap for Polynomial {
    fn eval(&self, z: Complex64) -> Complex64 {
        Polynomial::eval(self, z)
    }

    fn disk_image(&self, c: Complex64, rho: f64, escape: f64) -> Option<(Complex64, f64)> {
        let (w, s) = Polynomial::disk_image(self, c, rho);
        (w.norm() - s <= escape).then_some((w, s))
    }
}

const NO_TARGET: u32 = u32::MAX;

/// Per-pixel image of one map: the target pixel and how far (in target
/// pixels) the image of the source pixel reaches from that target's centre.
pub struct Pullback {
    target: Vec<u32>,
    reach_sq: Vec<f32>,
}

impl Pullback {
    pub fn build<M: PolyMap>(map: &M, src: &GridSpec, dst: &GridSpec, escape: f64) -> Self {
        let rho = src.delta() * FRAC_1_SQRT_2;
        let dst_delta = dst.delta();
        let entries: Vec<(u32, f32)> = (0..src.len())
            .into_par_iter()
            .with_min_len(src.width)
            .map(|i| {
                let c = src.center_of_index(i);
                match map.disk_image(c, rho, escape) {
                    None => (NO_TARGET, 0.0),
                    Some((w, s)) => {
                        if !w.re.is_finite() || !w.im.is_finite() {
                            return (NO_TARGET, 0.0);
                        }
                        let (t, outside) = dst.clamp_pixel(w);
                        // the clamped pixel centre sits up to half a diagonal
                        // from the clamped point
                        let extra = if outside > 0.0 { FRAC_1_SQRT_2 } else { 0.0 };
                        let reach = s / dst_delta + PULLBACK_SLACK_PX - outside + extra;
                        if reach < 0.0 {
                            (NO_TARGET, 0.0)
                        } else {
                            (t as u32, (reach * reach) as f32)
                        }
                    }
                }
            })
            .collect();
        let (target, reach_sq) = entries.into_iter().unzip();
        Self { target, reach_sq }
    }

    /// Whether the image of source pixel `i` reaches the set whose squared
    /// distance field is `dist_sq`.
    pub fn hits(&self, i: usize, dist_sq: &[f64]) -> bool {
        let t = self.target[i];
        t != NO_TARGET && dist_sq[t as usize] as f32 <= self.reach_sq[i]
    }
}

fn pullbacks(gens: &GeneratorSet, grid: &GridSpec) -> Vec<Pullback> {
    gens.generators
        .iter()
        .map(|g| Pullback::build(g, grid, grid, gens.escape_radius()))
        .collect()
}

/// Escape disk (clipped to the window) minus the 1-px erosion of the
/// filled-set raster.
pub fn default_seed(gens: &GeneratorSet, grid: &GridSpec) -> RasterSet {
    let r = gens.escape_radius();
    let disk = RasterSet::from_fn(*grid, |z| z.norm() <= r);
    let khat = filled_in_window(gens, grid, DEFAULT_ESCAPE_ITERS);
    disk.difference(&khat.erode(1)).expect("same grid")
}

/// Backward self-similarity iteration
/// `A_{n+1} = {z ∈ A_0 : some generator maps the pixel of z onto A_n}`.
///
/// Stops early once the raster is stable.
pub fn julia_survivor(gens: &GeneratorSet, grid: &GridSpec, seed: &RasterSet, iters: usize) -> Result<RasterSet> {
    if seed.grid != *grid {
        return Err(Error::GridMismatch);
    }
    if seed.is_empty() {
        return Err(Error::EmptyRaster("survivor seed"));
    }
    if iters == 0 {
        return Ok(seed.clone());
    }
    let tables = pullbacks(gens, grid);
    let mut current = seed.clone();
    for _ in 0..iters {
        let dist = squared_distance_to(&current);
        let bits: Vec<bool> = (0..grid.len())
            .into_par_iter()
            .with_min_len(grid.width)
            .map(|i| seed.bits[i] && tables.iter().any(|t| t.hits(i, &dist)))
            .collect();
        let next = RasterSet { grid: *grid, bits };
        if next == current {
            break;
        }
        current = next;
    }
    Ok(current)
}

/// Survivor iteration from [`default_seed`].
pub fn julia_survivor_default(gens: &GeneratorSet, grid: &GridSpec, iters: usize) -> Result<RasterSet> {
    let seed = default_seed(gens, grid);
    julia_survivor(gens, grid, &seed, iters)
}

/// Random backward iteration: at each step one generator and one of its
/// preimages are chosen uniformly.
///
/// [`CHAOS_CHAINS`] chains, seeded from a splitmix64 stream of `seed`, split
/// the sample budget; each discards its first [`CHAOS_BURN_IN`] points.
pub fn julia_chaos(
    gens: &GeneratorSet,
    z0: Option<Complex64>,
    samples: usize,
    grid: &GridSpec,
    seed: u64,
) -> Result<RasterSet> {
    let start = match z0 {
        Some(z) => z,
        None => gens.generators[0].repelling_fixed_point()?,
    };
    let mut seeder = SplitMix64::seed_from_u64(seed);
    let chain_seeds: Vec<u64> = (0..CHAOS_CHAINS).map(|_| rand::RngCore::next_u64(&mut seeder)).collect();
    let m = gens.len();
    let per_chain = samples.div_ceil(CHAOS_CHAINS);
    let hits: Vec<Vec<usize>> = chain_seeds
        .par_iter()
        .enumerate()
        .map(|(k, &s)| -> Result<Vec<usize>> {
            let steps = per_chain.min(samples.saturating_sub(k * per_chain));
            let mut rng = SplitMix64::seed_from_u64(s);
            let mut z = start;
            let mut out = Vec::with_capacity(steps);
            for step in 0..CHAOS_BURN_IN + steps {
                let g = &gens.generators[rand::Rng::gen_range(&mut rng, 0..m)];
                z = g.random_preimage(z, &mut rng)?;
                if step >= CHAOS_BURN_IN {
                    if let Some(i) = grid.pixel_of(z) {
                        out.push(i);
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut r = RasterSet::empty(*grid);
    for i in hits.into_iter().flatten() {
        r.bits[i] = true;
    }
    Ok(r)
}

/// Filled Julia set of a word map by escape time.
///
/// Bounded when `iters` applications never leave the escape disk, or when
/// the orbit settles on a fixed point or 2-cycle of the word map.
pub fn word_filled(gens: &GeneratorSet, word: &Word, grid: &GridSpec, iters: usize) -> Result<RasterSet> {
    word.validate(gens)?;
    let r = gens.escape_radius();
    let maps: Vec<_> = word.0.iter().map(|&i| &gens.generators[i]).collect();
    Ok(RasterSet::from_fn(*grid, |z0| {
        let mut z = z0;
        let mut prev = [z0, z0];
        for n in 0..iters {
            for g in &maps {
                z = g.eval(z);
                if !(z.norm() <= r) {
                    return false;
                }
            }
            let settle = 1e-10 * z.norm().max(1.0);
            if (z - prev[1]).norm() < settle || (n > 0 && (z - prev[0]).norm() < settle) {
                return true;
            }
            prev = [prev[1], z];
        }
        true
    }))
}

/// Union of the boundaries of `K(w)` over all words of length `1..=max_len`.
pub fn julia_word_union(gens: &GeneratorSet, max_word_len: usize, grid: &GridSpec, iters: usize) -> Result<RasterSet> {
    julia_word_union_with_budget(gens, max_word_len, grid, iters, WORD_BUDGET)
}

pub fn julia_word_union_with_budget(
    gens: &GeneratorSet,
    max_word_len: usize,
    grid: &GridSpec,
    iters: usize,
    budget: usize,
) -> Result<RasterSet> {
    if max_word_len == 0 {
        return Err(Error::InvalidParameter("max_word_len must be at least 1".into()));
    }
    let m = gens.len();
    let count: usize = (1..=max_word_len)
        .map(|l| m.checked_pow(l as u32).unwrap_or(usize::MAX))
        .fold(0usize, |a, b| a.saturating_add(b));
    if count > budget {
        return Err(Error::Budget {
            what: "words",
            count,
            budget,
        });
    }
    let mut out = RasterSet::empty(*grid);
    for w in Word::enumerate(m, max_word_len) {
        // J(u^k) = J(u)
        if w.is_proper_power() {
            continue;
        }
        let b = word_filled(gens, &w, grid, iters)?.boundary();
        for i in b.members() {
            out.bits[i] = true;
        }
    }
    Ok(out)
}

/// `K_x^{(N)}`: pixels whose partial compositions along the prefix all stay
/// in the escape disk.
pub fn fiberwise_filled(gens: &GeneratorSet, prefix: &[usize], grid: &GridSpec) -> Result<RasterSet> {
    if prefix.is_empty() {
        return Err(Error::EmptyWord);
    }
    Word(prefix.to_vec()).validate(gens)?;
    let r = gens.escape_radius();
    Ok(RasterSet::from_fn(*grid, |z0| {
        let mut z = z0;
        if z.norm() > r {
            return false;
        }
        for &i in prefix {
            z = gens.generators[i].eval(z);
            if !(z.norm() <= r) {
                return false;
            }
        }
        true
    }))
}

/// Pixels of `out_grid` whose image under `p` reaches `target`.
pub fn preimage_raster<M: PolyMap>(p: &M, target: &RasterSet, out_grid: &GridSpec) -> RasterSet {
    let table = Pullback::build(p, out_grid, &target.grid, target.grid.max_modulus());
    let dist = squared_distance_to(target);
    RasterSet {
        grid: *out_grid,
        bits: (0..out_grid.len()).map(|i| table.hits(i, &dist)).collect(),
    }
}

/// `∪_h h^{-1}(set)` on the set's own grid.
pub fn union_of_preimages(gens: &GeneratorSet, set: &RasterSet) -> RasterSet {
    let dist = squared_distance_to(set);
    let tables: Vec<Pullback> = gens
        .generators
        .iter()
        .map(|g| Pullback::build(g, &set.grid, &set.grid, set.grid.max_modulus()))
        .collect();
    RasterSet {
        grid: set.grid,
        bits: (0..set.grid.len())
            .map(|i| tables.iter().any(|t| t.hits(i, &dist)))
            .collect(),
    }
}

/// Pixels within half a pixel diagonal of the circle `C(center, radius)`.
pub fn circle_raster(grid: &GridSpec, center: Complex64, radius: f64) -> RasterSet {
    let tol = grid.delta() * FRAC_1_SQRT_2;
    RasterSet::from_fn(*grid, |z| ((z - center).norm() - radius).abs() <= tol)
}
