//! Discrete topology of Julia rasters: components, polynomial hulls, the
//! surrounding order, Fatou-component connectivity, `J_min`/`J_max`, the
//! induced maps `g*` and containment of generator Julia sets.
//!
//! Set pixels are 8-connected and background pixels 4-connected, so that
//! curves separate the plane the way Jordan curves do.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distance::squared_distance_to;
use crate::dynamics::{preimage_raster, PolyMap};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, RasterSet};
use crate::semigroup::GeneratorSet;

/// Dilation used whenever rasters from different sources are compared.
pub const CONTAINMENT_DILATION_PX: usize = 2;

const N4: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
const N8: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

/// Flood-fill labeling of `mask` (ids from 1 in first-scanned order).
fn flood_label(mask: &[bool], w: usize, h: usize, eight: bool) -> (Vec<u32>, u32) {
    let nbrs: &[(isize, isize)] = if eight { &N8 } else { &N4 };
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for &(dx, dy) in nbrs {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if mask[j] && labels[j] == 0 {
                    labels[j] = next;
                    stack.push(j);
                }
            }
        }
    }
    (labels, next)
}

/// Labels of the 4-connected components of the complement of `set`, with
/// everything beyond the window treated as one extra background region
/// joined to every border pixel. Returns the labels on the window and the
/// label of the outer region (0 if no background pixel touches it, which
/// only happens when the set covers the whole border).
fn background_labels(set: &RasterSet) -> (Vec<u32>, u32, u32) {
    let (w, h) = (set.grid.width, set.grid.height);
    let (pw, ph) = (w + 2, h + 2);
    let mut mask = vec![true; pw * ph];
    for row in 0..h {
        for col in 0..w {
            mask[(row + 1) * pw + col + 1] = !set.bits[row * w + col];
        }
    }
    let (padded, count) = flood_label(&mask, pw, ph, false);
    let outer = padded[0];
    let mut labels = vec![0u32; w * h];
    for row in 0..h {
        for col in 0..w {
            labels[row * w + col] = padded[(row + 1) * pw + col + 1];
        }
    }
    (labels, count, outer)
}

/// Bounding box in pixel coordinates, inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub col_min: usize,
    pub row_min: usize,
    pub col_max: usize,
    pub row_max: usize,
}

/// 8-connected components of a raster.
#[derive(Clone, Debug)]
pub struct ComponentLabels {
    pub grid: GridSpec,
    /// Per pixel; 0 is background, components are `1..=count`.
    pub labels: Vec<u32>,
    pub count: u32,
    pub pixels: Vec<usize>,
    pub bboxes: Vec<BBox>,
}

impl ComponentLabels {
    pub fn ids(&self) -> impl Iterator<Item = u32> {
        1..=self.count
    }

    pub fn component(&self, id: u32) -> RasterSet {
        RasterSet {
            grid: self.grid,
            bits: self.labels.iter().map(|&l| l == id).collect(),
        }
    }

    pub fn pixel_count(&self, id: u32) -> usize {
        self.pixels[id as usize - 1]
    }

    pub fn bbox(&self, id: u32) -> BBox {
        self.bboxes[id as usize - 1]
    }

    /// Labels (with multiplicity) found under the members of `r`.
    fn overlap_counts(&self, r: &RasterSet) -> Vec<usize> {
        let mut counts = vec![0usize; self.count as usize + 1];
        for i in r.members() {
            counts[self.labels[i] as usize] += 1;
        }
        counts
    }

    /// Component with the largest overlap with `r`, if any.
    fn best_overlap(&self, r: &RasterSet) -> Option<u32> {
        let counts = self.overlap_counts(r);
        (1..=self.count)
            .filter(|&id| counts[id as usize] > 0)
            .max_by_key(|&id| (counts[id as usize], std::cmp::Reverse(id)))
    }
}

pub fn label_components(r: &RasterSet) -> ComponentLabels {
    let (w, h) = (r.grid.width, r.grid.height);
    let (labels, count) = flood_label(&r.bits, w, h, true);
    let mut pixels = vec![0usize; count as usize];
    let mut bboxes = vec![
        BBox {
            col_min: usize::MAX,
            row_min: usize::MAX,
            col_max: 0,
            row_max: 0,
        };
        count as usize
    ];
    for (i, &l) in labels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let k = l as usize - 1;
        let (col, row) = (i % w, i / w);
        pixels[k] += 1;
        let b = &mut bboxes[k];
        b.col_min = b.col_min.min(col);
        b.row_min = b.row_min.min(row);
        b.col_max = b.col_max.max(col);
        b.row_max = b.row_max.max(row);
    }
    ComponentLabels {
        grid: r.grid,
        labels,
        count,
        pixels,
        bboxes,
    }
}

/// Polynomial hull of a raster.
#[derive(Clone, Debug)]
pub struct Hull {
    pub raster: RasterSet,
    /// The set touches the window border, so part of the hull may be cut off.
    pub truncated: bool,
}

/// The set together with every complement pixel not 4-reachable from beyond
/// the window.
pub fn polynomial_hull_raster(c: &RasterSet) -> Result<Hull> {
    if c.is_empty() {
        return Err(Error::EmptyRaster("polynomial hull input"));
    }
    let (labels, _, outer) = background_labels(c);
    Ok(Hull {
        raster: RasterSet {
            grid: c.grid,
            bits: labels.iter().map(|&l| outer == 0 || l != outer).collect(),
        },
        truncated: c.touches_border(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Less,
    Greater,
    Outside,
    Intersects,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub witness: Option<usize>,
}

fn compare_with_hulls(c1: &RasterSet, h1: &RasterSet, c2: &RasterSet, h2: &RasterSet) -> OrderVerdict {
    let d2 = c2.dilate(1);
    if let Some(i) = c1.dilate(1).members().find(|&i| d2.bits[i]) {
        return OrderVerdict {
            relation: Relation::Intersects,
            witness: Some(i),
        };
    }
    let inside = |a: &RasterSet, hb: &RasterSet| a.members().all(|i| hb.bits[i]);
    if inside(c1, h2) {
        return OrderVerdict {
            relation: Relation::Less,
            witness: c1.members().next(),
        };
    }
    if inside(c2, h1) {
        return OrderVerdict {
            relation: Relation::Greater,
            witness: c2.members().next(),
        };
    }
    OrderVerdict {
        relation: Relation::Outside,
        witness: c1.members().find(|&i| !h2.bits[i]),
    }
}

/// Surrounding-order comparison of two disjoint compact pieces.
pub fn surrounding_compare(c1: &RasterSet, c2: &RasterSet) -> Result<OrderVerdict> {
    if c1.grid != c2.grid {
        return Err(Error::GridMismatch);
    }
    let h1 = polynomial_hull_raster(c1)?.raster;
    let h2 = polynomial_hull_raster(c2)?.raster;
    Ok(compare_with_hulls(c1, &h1, c2, &h2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderResult {
    /// Component ids, innermost first.
    TotalOrder(Vec<u32>),
    NotTotal { first: u32, second: u32, verdict: OrderVerdict },
}

impl OrderResult {
    pub fn is_total(&self) -> bool {
        matches!(self, OrderResult::TotalOrder(_))
    }
}

/// Sorts components by distance from `anchor` and checks that each is
/// surrounded by the next.
pub fn order_components(l: &ComponentLabels, anchor: Complex64) -> Result<OrderResult> {
    let a = l.grid.pixel_of(anchor).ok_or(Error::InvalidParameter("anchor outside the window".into()))?;
    let comps: Vec<RasterSet> = l.ids().map(|id| l.component(id)).collect();
    let hulls: Vec<RasterSet> = comps
        .iter()
        .map(|c| polynomial_hull_raster(c).map(|h| h.raster))
        .collect::<Result<_>>()?;
    for (k, h) in hulls.iter().enumerate() {
        if !h.bits[a] {
            return Err(Error::AnchorOutsideHull(k as u32 + 1));
        }
    }
    let (aw, ah) = ((a % l.grid.width) as f64, (a / l.grid.width) as f64);
    let w = l.grid.width;
    let mut dist = vec![f64::INFINITY; l.count as usize];
    for (i, &lab) in l.labels.iter().enumerate() {
        if lab != 0 {
            let d = ((i % w) as f64 - aw).powi(2) + ((i / w) as f64 - ah).powi(2);
            let k = lab as usize - 1;
            dist[k] = dist[k].min(d);
        }
    }
    let mut ids: Vec<u32> = l.ids().collect();
    ids.sort_by(|&x, &y| dist[x as usize - 1].total_cmp(&dist[y as usize - 1]).then(x.cmp(&y)));
    for pair in ids.windows(2) {
        let (x, y) = (pair[0] as usize - 1, pair[1] as usize - 1);
        let v = compare_with_hulls(&comps[x], &hulls[x], &comps[y], &hulls[y]);
        if v.relation != Relation::Less {
            return Ok(OrderResult::NotTotal {
                first: pair[0],
                second: pair[1],
                verdict: v,
            });
        }
    }
    Ok(OrderResult::TotalOrder(ids))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FatouClass {
    SimplyConnected,
    DoublyConnected,
    Other { holes: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FatouComponent {
    pub id: u32,
    pub pixels: usize,
    pub class: FatouClass,
    pub unbounded: bool,
}

/// Connectivity class of every complementary component of `julia`.
///
/// With 8/4 connectivity the adjacency graph of set and background components
/// is a tree, so the number of complementary pieces of a background region is
/// the number of set components bordering it.
pub fn classify_fatou_components(julia: &RasterSet) -> Vec<FatouComponent> {
    let (w, h) = (julia.grid.width, julia.grid.height);
    let fg = label_components(julia);
    let (bg, count, outer) = background_labels(julia);
    let mut pixels = vec![0usize; count as usize + 1];
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); count as usize + 1];
    for (i, &b) in bg.iter().enumerate() {
        if b == 0 {
            continue;
        }
        pixels[b as usize] += 1;
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for &(dx, dy) in &N4 {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                continue;
            }
            let f = fg.labels[ny as usize * w + nx as usize];
            if f != 0 {
                adj[b as usize].push(f);
            }
        }
    }
    (1..=count)
        .filter(|&b| pixels[b as usize] > 0)
        .map(|b| {
            let n = &mut adj[b as usize];
            n.sort_unstable();
            n.dedup();
            let pieces = n.len().max(1);
            let class = match pieces {
                1 => FatouClass::SimplyConnected,
                2 => FatouClass::DoublyConnected,
                k => FatouClass::Other { holes: k - 1 },
            };
            FatouComponent {
                id: b,
                pixels: pixels[b as usize],
                class,
                unbounded: b == outer,
            }
        })
        .collect()
}

/// A set is a discrete Jordan curve when its complement (including the
/// region beyond the window) has exactly two 4-connected pieces.
pub fn is_jordan_curve(c: &RasterSet) -> bool {
    if c.is_empty() {
        return false;
    }
    // the padded labeling always contains the region beyond the window
    let (_, count, _) = background_labels(c);
    count == 2
}

/// Pixels of the set bordering the unbounded complementary region.
pub fn outer_boundary(julia: &RasterSet) -> Result<RasterSet> {
    Ok(polynomial_hull_raster(julia)?.raster.boundary())
}

/// The component with the largest overlap with the 2-px dilation of `∂K̂`,
/// without cross-checking against the surrounding order.
pub fn jmin_component(l: &ComponentLabels, khat: &RasterSet) -> Result<u32> {
    if khat.is_empty() {
        return Err(Error::EmptyRaster("K-hat raster"));
    }
    if khat.grid != l.grid {
        return Err(Error::GridMismatch);
    }
    let near_khat = khat.boundary().dilate(CONTAINMENT_DILATION_PX);
    l.best_overlap(&near_khat).ok_or(Error::NoComponentFound("the boundary of K-hat"))
}

/// Identifies `J_min` (the component meeting `∂K̂`) and `J_max` (the
/// component meeting the boundary of the unbounded Fatou component), and
/// cross-checks both against the extremes of the surrounding order.
pub fn find_jmin_jmax(l: &ComponentLabels, khat: &RasterSet) -> Result<(u32, u32)> {
    if khat.is_empty() {
        return Err(Error::EmptyRaster("K-hat raster"));
    }
    if khat.grid != l.grid {
        return Err(Error::GridMismatch);
    }
    if l.count == 0 {
        return Err(Error::NoComponentFound("the Julia raster (it is empty)"));
    }
    let jmin = jmin_component(l, khat)?;
    let julia = RasterSet {
        grid: l.grid,
        bits: l.labels.iter().map(|&x| x != 0).collect(),
    };
    let near_outer = outer_boundary(&julia)?.dilate(CONTAINMENT_DILATION_PX);
    let jmax = l
        .best_overlap(&near_outer)
        .ok_or(Error::NoComponentFound("the boundary of the unbounded Fatou component"))?;
    let anchor = khat.centroid().expect("nonempty");
    match order_components(l, anchor)? {
        OrderResult::TotalOrder(ids) => {
            let (lo, hi) = (ids[0], *ids.last().expect("nonempty"));
            if lo != jmin || hi != jmax {
                return Err(Error::ExtremeMismatch(format!(
                    "boundary identification gives ({jmin}, {jmax}), order gives ({lo}, {hi})"
                )));
            }
        }
        OrderResult::NotTotal { first, second, .. } => {
            return Err(Error::ExtremeMismatch(format!(
                "components {first} and {second} are not nested"
            )));
        }
    }
    Ok((jmin, jmax))
}

/// The component of the Julia raster containing `h_g^{-1}` of component `c`.
pub fn g_star(gens: &GeneratorSet, g_index: usize, c: u32, l: &ComponentLabels) -> Result<u32> {
    let g = gens.get(g_index)?;
    g_star_map(g, c, l)
}

pub fn g_star_map<M: PolyMap>(map: &M, c: u32, l: &ComponentLabels) -> Result<u32> {
    if c == 0 || c > l.count {
        return Err(Error::InvalidParameter(format!("no component {c}")));
    }
    let pre = preimage_raster(map, &l.component(c), &l.grid);
    if pre.is_empty() {
        return Err(Error::PreimageOutsideWindow);
    }
    let counts = l.overlap_counts(&pre.dilate(1));
    let hit: Vec<u32> = (1..=l.count).filter(|&id| counts[id as usize] > 0).collect();
    match hit.as_slice() {
        [] => Err(Error::NoComponentFound("the preimage raster")),
        [one] => Ok(*one),
        many => Err(Error::MultiComponent(many.len())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentContainment {
    pub id: u32,
    /// Generators whose Julia raster lies in the component.
    pub generators: Vec<usize>,
    pub star: bool,
    pub star_lambda: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub components: Vec<ComponentContainment>,
    pub jmin: u32,
    pub jmax: u32,
    pub b_min: Vec<usize>,
    /// Generators whose Julia raster meets the minimal / maximal component of
    /// the union of generator Julia rasters.
    pub m_prime: Vec<usize>,
    pub m_double_prime: Vec<usize>,
    pub jmin_contains_m_prime: bool,
    pub jmax_contains_m_double_prime: bool,
}

/// Which generator Julia rasters each component contains (after the
/// standard 2-px dilation), and whether `J_min ⊃ M′` and `J_max ⊃ M″`.
///
/// Only the supplied rasters are tested, so `star` coincides with
/// `star_lambda`.
pub fn containment_report(
    l: &ComponentLabels,
    gen_julia: &[RasterSet],
    jmin: u32,
    jmax: u32,
) -> Result<ContainmentReport> {
    if gen_julia.iter().any(|g| g.grid != l.grid) {
        return Err(Error::GridMismatch);
    }
    let mut components = Vec::new();
    for id in l.ids() {
        let d = l.component(id).dilate(CONTAINMENT_DILATION_PX);
        let generators: Vec<usize> = gen_julia
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.is_empty() && g.is_subset_of(&d).unwrap_or(false))
            .map(|(k, _)| k)
            .collect();
        let star_lambda = !generators.is_empty();
        components.push(ComponentContainment {
            id,
            generators,
            star: star_lambda,
            star_lambda,
        });
    }
    let b_min = components
        .iter()
        .find(|c| c.id == jmin)
        .map(|c| c.generators.clone())
        .unwrap_or_default();

    let mut union = RasterSet::empty(l.grid);
    for g in gen_julia {
        union = union.union(g)?;
    }
    if union.is_empty() {
        return Err(Error::EmptyRaster("union of generator Julia rasters"));
    }
    let ul = label_components(&union);
    let pieces: Vec<RasterSet> = ul.ids().map(|id| ul.component(id)).collect();
    let hulls: Vec<RasterSet> = pieces
        .iter()
        .map(|p| polynomial_hull_raster(p).map(|h| h.raster))
        .collect::<Result<_>>()?;
    let n = pieces.len();
    let mut below = vec![false; n];
    let mut above = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && compare_with_hulls(&pieces[i], &hulls[i], &pieces[j], &hulls[j]).relation == Relation::Less {
                below[j] = true;
                above[i] = true;
            }
        }
    }
    let minimal = (0..n).find(|&i| !below[i]).unwrap_or(0);
    let maximal = (0..n).find(|&i| !above[i]).unwrap_or(n - 1);
    let meets = |k: usize| -> Vec<usize> {
        gen_julia
            .iter()
            .enumerate()
            .filter(|(_, g)| g.intersects(&pieces[k]).unwrap_or(false))
            .map(|(i, _)| i)
            .collect()
    };
    let jmin_d = l.component(jmin).dilate(CONTAINMENT_DILATION_PX);
    let jmax_d = l.component(jmax).dilate(CONTAINMENT_DILATION_PX);
    Ok(ContainmentReport {
        components,
        jmin,
        jmax,
        b_min,
        m_prime: meets(minimal),
        m_double_prime: meets(maximal),
        jmin_contains_m_prime: pieces[minimal].is_subset_of(&jmin_d)?,
        jmax_contains_m_double_prime: pieces[maximal].is_subset_of(&jmax_d)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentEntry {
    pub id: u32,
    pub pixels: usize,
    pub bbox: BBox,
}

/// Serializable summary of a labeled Julia raster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub components: Vec<ComponentEntry>,
    pub order: Option<Vec<u32>>,
    pub jmin: Option<u32>,
    pub jmax: Option<u32>,
}

impl ComponentSummary {
    pub fn new(l: &ComponentLabels, order: Option<Vec<u32>>, extremes: Option<(u32, u32)>) -> Self {
        Self {
            components: l
                .ids()
                .map(|id| ComponentEntry {
                    id,
                    pixels: l.pixel_count(id),
                    bbox: l.bbox(id),
                })
                .collect(),
            order,
            jmin: extremes.map(|e| e.0),
            jmax: extremes.map(|e| e.1),
        }
    }
}

/// Minimum pixel distance from `points` to `set`, with the nearest point.
pub fn min_distance_px(points: &[Complex64], set: &RasterSet) -> Option<(f64, Complex64)> {
    let d = squared_distance_to(set);
    points
        .iter()
        .map(|&z| match set.grid.pixel_of(z) {
            Some(i) => (d[i].sqrt(), z),
            None => {
                let (i, out) = set.grid.clamp_pixel(z);
                (d[i].sqrt() + out, z)
            }
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(n: usize) -> GridSpec {
        GridSpec::square(c(0.0, 0.0), 5.0, n).unwrap()
    }

    fn ring(g: GridSpec, center: Complex64, r: f64) -> RasterSet {
        let t = g.delta() * 0.75;
        RasterSet::from_fn(g, move |z| ((z - center).norm() - r).abs() <= t)
    }

    fn disk(g: GridSpec, r: f64) -> RasterSet {
        RasterSet::from_fn(g, move |z| z.norm() <= r)
    }

    #[test]
    fn labeling_examples() {
        let g = grid(200);
        let two = ring(g, c(0.0, 0.0), 1.0).union(&ring(g, c(0.0, 0.0), 3.0)).unwrap();
        assert_eq!(label_components(&two).count, 2);
        assert_eq!(label_components(&RasterSet::empty(g)).count, 0);
        // diagonal neighbours join
        let g = GridSpec::new(0.0, 3.0, 0.0, 3.0, 3, 3).unwrap();
        let diag = RasterSet::from_indices(g, [0, 4, 8]);
        let l = label_components(&diag);
        assert_eq!(l.count, 1);
        assert_eq!(
            l.bbox(1),
            BBox {
                col_min: 0,
                row_min: 0,
                col_max: 2,
                row_max: 2
            }
        );
    }

    #[test]
    fn labels_follow_scan_order() {
        let g = GridSpec::new(0.0, 5.0, 0.0, 1.0, 5, 1).unwrap();
        let l = label_components(&RasterSet::from_indices(g, [3, 0]));
        assert_eq!(l.labels, vec![1, 0, 0, 2, 0]);
    }

    #[test]
    fn hull_examples() {
        let g = grid(200);
        let circle = ring(g, c(0.0, 0.0), 2.0);
        let h = polynomial_hull_raster(&circle).unwrap();
        assert!(!h.truncated);
        let filled = RasterSet::from_fn(g, |z| z.norm() <= 2.0);
        assert!(filled.is_subset_of(&h.raster).unwrap());
        assert!(h.raster.is_subset_of(&filled.dilate(1)).unwrap());
        let d = disk(g, 2.0);
        assert_eq!(polynomial_hull_raster(&d).unwrap().raster, d);
        let edge = RasterSet::from_fn(g, |z| z.re.abs() >= 4.9);
        assert!(polynomial_hull_raster(&edge).unwrap().truncated);
        assert!(polynomial_hull_raster(&RasterSet::empty(g)).is_err());
    }

    #[test]
    fn compare_examples() {
        let g = grid(300);
        let rel = |a: &RasterSet, b: &RasterSet| surrounding_compare(a, b).unwrap().relation;
        let o = c(0.0, 0.0);
        assert_eq!(rel(&ring(g, o, 1.0), &ring(g, o, 4.0)), Relation::Less);
        assert_eq!(rel(&ring(g, o, 4.0), &ring(g, o, 1.0)), Relation::Greater);
        assert_eq!(rel(&ring(g, c(-3.0, 0.0), 1.0), &ring(g, c(3.0, 0.0), 1.0)), Relation::Outside);
        assert_eq!(rel(&ring(g, o, 1.0), &ring(g, c(1.0, 0.0), 1.0)), Relation::Intersects);
    }

    #[test]
    fn order_examples() {
        let g = grid(300);
        let o = c(0.0, 0.0);
        let three = ring(g, o, 1.0).union(&ring(g, o, 2.0)).unwrap().union(&ring(g, o, 4.0)).unwrap();
        let l = label_components(&three);
        let OrderResult::TotalOrder(ids) = order_components(&l, o).unwrap() else {
            panic!("not total");
        };
        let radii: Vec<f64> = ids
            .iter()
            .map(|&id| {
                let b = l.bbox(id);
                (b.col_max - b.col_min) as f64 * g.delta() / 2.0
            })
            .collect();
        assert!(radii.windows(2).all(|w| w[0] < w[1]), "{radii:?}");

        let side = ring(g, c(-3.0, 0.0), 1.0).union(&ring(g, c(3.0, 0.0), 1.0)).unwrap();
        let l = label_components(&side);
        assert!(matches!(order_components(&l, c(-3.0, 0.0)), Err(Error::AnchorOutsideHull(_))));
    }

    #[test]
    fn fatou_classes_of_circle_and_annuli() {
        let g = grid(200);
        let o = c(0.0, 0.0);
        let classes = classify_fatou_components(&ring(g, o, 2.0));
        assert_eq!(classes.len(), 2);
        let inner = classes.iter().find(|f| !f.unbounded).unwrap();
        let outer = classes.iter().find(|f| f.unbounded).unwrap();
        assert_eq!(inner.class, FatouClass::SimplyConnected);
        assert_eq!(outer.class, FatouClass::SimplyConnected);

        let nested = ring(g, o, 1.0).union(&ring(g, o, 2.0)).unwrap().union(&ring(g, o, 3.0)).unwrap();
        let classes = classify_fatou_components(&nested);
        assert_eq!(classes.len(), 4);
        let doubly = classes.iter().filter(|f| f.class == FatouClass::DoublyConnected).count();
        assert_eq!(doubly, 2);

        // a region with two holes
        let pair = ring(g, c(-1.5, 0.0), 1.0).union(&ring(g, c(1.5, 0.0), 1.0)).unwrap();
        let classes = classify_fatou_components(&pair);
        let outer = classes.iter().find(|f| f.unbounded).unwrap();
        assert_eq!(outer.class, FatouClass::DoublyConnected);
        let two_holes = pair.union(&ring(g, o, 4.0)).unwrap();
        let classes = classify_fatou_components(&two_holes);
        let other: Vec<_> = classes.iter().filter(|f| f.class == FatouClass::Other { holes: 2 }).collect();
        assert_eq!(other.len(), 1);
        assert!(!other[0].unbounded);
    }

    #[test]
    fn jordan_examples() {
        let g = grid(200);
        assert!(is_jordan_curve(&ring(g, c(0.0, 0.0), 2.0)));
        assert!(!is_jordan_curve(&disk(g, 2.0)));
        let eight = ring(g, c(-1.0, 0.0), 1.0).union(&ring(g, c(1.0, 0.0), 1.0)).unwrap();
        assert!(!is_jordan_curve(&eight));
    }

    #[test]
    fn jmin_jmax_on_nested_rings() {
        let g = grid(300);
        let o = c(0.0, 0.0);
        let set = ring(g, o, 1.0).union(&ring(g, o, 2.0)).unwrap().union(&ring(g, o, 4.0)).unwrap();
        let l = label_components(&set);
        let khat = disk(g, 1.0);
        let (jmin, jmax) = find_jmin_jmax(&l, &khat).unwrap();
        assert!(l.component(jmin).intersects(&ring(g, o, 1.0)).unwrap());
        assert!(l.component(jmax).intersects(&ring(g, o, 4.0)).unwrap());

        let single = label_components(&ring(g, o, 1.0));
        let (a, b) = find_jmin_jmax(&single, &khat).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn containment_on_nested_rings() {
        let g = grid(300);
        let o = c(0.0, 0.0);
        let (r1, r4) = (ring(g, o, 1.0), ring(g, o, 4.0));
        let set = r1.union(&ring(g, o, 2.0)).unwrap().union(&r4).unwrap();
        let l = label_components(&set);
        let (jmin, jmax) = find_jmin_jmax(&l, &disk(g, 1.0)).unwrap();
        let rep = containment_report(&l, &[r1, r4], jmin, jmax).unwrap();
        assert_eq!(rep.b_min, vec![0]);
        assert_eq!(rep.m_prime, vec![0]);
        assert_eq!(rep.m_double_prime, vec![1]);
        assert!(rep.jmin_contains_m_prime && rep.jmax_contains_m_double_prime);
        let with: Vec<_> = rep.components.iter().filter(|c| c.star_lambda).map(|c| c.id).collect();
        assert_eq!(with.len(), 2);
        assert!(with.contains(&jmin) && with.contains(&jmax));
    }

    fn random_rings() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
        proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64, 0.3..1.8f64), 2..4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn hull_monotone_under_less(rings in random_rings()) {
            let g = grid(120);
            let parts: Vec<RasterSet> = rings.iter().map(|&(x, y, r)| ring(g, c(x, y), r)).collect();
            for a in &parts {
                for b in &parts {
                    let v = surrounding_compare(a, b).unwrap();
                    if v.relation == Relation::Less {
                        let ha = polynomial_hull_raster(a).unwrap().raster;
                        let hb = polynomial_hull_raster(b).unwrap().raster;
                        prop_assert!(ha.is_subset_of(&hb).unwrap());
                    }
                    // antisymmetry of the verdict
                    let w = surrounding_compare(b, a).unwrap().relation;
                    let expect = match v.relation {
                        Relation::Less => Relation::Greater,
                        Relation::Greater => Relation::Less,
                        r => r,
                    };
                    prop_assert_eq!(w, expect);
                }
            }
        }
    }
}
