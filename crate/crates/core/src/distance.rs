//! Exact Euclidean distance transform and raster Hausdorff distance.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::RasterSet;

/// Squared distance (in pixels) from every pixel centre to the nearest
/// member. Infinite everywhere for an empty raster.
///
/// Separable lower-envelope transform: a column pass followed by a row pass.
pub fn squared_distance_to(set: &RasterSet) -> Vec<f64> {
    let (w, h) = (set.grid.width, set.grid.height);
    let mut d: Vec<f64> = set.bits.iter().map(|&b| if b { 0.0 } else { f64::INFINITY }).collect();

    // columns
    let mut cols: Vec<Vec<f64>> = (0..w)
        .into_par_iter()
        .map(|c| {
            let f: Vec<f64> = (0..h).map(|r| d[r * w + c]).collect();
            transform_1d(&f)
        })
        .collect();
    for (c, col) in cols.iter_mut().enumerate() {
        for (r, v) in col.iter().enumerate() {
            d[r * w + c] = *v;
        }
    }
    // rows
    d.par_chunks_mut(w).for_each(|row| {
        let t = transform_1d(row);
        row.copy_from_slice(&t);
    });
    d
}

/// Distance (in pixels) from each pixel centre to the nearest member.
pub fn distance_to(set: &RasterSet) -> Vec<f64> {
    squared_distance_to(set).into_iter().map(f64::sqrt).collect()
}

fn transform_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![f64::INFINITY; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k: isize = -1;
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            if k < 0 {
                k = 0;
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            let p = v[k as usize];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k as usize] {
                k -= 1;
                continue;
            }
            k += 1;
            v[k as usize] = q;
            z[k as usize] = s;
            z[k as usize + 1] = f64::INFINITY;
            break;
        }
    }
    if k < 0 {
        return out;
    }
    let mut j = 0usize;
    for (q, o) in out.iter_mut().enumerate() {
        while z[j + 1] < q as f64 {
            j += 1;
        }
        let p = v[j];
        let dq = q as f64 - p as f64;
        *o = dq * dq + f[p];
    }
    out
}

/// Symmetric Hausdorff distance between the member pixel centres of two
/// rasters, in pixels.
pub fn hausdorff_px(a: &RasterSet, b: &RasterSet) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    if a.is_empty() {
        return Err(Error::EmptyRaster("first operand of hausdorff_px"));
    }
    if b.is_empty() {
        return Err(Error::EmptyRaster("second operand of hausdorff_px"));
    }
    Ok(directed_px(a, b).max(directed_px(b, a)))
}

/// `max_{p in from} dist(p, to)`, in pixels.
pub fn directed_px(from: &RasterSet, to: &RasterSet) -> f64 {
    let d = squared_distance_to(to);
    from.members().map(|i| d[i]).fold(0.0, f64::max).sqrt()
}
