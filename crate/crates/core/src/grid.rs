//! Square-pixel windows onto the complex plane and bit rasters over them.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rectangular window with square pixels. Row 0 is the top row (largest
/// imaginary part).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid("zero-sized grid".into()));
        }
        if !(xmax > xmin && ymax > ymin) || ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "degenerate window [{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        let dx = (xmax - xmin) / width as f64;
        let dy = (ymax - ymin) / height as f64;
        if ((dx - dy) / dx).abs() > 1e-9 {
            return Err(Error::InvalidGrid(format!(
                "pixels are not square (dx = {dx}, dy = {dy})"
            )));
        }
        Ok(Self { xmin, xmax, ymin, ymax, width, height })
    }

    /// Window from two corners and a width; the height follows from the
    /// square-pixel constraint and `ymax` is snapped to a whole pixel.
    pub fn from_corners(xmin: f64, ymin: f64, xmax: f64, ymax: f64, width: usize) -> Result<Self> {
        if width == 0 || !(xmax > xmin) || !(ymax > ymin) {
            return Err(Error::InvalidGrid("need xmin < xmax, ymin < ymax, width > 0".into()));
        }
        let delta = (xmax - xmin) / width as f64;
        let height = ((ymax - ymin) / delta).round().max(1.0) as usize;
        Self::new(xmin, xmax, ymin, ymin + height as f64 * delta, width, height)
    }

    /// Parses `xmin:ymin:xmax:ymax:width`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 5 {
            return Err(Error::InvalidGrid(format!(
                "expected xmin:ymin:xmax:ymax:width, got {s:?}"
            )));
        }
        let num = |k: usize| -> Result<f64> {
            parts[k]
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("bad number {:?} in {s:?}", parts[k])))
        };
        let width = parts[4]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidGrid(format!("bad width {:?} in {s:?}", parts[4])))?;
        Self::from_corners(num(0)?, num(1)?, num(2)?, num(3)?, width)
    }

    /// Largest modulus of a point of the window.
    pub fn max_modulus(&self) -> f64 {
        self.xmin.abs().max(self.xmax.abs()).hypot(self.ymin.abs().max(self.ymax.abs()))
    }

    /// Square window `[cx - half, cx + half] x [cy - half, cy + half]`.
    pub fn square(center: Complex64, half: f64, n: usize) -> Result<Self> {
        Self::new(center.re - half, center.re + half, center.im - half, center.im + half, n, n)
    }

    /// Pixel side length.
    pub fn delta(&self) -> f64 {
        (self.xmax - self.xmin) / self.width as f64
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self, col: usize, row: usize) -> Complex64 {
        let d = self.delta();
        Complex64::new(
            self.xmin + (col as f64 + 0.5) * d,
            self.ymax - (row as f64 + 0.5) * d,
        )
    }

    pub fn center_of_index(&self, idx: usize) -> Complex64 {
        self.center(idx % self.width, idx / self.width)
    }

    /// Fractional pixel coordinates `(col, row)` of a point; pixel centres sit
    /// at half-integers.
    pub fn to_pixel_coords(&self, z: Complex64) -> (f64, f64) {
        let d = self.delta();
        ((z.re - self.xmin) / d, (self.ymax - z.im) / d)
    }

    pub fn pixel_of(&self, z: Complex64) -> Option<usize> {
        let (x, y) = self.to_pixel_coords(z);
        if x >= 0.0 && y >= 0.0 && x < self.width as f64 && y < self.height as f64 {
            Some(y as usize * self.width + x as usize)
        } else {
            None
        }
    }

    /// Pixel nearest to `z` together with the distance (in pixels) from `z`
    /// to the window; zero when `z` lies inside.
    pub fn clamp_pixel(&self, z: Complex64) -> (usize, f64) {
        let (x, y) = self.to_pixel_coords(z);
        let w = self.width as f64;
        let h = self.height as f64;
        let cx = x.clamp(0.0, w);
        let cy = y.clamp(0.0, h);
        let outside = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
        let col = (cx as usize).min(self.width - 1);
        let row = (cy as usize).min(self.height - 1);
        (row * self.width + col, outside)
    }

    pub fn covers_disk(&self, radius: f64) -> bool {
        self.xmin <= -radius && self.xmax >= radius && self.ymin <= -radius && self.ymax >= radius
    }
}

/// One bit per pixel over a [`GridSpec`], row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterSet {
    pub grid: GridSpec,
    pub bits: Vec<bool>,
}

impl RasterSet {
    pub fn empty(grid: GridSpec) -> Self {
        Self { bits: vec![false; grid.len()], grid }
    }

    pub fn full(grid: GridSpec) -> Self {
        Self { bits: vec![true; grid.len()], grid }
    }

    /// Membership decided by a predicate on pixel centres, evaluated in
    /// parallel by rows.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(Complex64) -> bool + Sync,
    {
        let mut bits = vec![false; grid.len()];
        bits.par_chunks_mut(grid.width).enumerate().for_each(|(row, chunk)| {
            for (col, b) in chunk.iter_mut().enumerate() {
                *b = f(grid.center(col, row));
            }
        });
        Self { grid, bits }
    }

    pub fn from_indices(grid: GridSpec, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut r = Self::empty(grid);
        for i in idx {
            r.bits[i] = true;
        }
        r
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.grid.width + col]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    fn same_grid(&self, other: &RasterSet) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn union(&self, other: &RasterSet) -> Result<RasterSet> {
        self.same_grid(other)?;
        Ok(self.zip_with(other, |a, b| a || b))
    }

    pub fn intersection(&self, other: &RasterSet) -> Result<RasterSet> {
        self.same_grid(other)?;
        Ok(self.zip_with(other, |a, b| a && b))
    }

    pub fn difference(&self, other: &RasterSet) -> Result<RasterSet> {
        self.same_grid(other)?;
        Ok(self.zip_with(other, |a, b| a && !b))
    }

    fn zip_with(&self, other: &RasterSet, f: impl Fn(bool, bool) -> bool) -> RasterSet {
        RasterSet {
            grid: self.grid,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn complement(&self) -> RasterSet {
        RasterSet {
            grid: self.grid,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &RasterSet) -> Result<bool> {
        self.same_grid(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b))
    }

    pub fn intersects(&self, other: &RasterSet) -> Result<bool> {
        self.same_grid(other)?;
        Ok(self.bits.iter().zip(&other.bits).any(|(&a, &b)| a && b))
    }

    /// Dilation by a `(2r+1)^2` square (Chebyshev radius `r` pixels).
    pub fn dilate(&self, r: usize) -> RasterSet {
        if r == 0 {
            return self.clone();
        }
        let (w, h) = (self.grid.width, self.grid.height);
        // separable: rows then columns
        let mut tmp = vec![false; w * h];
        for row in 0..h {
            let line = &self.bits[row * w..(row + 1) * w];
            let mut last: Option<usize> = None;
            let mut next = vec![usize::MAX; w];
            let mut upcoming = usize::MAX;
            for col in (0..w).rev() {
                if line[col] {
                    upcoming = col;
                }
                next[col] = upcoming;
            }
            for col in 0..w {
                if line[col] {
                    last = Some(col);
                }
                let near_left = last.is_some_and(|l| col - l <= r);
                let near_right = next[col] != usize::MAX && next[col] - col <= r;
                tmp[row * w + col] = near_left || near_right;
            }
        }
        let mut out = vec![false; w * h];
        for col in 0..w {
            let mut last: Option<usize> = None;
            let mut next = vec![usize::MAX; h];
            let mut upcoming = usize::MAX;
            for row in (0..h).rev() {
                if tmp[row * w + col] {
                    upcoming = row;
                }
                next[row] = upcoming;
            }
            for row in 0..h {
                if tmp[row * w + col] {
                    last = Some(row);
                }
                let near_up = last.is_some_and(|l| row - l <= r);
                let near_down = next[row] != usize::MAX && next[row] - row <= r;
                out[row * w + col] = near_up || near_down;
            }
        }
        RasterSet { grid: self.grid, bits: out }
    }

    /// Erosion by a `(2r+1)^2` square; pixels outside the window count as
    /// members.
    pub fn erode(&self, r: usize) -> RasterSet {
        self.complement().dilate(r).complement()
    }

    /// Members with at least one 4-neighbour that is not a member (pixels
    /// beyond the window count as non-members).
    pub fn boundary(&self) -> RasterSet {
        let (w, h) = (self.grid.width, self.grid.height);
        let mut out = vec![false; w * h];
        for row in 0..h {
            for col in 0..w {
                let i = row * w + col;
                if !self.bits[i] {
                    continue;
                }
                let edge = col == 0
                    || row == 0
                    || col + 1 == w
                    || row + 1 == h
                    || !self.bits[i - 1]
                    || !self.bits[i + 1]
                    || !self.bits[i - w]
                    || !self.bits[i + w];
                out[i] = edge;
            }
        }
        RasterSet { grid: self.grid, bits: out }
    }

    /// Whether any member lies on the outermost ring of pixels.
    pub fn touches_border(&self) -> bool {
        let (w, h) = (self.grid.width, self.grid.height);
        (0..w).any(|c| self.bits[c] || self.bits[(h - 1) * w + c])
            || (0..h).any(|r| self.bits[r * w] || self.bits[r * w + w - 1])
    }

    /// Mean of member pixel centres.
    pub fn centroid(&self) -> Option<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut n = 0usize;
        for i in self.members() {
            sum += self.grid.center_of_index(i);
            n += 1;
        }
        (n > 0).then(|| sum / n as f64)
    }

    /// Binary PGM (P5), members 255, with the window in a comment line.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        let g = &self.grid;
        write!(out, "P5\n# grid {} {} {} {}\n{} {}\n255\n", g.xmin, g.xmax, g.ymin, g.ymax, g.width, g.height)?;
        let bytes: Vec<u8> = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        out.write_all(&bytes)?;
        out.flush()?;
        Ok(())
    }

    pub fn save_pgm(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_pgm(std::io::BufWriter::new(f))
    }

    /// Reads a P5 raster written by [`RasterSet::write_pgm`]. Any non-zero
    /// sample is a member.
    pub fn read_pgm<R: Read>(input: R) -> Result<RasterSet> {
        let mut reader = BufReader::new(input);
        let mut header_tokens: Vec<String> = Vec::new();
        let mut window: Option<[f64; 4]> = None;
        let mut line = String::new();
        while header_tokens.len() < 4 {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                return Err(Error::Parse("truncated PGM header".into()));
            }
            let trimmed = line.trim();
            if let Some(comment) = trimmed.strip_prefix('#') {
                let parts: Vec<&str> = comment.split_whitespace().collect();
                if parts.first() == Some(&"grid") && parts.len() == 5 {
                    let mut vals = [0.0; 4];
                    for (v, p) in vals.iter_mut().zip(&parts[1..]) {
                        *v = p
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad grid comment value {p:?}")))?;
                    }
                    window = Some(vals);
                }
                continue;
            }
            header_tokens.extend(trimmed.split_whitespace().map(str::to_owned));
        }
        if header_tokens[0] != "P5" {
            return Err(Error::Parse(format!("expected P5 magic, found {:?}", header_tokens[0])));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad PGM header field {s:?}")))
        };
        let width = parse(&header_tokens[1])?;
        let height = parse(&header_tokens[2])?;
        let maxval = parse(&header_tokens[3])?;
        if maxval == 0 || maxval > 255 {
            return Err(Error::Parse(format!("unsupported maxval {maxval}")));
        }
        let [xmin, xmax, ymin, ymax] =
            window.ok_or_else(|| Error::Parse("missing '# grid' comment".into()))?;
        let grid = GridSpec::new(xmin, xmax, ymin, ymax, width, height)?;
        let mut data = vec![0u8; width * height];
        reader.read_exact(&mut data)?;
        Ok(RasterSet {
            grid,
            bits: data.into_iter().map(|v| v != 0).collect(),
        })
    }

    pub fn load_pgm(path: &Path) -> Result<RasterSet> {
        Self::read_pgm(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(-1.0, 1.0, -1.0, 1.0, 20, 20).unwrap()
    }

    #[test]
    fn parse_grid_flag() {
        let g = GridSpec::parse("-5:-5:5:5:1024").unwrap();
        assert_eq!((g.width, g.height), (1024, 1024));
        let g = GridSpec::parse("-2:-1:2:1:400").unwrap();
        assert_eq!(g.height, 200);
        assert!(GridSpec::parse("-5:-5:5:5").is_err());
        assert!(GridSpec::parse("a:-5:5:5:10").is_err());
        assert!(GridSpec::parse("5:-5:-5:5:10").is_err());
    }

    #[test]
    fn pixel_centres_and_lookup_agree() {
        let g = grid();
        for idx in [0, 19, 20, 399, 211] {
            assert_eq!(g.pixel_of(g.center_of_index(idx)), Some(idx));
        }
        assert_eq!(g.center(0, 0), Complex64::new(-0.95, 0.95));
        assert_eq!(g.pixel_of(Complex64::new(1.5, 0.0)), None);
    }

    #[test]
    fn rejects_non_square_pixels() {
        assert!(GridSpec::new(0.0, 2.0, 0.0, 1.0, 10, 10).is_err());
        let g = GridSpec::from_corners(-5.0, -5.0, 5.0, 5.0, 1024).unwrap();
        assert_eq!(g.height, 1024);
    }

    #[test]
    fn dilate_and_erode() {
        let g = grid();
        let one = RasterSet::from_indices(g, [10 * 20 + 10]);
        let d = one.dilate(1);
        assert_eq!(d.count(), 9);
        assert_eq!(d.erode(1), one);
        assert_eq!(d.boundary().count(), 8);
    }

    #[test]
    fn pgm_round_trip() {
        let g = GridSpec::new(-2.5, 2.5, -1.25, 1.25, 8, 4).unwrap();
        let r = RasterSet::from_fn(g, |z| z.re > 0.0);
        let mut buf = Vec::new();
        r.write_pgm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n# grid -2.5 2.5 -1.25 1.25\n8 4\n255\n"));
        assert_eq!(RasterSet::read_pgm(&buf[..]).unwrap(), r);
    }
}
