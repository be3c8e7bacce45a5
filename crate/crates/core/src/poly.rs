//! Complex polynomials: evaluation, Taylor expansion, roots, critical points
//! and preimages.
//!
//! Roots are found with the Durand–Kerner (Weierstrass) iteration followed by
//! a Newton polish. Monomials and quadratics are solved in closed form, which
//! is both exact and much faster on the hot paths of the chaos game.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Iteration cap for the simultaneous root iteration.
pub const ROOT_ITERATION_CAP: usize = 200;
/// Relative distance below which two roots are treated as one.
pub const ROOT_CLUSTER_TOL: f64 = 1e-7;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A polynomial with complex coefficients stored in ascending degree.
///
/// Trailing zero coefficients are trimmed on construction, so the last stored
/// coefficient is the leading one (except for the zero polynomial).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
    monomial: bool,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        let d = coeffs.len() - 1;
        let monomial = d > 0 && coeffs[..d].iter().all(|c| c.norm() == 0.0);
        Self { coeffs, monomial }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `a * z^d`.
    pub fn monomial(a: Complex64, d: usize) -> Self {
        let mut coeffs = vec![ZERO; d + 1];
        coeffs[d] = a;
        Self::new(coeffs)
    }

    /// `(z - center)^2 / scale + center`, whose Julia set is the circle
    /// `C(center, |scale|)`.
    pub fn shifted_square(center: Complex64, scale: Complex64) -> Self {
        let inv = scale.inv();
        Self::new(vec![
            center * center * inv + center,
            -2.0 * center * inv,
            inv,
        ])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    /// Returns `(a, d)` when the polynomial is `a * z^d`.
    pub fn as_monomial(&self) -> Option<(Complex64, usize)> {
        self.monomial.then(|| (self.leading(), self.degree()))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        if self.monomial {
            return self.leading() * z.powu(self.degree() as u32);
        }
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        if self.monomial {
            let d = self.degree() as u32;
            let zd1 = z.powu(d - 1);
            return (self.leading() * zd1 * z, self.leading() * zd1 * d as f64);
        }
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.degree() == 0 {
            return Polynomial::new(vec![ZERO]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Coefficient form of `self ∘ inner`.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::new(vec![ZERO]);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(inner);
            acc.coeffs[0] += c;
        }
        Polynomial::new(acc.coeffs)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Coefficients of `p(c + t)` in ascending powers of `t`.
    pub fn taylor_at(&self, c: Complex64) -> Vec<Complex64> {
        let mut b = self.coeffs.clone();
        let n = b.len();
        // repeated synthetic division by (z - c)
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let carry = b[j + 1] * c;
                b[j] += carry;
            }
        }
        b
    }

    /// Disk enclosure of the image of the closed disk `B(c, rho)`.
    ///
    /// Returns `(p(c), s)` with `p(B(c, rho)) ⊂ B(p(c), s)`; `s` is the sum
    /// `Σ_{j≥1} |p^{(j)}(c)/j!| rho^j`.
    pub fn disk_image(&self, c: Complex64, rho: f64) -> (Complex64, f64) {
        if let Some((a, d)) = self.as_monomial() {
            let m = c.norm();
            let s = if m == 0.0 {
                rho.powi(d as i32)
            } else {
                m.powi(d as i32) * (d as f64 * (rho / m).ln_1p()).exp_m1()
            };
            return (a * c.powu(d as u32), a.norm() * s);
        }
        let t = self.taylor_at(c);
        let mut s = 0.0;
        let mut r = 1.0;
        for b in &t[1..] {
            r *= rho;
            s += b.norm() * r;
        }
        (t[0], s)
    }

    /// `|a_d|^{-1/(d-1)}`: the logarithmic capacity of the Julia set.
    pub fn leading_capacity(&self) -> Result<f64> {
        let d = self.degree();
        if d < 2 {
            return Err(Error::DegreeTooLow {
                degree: d,
                required: 2,
            });
        }
        Ok(self.leading().norm().powf(-1.0 / (d as f64 - 1.0)))
    }

    /// All `d` roots, counted with multiplicity.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let d = self.degree();
        if d == 0 {
            return Ok(Vec::new());
        }
        if let Some((_, d)) = self.as_monomial() {
            return Ok(vec![ZERO; d]);
        }
        match d {
            1 => Ok(vec![-self.coeffs[0] / self.coeffs[1]]),
            2 => Ok(quadratic_roots(self.coeffs[2], self.coeffs[1], self.coeffs[0]).to_vec()),
            _ => durand_kerner(&self.coeffs),
        }
    }

    /// Critical points counted with multiplicity (`d - 1` of them).
    pub fn critical_points_with_multiplicity(&self) -> Result<Vec<Complex64>> {
        let d = self.degree();
        if d < 2 {
            return Err(Error::DegreeTooLow {
                degree: d,
                required: 2,
            });
        }
        let roots = self.derivative().roots()?;
        debug_assert_eq!(roots.len(), d - 1);
        Ok(roots)
    }

    /// Distinct critical points; multiple roots are collapsed.
    pub fn critical_points(&self) -> Result<Vec<Complex64>> {
        Ok(cluster(self.critical_points_with_multiplicity()?))
    }

    /// The `d` solutions of `p(z) = w`, counted with multiplicity.
    pub fn preimages(&self, w: Complex64) -> Result<Vec<Complex64>> {
        let d = self.degree();
        if d == 0 {
            return Err(Error::DegreeTooLow {
                degree: 0,
                required: 1,
            });
        }
        if let Some((a, d)) = self.as_monomial() {
            return Ok(monomial_roots(w / a, d));
        }
        if d == 2 {
            return Ok(quadratic_roots(self.coeffs[2], self.coeffs[1], self.coeffs[0] - w).to_vec());
        }
        let mut shifted = self.coeffs.clone();
        shifted[0] -= w;
        let roots = durand_kerner(&shifted)?;
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(1.0_f64.max(w.norm()), f64::max);
        let worst = roots
            .iter()
            .map(|&r| (self.eval(r) - w).norm() / (scale * 1.0_f64.max(r.norm()).powi(d as i32 - 1)))
            .fold(0.0, f64::max);
        if worst > 1e-9 {
            return Err(Error::NoConvergence {
                iterations: ROOT_ITERATION_CAP,
                residual: worst,
            });
        }
        Ok(roots)
    }

    /// One preimage of `w`, the `k`-th in a fixed enumeration (`k < d`).
    ///
    /// Closed-form branches for monomials and quadratics; otherwise the
    /// general solver.
    pub fn preimage_branch(&self, w: Complex64, k: usize) -> Result<Complex64> {
        if let Some((a, d)) = self.as_monomial() {
            let base = (w / a).powf(1.0 / d as f64);
            return Ok(base * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64));
        }
        if self.degree() == 2 {
            let r = quadratic_roots(self.coeffs[2], self.coeffs[1], self.coeffs[0] - w);
            return Ok(r[k % 2]);
        }
        let roots = self.preimages(w)?;
        Ok(roots[k % roots.len()])
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        if pairs.is_empty() {
            return Err(serde::de::Error::custom("polynomial needs at least one coefficient"));
        }
        Ok(Polynomial::new(
            pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        ))
    }
}

fn monomial_roots(q: Complex64, d: usize) -> Vec<Complex64> {
    if q.norm() == 0.0 {
        return vec![ZERO; d];
    }
    let base = q.powf(1.0 / d as f64);
    (0..d)
        .map(|k| base * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64))
        .collect()
}

/// Roots of `a z^2 + b z + c` without cancellation.
fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return [ZERO, ZERO];
    }
    [q / a, c / q]
}

fn cluster(roots: Vec<Complex64>) -> Vec<Complex64> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for r in roots {
        let tol = ROOT_CLUSTER_TOL * r.norm().max(1.0);
        match out.iter_mut().find(|(c, n)| (*c / *n as f64 - r).norm() <= tol) {
            Some((c, n)) => {
                *c += r;
                *n += 1;
            }
            None => out.push((r, 1)),
        }
    }
    out.into_iter().map(|(c, n)| c / n as f64).collect()
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// Durand–Kerner iteration on the monic normalisation, then a guarded
/// Newton polish of every root.
fn durand_kerner(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();
    let radius = 1.0 + monic[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
    // irrational rotation breaks the symmetry of real or symmetric inputs
    let phase = 0.4 + 2.0_f64.sqrt() * 0.1;
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, phase + 2.0 * PI * k as f64 / d as f64))
        .collect();

    let mut converged = false;
    for _ in 0..ROOT_ITERATION_CAP {
        let mut max_step = 0.0_f64;
        for i in 0..d {
            let zi = z[i];
            let denom = z
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, &zj)| acc * (zi - zj));
            if denom.norm() == 0.0 {
                z[i] += Complex64::new(1e-12 * radius, 1e-12 * radius);
                max_step = f64::INFINITY;
                continue;
            }
            let step = horner(&monic, zi) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm() / zi.norm().max(1.0));
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }

    let dmonic: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect();
    for zi in z.iter_mut() {
        for _ in 0..4 {
            let p = horner(&monic, *zi);
            let dp = horner(&dmonic, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let cand = *zi - p / dp;
            if horner(&monic, cand).norm() < p.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }

    let scale = monic.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let worst = z
        .iter()
        .map(|&r| horner(&monic, r).norm() / (scale * r.norm().max(1.0).powi(d as i32 - 1)))
        .fold(0.0, f64::max);
    if !converged && worst > 1e-10 {
        return Err(Error::NoConvergence {
            iterations: ROOT_ITERATION_CAP,
            residual: worst,
        });
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(set: &[Complex64], z: Complex64, tol: f64) -> bool {
        set.iter().any(|&r| (r - z).norm() < tol)
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn critical_points_of_quadratic_family() {
        let p = Polynomial::from_real(&[0.25, 0.0, 1.0]);
        assert_eq!(p.critical_points().unwrap(), vec![c(0.0, 0.0)]);
        let eps = c(0.9, 0.0);
        let q = Polynomial::shifted_square(eps, c(2.0, 0.0));
        let cp = q.critical_points().unwrap();
        assert_eq!(cp.len(), 1);
        assert!((cp[0] - eps).norm() < 1e-14);
    }

    #[test]
    fn critical_points_of_iterated_basilica() {
        let g1 = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let h = g1.compose(&g1);
        assert_eq!(h, Polynomial::from_real(&[0.0, 0.0, -2.0, 0.0, 1.0]));
        let cp = h.critical_points().unwrap();
        assert_eq!(cp.len(), 3);
        for z in [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)] {
            assert!(contains(&cp, z, 1e-10), "{z} missing from {cp:?}");
        }
    }

    #[test]
    fn preimage_examples() {
        let sq = Polynomial::monomial(c(1.0, 0.0), 2);
        let r = sq.preimages(c(4.0, 0.0)).unwrap();
        assert!(contains(&r, c(2.0, 0.0), 1e-12) && contains(&r, c(-2.0, 0.0), 1e-12));

        let basilica = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let r = basilica.preimages(c(0.0, 0.0)).unwrap();
        assert!(contains(&r, c(1.0, 0.0), 1e-12) && contains(&r, c(-1.0, 0.0), 1e-12));

        let q = Polynomial::monomial(c(1.0 / 64.0, 0.0), 4);
        let r = q.preimages(c(4.0, 0.0)).unwrap();
        for z in [c(4.0, 0.0), c(-4.0, 0.0), c(0.0, 4.0), c(0.0, -4.0)] {
            assert!(contains(&r, z, 1e-12));
        }
    }

    #[test]
    fn general_solver_on_quartic() {
        let p = Polynomial::from_real(&[0.0, 0.0, -2.0, 0.0, 1.0]);
        let w = c(0.3, -1.7);
        let roots = p.preimages(w).unwrap();
        assert_eq!(roots.len(), 4);
        for r in roots {
            assert!((p.eval(r) - w).norm() < 1e-12);
        }
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(Polynomial::monomial(c(1.0, 0.0), 2).leading_capacity().unwrap(), 1.0);
        let q = Polynomial::monomial(c(0.25, 0.0), 2).leading_capacity().unwrap();
        assert!((q - 4.0).abs() < 1e-14);
        let q = Polynomial::monomial(c(1.0 / 64.0, 0.0), 4).leading_capacity().unwrap();
        assert!((q - 4.0).abs() < 1e-12);
        assert!(Polynomial::from_real(&[1.0, 1.0]).leading_capacity().is_err());
    }

    #[test]
    fn taylor_shift_matches_derivatives() {
        let p = Polynomial::from_real(&[1.0, -3.0, 0.5, 2.0]);
        let z = c(0.7, -0.2);
        let t = p.taylor_at(z);
        let (v, dv) = p.eval_with_derivative(z);
        assert!((t[0] - v).norm() < 1e-13);
        assert!((t[1] - dv).norm() < 1e-13);
        assert!((t[3] - c(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn disk_image_encloses_boundary_samples() {
        let polys = [
            Polynomial::from_real(&[0.0, 0.0, -2.0, 0.0, 1.0]),
            Polynomial::monomial(c(1.0 / 64.0, 0.0), 4),
        ];
        for p in &polys {
            let center = c(1.1, 0.4);
            let rho = 0.05;
            let (img, s) = p.disk_image(center, rho);
            for k in 0..256 {
                let z = center + Complex64::from_polar(rho, 2.0 * PI * k as f64 / 256.0);
                assert!((p.eval(z) - img).norm() <= s * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn json_shape() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[-1.0,0.0],[0.0,0.0],[1.0,0.0]]");
        let back: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
