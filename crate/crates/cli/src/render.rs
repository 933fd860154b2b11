use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use toruseq::spectral::Eigenfunction;

/// `|ψ|²` restricted to the plane `x₃ = … = 0` and sampled on the grid
/// `x = 2π(j, i)/n`; row `i` holds `x₂ = 2πi/n`.
pub struct IntensityField {
    pub n: usize,
    pub values: Vec<f64>,
    /// Sum of `|C(a, b)|²` over the frequencies of the restriction. The grid
    /// mean equals it whenever `n` exceeds every frequency difference.
    pub spectral_mass: f64,
    /// Largest `|a|` or `|b|` among those frequencies.
    pub max_frequency: i64,
}

impl IntensityField {
    pub fn max(&self) -> (f64, usize, usize) {
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for (k, &v) in self.values.iter().enumerate() {
            if v > best.0 {
                best = (v, k % self.n, k / self.n);
            }
        }
        best
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// True when the grid resolves every frequency difference, so the mean
    /// is exactly the spectral mass.
    pub fn resolved(&self) -> bool {
        (2 * self.max_frequency as u64) < self.n as u64
    }
}

/// Separable evaluation: collapse the coefficients onto `(μ₁, μ₂)`, sum over
/// `μ₂` once per row, then over `μ₁` once per pixel.
pub fn intensity_field(psi: &Eigenfunction, n: usize) -> IntensityField {
    let mut planar: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
    for (mu, c) in psi.modes() {
        let s = mu.as_slice();
        *planar.entry((s[0], s[1])).or_default() += c;
    }
    let spectral_mass = planar.values().map(|c| c.norm_sqr()).sum();
    let max_frequency = planar.keys().map(|&(a, b)| a.abs().max(b.abs())).max().unwrap_or(0);

    let firsts: Vec<i64> = {
        let mut v: Vec<i64> = planar.keys().map(|k| k.0).collect();
        v.dedup();
        v
    };
    let phase = |k: i64, j: usize| {
        // reduce mod n before scaling so large frequencies keep full accuracy
        let r = (k.rem_euclid(n as i64) as u64 * j as u64) % n as u64;
        Complex64::cis(2.0 * PI * r as f64 / n as f64)
    };
    let col_phase: Vec<Vec<Complex64>> = firsts
        .iter()
        .map(|&a| (0..n).map(|j| phase(a, j)).collect())
        .collect();

    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut inner = vec![Complex64::new(0.0, 0.0); firsts.len()];
            for (&(a, b), &c) in &planar {
                let k = firsts.binary_search(&a).expect("first coordinate listed");
                inner[k] += c * phase(b, i);
            }
            let col_phase = &col_phase;
            (0..n).map(move |j| {
                inner
                    .iter()
                    .zip(col_phase)
                    .map(|(g, row)| g * row[j])
                    .sum::<Complex64>()
                    .norm_sqr()
            })
        })
        .collect();
    IntensityField {
        n,
        values,
        spectral_mass,
        max_frequency,
    }
}

const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

/// Piecewise-linear perceptual colormap on `[0, 1]`.
pub fn color(t: f64) -> [u8; 3] {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let x = t * (STOPS.len() - 1) as f64;
    let k = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - k as f64;
    let mut out = [0u8; 3];
    for (ch, o) in out.iter_mut().enumerate() {
        *o = (STOPS[k][ch] + f * (STOPS[k + 1][ch] - STOPS[k][ch])).round() as u8;
    }
    out
}

/// Binary PPM (P6) with intensities scaled by `vmax`.
pub fn ppm(field: &IntensityField, vmax: f64) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", field.n, field.n).into_bytes();
    out.reserve(3 * field.values.len());
    for &v in &field.values {
        out.extend_from_slice(&color(if vmax > 0.0 { v / vmax } else { 0.0 }));
    }
    out
}

/// Vertical colorbar from 0 (bottom) to `vmax` (top).
pub fn colorbar_svg(vmax: f64) -> String {
    let mut s = String::new();
    s.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"90\" height=\"320\" viewBox=\"0 0 90 320\">\n",
    );
    s.push_str("  <defs>\n    <linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n");
    for k in 0..=20 {
        let t = k as f64 / 20.0;
        let [r, g, b] = color(t);
        let _ = writeln!(
            s,
            "      <stop offset=\"{t:.2}\" stop-color=\"#{r:02x}{g:02x}{b:02x}\"/>"
        );
    }
    s.push_str("    </linearGradient>\n  </defs>\n");
    s.push_str("  <rect x=\"10\" y=\"10\" width=\"24\" height=\"300\" fill=\"url(#scale)\" stroke=\"black\"/>\n");
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let y = 310.0 - 300.0 * t;
        let _ = writeln!(
            s,
            "  <line x1=\"34\" y1=\"{y}\" x2=\"40\" y2=\"{y}\" stroke=\"black\"/>\n  <text x=\"44\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            y + 4.0,
            trim(t * vmax)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn trim(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" { "0".into() } else { s.into() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use toruseq::constructions::theorem31_family;

    #[test]
    fn stripe_field_peaks_at_origin() {
        let psi = theorem31_family(10, 2).unwrap();
        let f = intensity_field(&psi, 128);
        let (max, j, i) = f.max();
        assert!((max - 4.0).abs() < 1e-12);
        assert_eq!((j, i), (0, 0));
        assert!(f.resolved());
        assert!((f.mean() - 1.0).abs() < 1e-12);
        // direct evaluation at an arbitrary pixel
        let x = [2.0 * PI * 37.0 / 128.0, 2.0 * PI * 5.0 / 128.0];
        assert!((f.values[5 * 128 + 37] - psi.intensity(&x)).abs() < 1e-12);
    }

    #[test]
    fn colormap_ends_and_header() {
        assert_eq!(color(0.0), [68, 1, 84]);
        assert_eq!(color(1.0), [253, 231, 37]);
        assert_eq!(color(2.0), color(1.0));
        let psi = theorem31_family(1, 2).unwrap();
        let img = ppm(&intensity_field(&psi, 8), 4.0);
        assert!(img.starts_with(b"P6\n8 8\n255\n"));
        assert_eq!(img.len(), 11 + 3 * 64);
        assert!(colorbar_svg(4.0).contains(">4</text>"));
    }
}
