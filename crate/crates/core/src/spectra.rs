//! Gaussian-broadened density of states and optical absorption spectra.

use std::io::Write;

use num_complex::Complex64;

use crate::eigensystem::PositiveEigensystem;
use crate::error::{BseError, Result};
use crate::par;

/// Broadening width used when none is given.
pub const DEFAULT_SIGMA: f64 = 5e-4;
/// Number of points in [`default_grid`].
pub const DEFAULT_GRID_POINTS: usize = 2001;
/// Gaussian terms are dropped beyond this many standard deviations.
/// `exp(-81/2) < 3e-18`, below one ulp of the peak value.
pub const TRUNCATION_SIGMAS: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Dos,
    Absorption,
}

/// Sampled spectrum; `omegas` strictly increasing, same length as `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    pub sigma: f64,
    pub kind: SpectrumKind,
}

impl SpectrumCurve {
    /// Trapezoidal integral of the curve over its grid.
    pub fn trapezoid(&self) -> f64 {
        self.omegas
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1]))
            .sum()
    }

    /// Writes `omega,value` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "omega,value")?;
        for (w, v) in self.omegas.iter().zip(&self.values) {
            writeln!(out, "{w:.16e},{v:.16e}")?;
        }
        Ok(())
    }
}

/// Unit-mass Gaussian density with standard deviation `sigma`.
pub fn gaussian(x: f64, sigma: f64) -> f64 {
    let t = x / sigma;
    (-0.5 * t * t).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

fn check_grid(grid: &[f64], sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(BseError::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    if grid.iter().any(|w| !w.is_finite()) {
        return Err(BseError::NonFinite("frequency grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(BseError::InvalidArgument("frequency grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `Σ_j weight_j N(ω - centre_j; σ)` at every grid point, with `terms` sorted by centre.
fn broaden(terms: &[(f64, f64)], grid: &[f64], sigma: f64) -> Vec<f64> {
    let reach = TRUNCATION_SIGMAS * sigma;
    par::map_slice(grid, |&w| {
        let lo = terms.partition_point(|t| t.0 < w - reach);
        let hi = terms.partition_point(|t| t.0 <= w + reach);
        terms[lo..hi].iter().map(|&(c, wt)| wt * gaussian(w - c, sigma)).sum()
    })
}

/// `φ(ω) = (1/m) Σ_j N(ω - λ_j; σ)` over all `m` eigenvalues.
pub fn spectral_density(lambda: &[f64], grid: &[f64], sigma: f64) -> Result<SpectrumCurve> {
    if lambda.is_empty() {
        return Err(BseError::InvalidArgument("empty spectrum".into()));
    }
    if lambda.iter().any(|l| !l.is_finite()) {
        return Err(BseError::NonFinite("eigenvalues".into()));
    }
    check_grid(grid, sigma)?;
    let weight = 1.0 / lambda.len() as f64;
    let mut terms: Vec<(f64, f64)> = lambda.iter().map(|&l| (l, weight)).collect();
    terms.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(SpectrumCurve {
        omegas: grid.to_vec(),
        values: broaden(&terms, grid, sigma),
        sigma,
        kind: SpectrumKind::Dos,
    })
}

/// `points` uniform samples over `[min λ - 10σ, max λ + 10σ]`.
pub fn default_grid(lambda: &[f64], sigma: f64, points: usize) -> Result<Vec<f64>> {
    if lambda.is_empty() {
        return Err(BseError::InvalidArgument("empty spectrum".into()));
    }
    if points < 2 {
        return Err(BseError::InvalidArgument("a grid needs at least two points".into()));
    }
    let lo = lambda.iter().copied().fold(f64::INFINITY, f64::min) - 10.0 * sigma;
    let hi = lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 10.0 * sigma;
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|k| if k == points - 1 { hi } else { lo + step * k as f64 }).collect())
}

/// Dipole vectors of length `2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleData {
    pub d_r: Vec<Complex64>,
    pub d_l: Vec<Complex64>,
}

impl DipoleData {
    pub fn new(d_r: Vec<Complex64>, d_l: Vec<Complex64>) -> Result<Self> {
        if d_r.len() != d_l.len() {
            return Err(BseError::DimensionMismatch(format!(
                "dipole vectors have lengths {} and {}",
                d_r.len(),
                d_l.len()
            )));
        }
        if d_r.iter().chain(&d_l).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(BseError::NonFinite("dipole vectors".into()));
        }
        Ok(Self { d_r, d_l })
    }
}

/// Absorption curve together with per-excitation diagnostics.
#[derive(Debug, Clone)]
pub struct Absorption {
    pub curve: SpectrumCurve,
    /// `(d_rᴴx_j)(y_jᴴd_l)/(y_jᴴx_j)` per positive eigenvalue.
    pub weights: Vec<Complex64>,
    /// `max_j |y_jᴴx_j - 1|`.
    pub normalization_deviation: f64,
}

/// Smallest admissible `|y_jᴴx_j|`.
pub const MIN_PAIRING: f64 = 1e-8;

/// `ε⁺(ω) = Re Σ_j w_j N(ω - λ_j; σ)` with oscillator strengths
/// `w_j = (d_rᴴx_j)(y_jᴴd_l)/(y_jᴴx_j)`, `x_j = [X₁; X₂]e_j`, `y_j = [X₁; -X₂]e_j`.
pub fn absorption_spectrum(
    pos: &PositiveEigensystem,
    dip: &DipoleData,
    grid: &[f64],
    sigma: f64,
) -> Result<Absorption> {
    let n = pos.n();
    if dip.d_r.len() != 2 * n {
        return Err(BseError::DimensionMismatch(format!(
            "dipoles have length {}, eigensystem needs {}",
            dip.d_r.len(),
            2 * n
        )));
    }
    check_grid(grid, sigma)?;
    let mut weights = Vec::with_capacity(n);
    let mut deviation = 0.0f64;
    for j in 0..n {
        let (x1, x2) = (pos.x1.col(j), pos.x2.col(j));
        let mut drx = Complex64::new(0.0, 0.0);
        let mut ydl = Complex64::new(0.0, 0.0);
        let mut yx = Complex64::new(0.0, 0.0);
        for i in 0..n {
            drx += dip.d_r[i].conj() * x1[i] + dip.d_r[i + n].conj() * x2[i];
            ydl += x1[i].conj() * dip.d_l[i] - x2[i].conj() * dip.d_l[i + n];
            yx += x1[i].norm_sqr() - x2[i].norm_sqr();
        }
        if yx.norm() < MIN_PAIRING {
            return Err(BseError::Structure(format!(
                "|y_jᴴx_j| = {:e} for excitation {j}: eigensystem is not consistently normalized",
                yx.norm()
            )));
        }
        deviation = deviation.max((yx - 1.0).norm());
        weights.push(drx * ydl / yx);
    }
    let mut terms: Vec<(f64, f64)> = pos.lambda_plus.iter().zip(&weights).map(|(&l, w)| (l, w.re)).collect();
    terms.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(Absorption {
        curve: SpectrumCurve {
            omegas: grid.to_vec(),
            values: broaden(&terms, grid, sigma),
            sigma,
            kind: SpectrumKind::Absorption,
        },
        weights,
        normalization_deviation: deviation,
    })
}

/// `λ_j(A) ≥ λ_j(H) - 10⁻¹² max(|λ|)` for every `j`; both inputs sorted descending.
pub fn dos_dominance(lambda_h: &[f64], lambda_a: &[f64]) -> Result<bool> {
    if lambda_h.len() != lambda_a.len() {
        return Err(BseError::DimensionMismatch(format!(
            "spectra have lengths {} and {}",
            lambda_h.len(),
            lambda_a.len()
        )));
    }
    let scale = lambda_h.iter().chain(lambda_a).fold(0.0f64, |s, v| s.max(v.abs()));
    let tol = 1e-12 * scale;
    Ok(lambda_h.iter().zip(lambda_a).all(|(h, a)| *a >= h - tol))
}
