//! Adaptive Gauss–Kronrod (7/15) quadrature over Gaussian-enveloped integrands.
//!
//! Integrals are taken over a finite window `center ± range_sigmas·scale`. Vector
//! integrands share nodes, so a complex integrand is two real components with a
//! common subdivision, and the exchange integrals evaluate all their channel
//! weights in a single pass. Two-dimensional integrals are nested 1-D rules.

use crate::{Error, Result};
use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Panels the window is split into before adaptation starts. Narrow features
/// (the absorption line is ~13x narrower than the photon spectrum) must be seen
/// by at least one rule on the first pass.
const INITIAL_PANELS: usize = 16;

/// Tolerances and window for every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    /// Half-width of the integration window in units of the supplied scale.
    pub range_sigmas: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-8,
            absolute_tolerance: 1e-12,
            range_sigmas: 8.0,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) || !(self.absolute_tolerance > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be positive".into()));
        }
        if !(self.range_sigmas >= 4.0) {
            return Err(Error::Domain(format!(
                "range_sigmas must be at least 4, got {}",
                self.range_sigmas
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be positive".into()));
        }
        Ok(())
    }

    /// Same spec with both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            relative_tolerance: self.relative_tolerance * factor,
            absolute_tolerance: self.absolute_tolerance * factor,
            ..*self
        }
    }

    fn window(&self, center: f64, scale: f64) -> Result<(f64, f64)> {
        if !(scale > 0.0) || !scale.is_finite() || !center.is_finite() {
            return Err(Error::Domain(format!(
                "integration window needs finite center and positive scale, got {center}, {scale}"
            )));
        }
        let half = self.range_sigmas * scale;
        Ok((center - half, center + half))
    }
}

/// Converged integral together with its per-component error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

fn kronrod15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Panel<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);

    let fc = f(mid)?;
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let mut abs_sum = [0.0; N];
    for k in 0..N {
        kron[k] = WGK[7] * fc[k];
        gauss[k] = WG[3] * fc[k];
        abs_sum[k] = WGK[7] * fc[k].abs();
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(mid - dx)?;
        let f2 = f(mid + dx)?;
        for k in 0..N {
            let s = f1[k] + f2[k];
            kron[k] += WGK[j] * s;
            abs_sum[k] += WGK[j] * (f1[k].abs() + f2[k].abs());
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for k in 0..N {
        value[k] = kron[k] * half;
        let resabs = abs_sum[k] * half.abs();
        let roundoff = 50.0 * f64::EPSILON * resabs;
        error[k] = ((kron[k] - gauss[k]) * half).abs().max(roundoff);
        if !value[k].is_finite() {
            return Err(Error::Quadrature { estimate: value[k], error_bound: f64::INFINITY });
        }
    }
    Ok(Panel { a, b, value, error })
}

/// Adaptive vector quadrature over `[a, b]` with a fallible integrand.
///
/// Every component must satisfy `error ≤ max(abs_tol, rel_tol·|value|)`.
pub fn integrate_interval<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    spec.validate()?;
    if !(b > a) {
        return Err(Error::Domain(format!("empty integration interval [{a}, {b}]")));
    }

    let width = (b - a) / INITIAL_PANELS as f64;
    let mut panels = Vec::with_capacity(INITIAL_PANELS * 4);
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS { b } else { lo + width };
        panels.push(kronrod15(&mut f, lo, hi)?);
    }
    let min_width = (b - a) * 1e-13;

    let mut splits = 0;
    loop {
        let mut value = [0.0; N];
        let mut error = [0.0; N];
        for p in &panels {
            for k in 0..N {
                value[k] += p.value[k];
                error[k] += p.error[k];
            }
        }
        let mut tol = [0.0; N];
        let mut done = true;
        for k in 0..N {
            tol[k] = spec.absolute_tolerance.max(spec.relative_tolerance * value[k].abs());
            done &= error[k] <= tol[k];
        }
        if done {
            return Ok(Estimate { value, error });
        }

        let fail = || {
            let worst = (0..N)
                .max_by(|&i, &j| (error[i] / tol[i]).total_cmp(&(error[j] / tol[j])))
                .unwrap_or(0);
            Error::Quadrature { estimate: value[worst], error_bound: error[worst] }
        };
        if splits >= spec.max_subdivisions {
            return Err(fail());
        }

        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.b - p.a > min_width)
            .map(|(i, p)| {
                let score = (0..N).map(|k| p.error[k] / tol[k]).fold(0.0, f64::max);
                (i, score)
            })
            .max_by(|x, y| x.1.total_cmp(&y.1));
        let Some((idx, _)) = worst else {
            return Err(fail());
        };

        let p = panels.swap_remove(idx);
        let mid = 0.5 * (p.a + p.b);
        panels.push(kronrod15(&mut f, p.a, mid)?);
        panels.push(kronrod15(&mut f, mid, p.b)?);
        splits += 1;
    }
}

/// ∫ f(ω) dω over `center ± range_sigmas·scale` for a complex integrand.
pub fn integrate_1d<F>(f: F, center: f64, scale: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let (a, b) = spec.window(center, scale)?;
    let est = integrate_interval(
        |x| {
            let z = f(x);
            Ok([z.re, z.im])
        },
        a,
        b,
        spec,
    )?;
    Ok(Complex64::new(est.value[0], est.value[1]))
}

/// Vector form of [`integrate_1d`] for real components sharing nodes.
pub fn integrate_1d_vec<const N: usize, F>(
    f: F,
    center: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    let (a, b) = spec.window(center, scale)?;
    Ok(integrate_interval(|x| Ok(f(x)), a, b, spec)?.value)
}

/// Nested tensor-product quadrature over the box `centers ± range_sigmas·scales`.
///
/// The inner rule runs with tolerances tightened tenfold (and the absolute one
/// divided by the outer width) so its error does not pollute the outer estimate.
pub fn integrate_2d_vec<const N: usize, F>(
    f: F,
    centers: (f64, f64),
    scales: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<[f64; N]>
where
    F: Fn(f64, f64) -> [f64; N],
{
    let (xa, xb) = spec.window(centers.0, scales.0)?;
    let (ya, yb) = spec.window(centers.1, scales.1)?;
    let inner = QuadratureSpec {
        relative_tolerance: spec.relative_tolerance * 0.1,
        absolute_tolerance: spec.absolute_tolerance * 0.1 / (xb - xa),
        ..*spec
    };
    let est = integrate_interval(
        |x| Ok(integrate_interval(|y| Ok(f(x, y)), ya, yb, &inner)?.value),
        xa,
        xb,
        spec,
    )?;
    Ok(est.value)
}

/// ∬ f(ω, ω′) dω dω′ for a complex integrand.
pub fn integrate_2d<F>(
    f: F,
    centers: (f64, f64),
    scales: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let v = integrate_2d_vec(
        |x, y| {
            let z = f(x, y);
            [z.re, z.im]
        },
        centers,
        scales,
        spec,
    )?;
    Ok(Complex64::new(v[0], v[1]))
}

/// Normal probability density.
pub fn normal_pdf(x: f64, mean: f64, sigma: f64) -> f64 {
    let u = (x - mean) / sigma;
    (-0.5 * u * u).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}
