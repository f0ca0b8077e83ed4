//! Adaptive one-dimensional quadrature.
//!
//! The base rule is the 7-point Gauss / 15-point Kronrod pair applied with
//! global adaptive bisection: the interval with the largest error estimate is
//! split until the summed estimate meets the requested tolerance. Every node
//! of the pair lies strictly inside its panel, so integrands are never
//! evaluated at the endpoints of `[a, b]`.
//!
//! Integrands carrying an inverse square root at an endpoint are handled by
//! [`integrate_singular`], which removes the singularity with a trigonometric
//! change of variables before handing the smooth integrand to [`integrate`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Tolerances and endpoint flags shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// The integrand behaves like `1/sqrt(t - a)` near `a`.
    pub singular_left: bool,
    /// The integrand behaves like `1/sqrt(b - t)` near `b`.
    pub singular_right: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 10_000,
            singular_left: false,
            singular_right: false,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
            ..Default::default()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::InvalidInput(format!(
                "quadrature tolerances must be positive (abs_tol = {}, rel_tol = {}, max_subdivisions = {})",
                self.abs_tol, self.rel_tol, self.max_subdivisions
            )));
        }
        Ok(())
    }

    pub fn with_singular(self, left: bool, right: bool) -> Self {
        QuadratureSpec {
            singular_left: left,
            singular_right: right,
            ..self
        }
    }

    pub fn regular(self) -> Self {
        self.with_singular(false, false)
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[allow(clippy::excessive_precision)]
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

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> Result<f64> {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { t, value: v })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol * |I|)`.
///
/// Endpoint flags in `spec` are ignored here; see [`integrate_singular`].
/// A reversed interval yields the negated integral.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, spec).map(|v| -v);
    }

    let first = gauss_kronrod(&f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // Panels too narrow to split any further still count towards the error.
    let mut frozen_err = 0.0;
    let mut subdivisions = 1;

    loop {
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        let width = worst.b - worst.a;
        if subdivisions >= spec.max_subdivisions
            || width <= 4.0 * f64::EPSILON * (worst.a.abs() + worst.b.abs()).max(f64::MIN_POSITIVE)
        {
            if subdivisions >= spec.max_subdivisions {
                heap.push(worst);
                break;
            }
            frozen_err += worst.error;
            continue;
        }
        let left = gauss_kronrod(&f, worst.a, mid)?;
        let right = gauss_kronrod(&f, mid, worst.b)?;
        subdivisions += 1;
        total += left.value + right.value - worst.value;
        heap.push(left);
        heap.push(right);
        total_err = frozen_err + heap.iter().map(|p| p.error).sum::<f64>();
    }

    // Re-sum to shed the drift accumulated by the incremental updates.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error = frozen_err + heap.iter().map(|p| p.error).sum::<f64>();
    if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
        return Ok(value);
    }
    Err(Error::NonConvergence {
        a,
        b,
        error,
        subdivisions,
    })
}

/// Integrates `f` over `[a, b]` where `f` may carry `1/sqrt(distance)`
/// singularities at the endpoints flagged in `spec`.
///
/// The flagged endpoints are mapped away with `t = a + (b - a) sin^2(u)`
/// (both ends), `t = a + (b - a) sin(u)` (right end) or
/// `t = a + (b - a)(1 - cos(u))` (left end), `u` in `[0, pi/2]`. Each map has
/// a vanishing Jacobian of exactly the right order at the flagged ends, so the
/// transformed integrand is bounded there.
pub fn integrate_singular<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        let flipped = spec.with_singular(spec.singular_right, spec.singular_left);
        return integrate_singular(f, b, a, &flipped).map(|v| -v);
    }
    let len = b - a;
    let inner = spec.regular();
    match (spec.singular_left, spec.singular_right) {
        (false, false) => integrate(f, a, b, &inner),
        (true, true) => integrate(
            |u: f64| {
                let (s, c) = u.sin_cos();
                f(a + len * s * s) * 2.0 * len * s * c
            },
            0.0,
            FRAC_PI_2,
            &inner,
        ),
        (false, true) => integrate(
            |u: f64| {
                let (s, c) = u.sin_cos();
                // b - t = len (1 - sin u), written to avoid cancellation near u = pi/2.
                let t = b - len * (c * c) / (1.0 + s);
                f(t) * len * c
            },
            0.0,
            FRAC_PI_2,
            &inner,
        ),
        (true, false) => integrate(
            |u: f64| {
                let (s, c) = u.sin_cos();
                // t - a = len (1 - cos u)
                let t = a + len * (s * s) / (1.0 + c);
                f(t) * len * s
            },
            0.0,
            FRAC_PI_2,
            &inner,
        ),
    }
}

/// Integrates `f` over `[a, b]` when `f` grows like `(t - a)^(-p)` near `a`
/// with `0 <= p < 1`; the substitution `t = a + (b - a) w^m`, `m = 1/(1 - p)`,
/// makes the integrand bounded.
pub fn integrate_algebraic_left<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    exponent: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(0.0..1.0).contains(&exponent) {
        return Err(Error::InvalidInput(format!(
            "endpoint exponent must lie in [0, 1), got {exponent}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let m = 1.0 / (1.0 - exponent);
    let len = b - a;
    integrate(
        |w: f64| f(a + len * w.powf(m)) * len * m * w.powf(m - 1.0),
        0.0,
        1.0,
        &spec.regular(),
    )
}
