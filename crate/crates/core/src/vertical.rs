//! The double bubble whose interface lies on the y-axis.
//!
//! Each bubble is the region between the profile `f` and its reflection
//! `-f`, for `0 <= x <= r`, mirrored to `x < 0`. The curvature relation
//! `f'/sqrt(f'^2 + x^(2 alpha)) = k x + 1/2` together with the area
//! constraint pins down the negative constant `k`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Alpha, SampledProfile};
use crate::quadrature::{integrate, integrate_singular, QuadratureSpec};

/// Intercept of the curvature relation.
pub const D: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
pub struct VerticalBubble {
    alpha: Alpha,
    v: f64,
    k: f64,
    r: f64,
    spec: QuadratureSpec,
}

/// JSON descriptor of a solved bubble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleDescriptor {
    pub alpha: Alpha,
    pub v: f64,
    pub k: f64,
    pub r: f64,
    pub perimeter: f64,
}

pub(crate) fn check_volume(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("area must be positive and finite, got {v}")))
    }
}

/// Solves for `k` and `r` given the area `v` of one half bubble.
pub fn solve_vertical(alpha: Alpha, v: f64, spec: QuadratureSpec) -> Result<VerticalBubble> {
    check_volume(v)?;
    spec.validate()?;
    let a = alpha.value();
    let moment = integrate_singular(
        |t: f64| t * (0.5 - t).powf(a + 1.0) / (1.0 - t * t).sqrt(),
        -1.0,
        0.5,
        &spec.with_singular(true, false),
    )?;
    let k = -(-2.0 * moment / v).powf(1.0 / (a + 2.0));
    let r = -1.5 / k;
    Ok(VerticalBubble { alpha, v, k, r, spec })
}

impl VerticalBubble {
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn d(&self) -> f64 {
        D
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if (0.0..=self.r).contains(&x) {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "x",
                value: x,
                lo: 0.0,
                hi: self.r,
            })
        }
    }

    /// `t = k x + 1/2`, the sine of the angle the profile normal makes
    /// with the vertical in the transformed plane.
    fn t_of(&self, x: f64) -> f64 {
        self.k * x + D
    }

    /// `1 + t = |k| (r - x)`, written without cancellation near `x = r`.
    fn one_plus_t(&self, x: f64) -> f64 {
        self.k.abs() * (self.r - x)
    }

    /// In the angle `w = acos(-t)` the defining integral reads
    /// `f(x) = |k|^-(alpha+1) int_0^w cos(s) (1/2 + cos(s))^alpha ds`, which
    /// has a smooth integrand and an upper limit that keeps full precision
    /// as `x -> r`.
    pub fn profile_f(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        if x == self.r {
            return Ok(0.0);
        }
        let a = self.alpha.value();
        let w = 2.0 * (0.5 * self.one_plus_t(x)).sqrt().min(1.0).asin();
        let integral = integrate(
            |s: f64| {
                let c = s.cos();
                c * (0.5 + c).max(0.0).powf(a)
            },
            0.0,
            w,
            &self.spec.regular(),
        )?;
        Ok(self.k.abs().powf(-(a + 1.0)) * integral)
    }

    /// `f'(x) = x^alpha t / sqrt(1 - t^2)`; diverges to `-inf` at `x = r`.
    pub fn profile_f_prime(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        let t = self.t_of(x);
        Ok(self.alpha.weight(x) * t / ((1.0 - t) * self.one_plus_t(x)).sqrt())
    }

    /// Location of the maximum of `f`; the profile peaks at the interface
    /// only when `alpha = 0`.
    pub fn argmax(&self) -> f64 {
        if self.alpha.value() == 0.0 {
            0.0
        } else {
            -D / self.k
        }
    }

    /// Closed-form minimum of the perimeter functional.
    pub fn min_perimeter(&self) -> Result<f64> {
        let a = self.alpha.value();
        let integral = integrate_singular(
            |t: f64| (2.0 - t) * (0.5 - t).powf(a) / (1.0 - t * t).sqrt(),
            -1.0,
            0.5,
            &self.spec.with_singular(true, false),
        )?;
        Ok(2.0 * self.k.abs().powf(-(a + 1.0)) * integral)
    }

    /// The functional `2 f(0) + 4 f(r) + 4 int_0^r sqrt(x^(2 alpha) + f'^2)`
    /// evaluated on the profile itself.
    pub fn assembled_perimeter(&self) -> Result<f64> {
        let f0 = self.profile_f(0.0)?;
        let fr = self.profile_f(self.r)?;
        let alpha = self.alpha;
        let length = integrate_singular(
            |x: f64| {
                let t = self.t_of(x);
                let fp = alpha.weight(x) * t / ((1.0 - t) * self.one_plus_t(x)).sqrt();
                let w = alpha.weight(x);
                (w * w + fp * fp).sqrt()
            },
            0.0,
            self.r,
            &self.spec.with_singular(false, true),
        )?;
        Ok(2.0 * f0 + 4.0 * fr + 4.0 * length)
    }

    /// `2 int_0^r f`, which equals `v` for the solved bubble.
    pub fn area(&self) -> Result<f64> {
        let half = integrate_singular(
            |x: f64| self.profile_f(x.clamp(0.0, self.r)).unwrap_or(f64::NAN),
            0.0,
            self.r,
            &self.spec.with_singular(false, true),
        )?;
        Ok(2.0 * half)
    }

    /// `(theta, theta_transformed)`: the angle of the profile at the
    /// interface, in the original and in the transformed plane.
    pub fn interface_angles(&self) -> (f64, f64) {
        let slope_ratio = D / (1.0 - D * D).sqrt();
        let theta = if self.alpha.value() == 0.0 {
            slope_ratio.atan()
        } else {
            0.0
        };
        (theta, slope_ratio.atan())
    }

    /// Samples of `f` on `n + 1` nodes `r sin(theta)`, `theta` uniform in
    /// `[0, pi/2]`, which concentrates points where `f'` blows up.
    pub fn dense_profile(&self, n: usize) -> Result<SampledProfile> {
        if n == 0 {
            return Err(Error::InvalidInput("need at least one interval".into()));
        }
        let xs: Vec<f64> = (0..=n)
            .map(|i| {
                if i == n {
                    self.r
                } else {
                    self.r * (FRAC_PI_2 * i as f64 / n as f64).sin()
                }
            })
            .collect();
        SampledProfile::from_grid(xs, |x| self.profile_f(x))
    }

    /// Samples of `f` on a uniform grid of `n + 1` points.
    pub fn uniform_profile(&self, n: usize) -> Result<SampledProfile> {
        SampledProfile::from_fn(0.0, self.r, n, |x| self.profile_f(x.min(self.r)))
    }

    pub fn descriptor(&self) -> Result<BubbleDescriptor> {
        Ok(BubbleDescriptor {
            alpha: self.alpha,
            v: self.v,
            k: self.k,
            r: self.r,
            perimeter: self.min_perimeter()?,
        })
    }
}

/// Minimum perimeter of the vertical-interface problem.
pub fn vertical_min_perimeter(b: &VerticalBubble) -> Result<f64> {
    b.min_perimeter()
}

/// `pi/6`, the angle both profiles make with the interface after the
/// change of variables.
pub const TRANSFORMED_ANGLE: f64 = FRAC_PI_6;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bubble(a: f64, v: f64) -> VerticalBubble {
        solve_vertical(Alpha::new(a).unwrap(), v, QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn constants_match_closed_forms() {
        let b0 = bubble(0.0, 1.0);
        let k0 = -((8.0 * PI + 3.0 * 3f64.sqrt()) / 12.0).sqrt();
        assert!((b0.k() - k0).abs() < 1e-10);
        assert!((b0.k() + 1.589_782_3).abs() < 1e-7);
        assert!((b0.r() - 0.943_525_4).abs() < 1e-7);
        let b1 = bubble(1.0, 1.0);
        let k1 = -((8.0 * PI + 9.0 * 3f64.sqrt()) / 12.0).cbrt();
        assert!((b1.k() - k1).abs() < 1e-10);
        assert!((b1.k() + 1.502_725_9).abs() < 1e-7);
        assert!((b1.k() * b1.r() + b1.d() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn profile_values() {
        let b0 = bubble(0.0, 1.0);
        let k = b0.k();
        assert!((b0.profile_f(0.0).unwrap() - 3f64.sqrt() / (2.0 * k.abs())).abs() < 1e-10);
        for i in 0..=20 {
            let x = b0.r() * i as f64 / 20.0;
            let circle = (1.0 / (k * k) - (x + 1.0 / (2.0 * k)).powi(2)).max(0.0).sqrt();
            assert!((b0.profile_f(x).unwrap() - circle).abs() < 1e-9);
        }
        let b1 = bubble(1.0, 1.0);
        let k = b1.k();
        let f0 = (FRAC_PI_2 + 0.5f64.asin() + 0.5 * 3f64.sqrt() / 2.0) / (2.0 * k * k);
        assert!((b1.profile_f(0.0).unwrap() - f0).abs() < 1e-10);
        assert!((f0 - 0.5597).abs() < 1e-4);
        assert_eq!(b1.profile_f(b1.r()).unwrap(), 0.0);
        assert!(b1.profile_f(b1.r() * 1.01).is_err());
    }

    #[test]
    fn perimeter_routes_agree() {
        for a in [0.0, 0.5, 1.0, 2.0] {
            for v in [0.5, 1.0, 2.0] {
                let b = bubble(a, v);
                let closed = b.min_perimeter().unwrap();
                let assembled = b.assembled_perimeter().unwrap();
                assert!((closed - assembled).abs() < 1e-8 * closed, "a={a} v={v}");
            }
        }
        let p = bubble(1.0, 1.0).min_perimeter().unwrap();
        let expect = (9.0 * 3f64.sqrt() + 8.0 * PI).cbrt() * 1.5f64.powf(2.0 / 3.0);
        assert!((p - expect).abs() < 1e-9);
    }

    #[test]
    fn area_constraint() {
        for a in [0.0, 1.0, 2.0] {
            let b = bubble(a, 1.5);
            assert!((b.area().unwrap() - 1.5).abs() < 1e-8);
        }
    }

    #[test]
    fn euclidean_double_bubble_by_geometry() {
        // two circular arcs of radius R cut by a chord at distance R/2 from the center
        let b = bubble(0.0, 1.0);
        let radius = 1.0 / b.k().abs();
        let chord = 3f64.sqrt() * radius;
        let arc = 2.0 * (2.0 * PI / 3.0) * radius;
        let expect = 2.0 * arc + chord;
        assert!((b.min_perimeter().unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn angles_and_slope() {
        let (t0, tt0) = bubble(0.0, 1.0).interface_angles();
        assert!((t0 - FRAC_PI_6).abs() < 1e-15);
        assert!((tt0 - FRAC_PI_6).abs() < 1e-15);
        let b1 = bubble(1.0, 1.0);
        assert_eq!(b1.interface_angles().0, 0.0);
        assert!(b1.profile_f_prime(b1.r() * (1.0 - 1e-4)).unwrap() < -10.0);
        assert!((b1.argmax() + 0.5 / b1.k()).abs() < 1e-15);
    }

    #[test]
    fn descriptor_json() {
        let d = bubble(1.0, 1.0).descriptor().unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.starts_with("{\"alpha\":1.0,\"v\":1.0,\"k\":"));
        let back: BubbleDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
