//! The double bubble whose interface lies on the x-axis.
//!
//! Each bubble is glued from two pieces of a dilated isoperimetric set: for
//! `0 <= y <= r` the right boundary is `x = g(y)` with
//! `g(y) = phi^-1(|h^(alpha+1) y - phi(tau)|) / h`, `tau = sqrt(3)/2`.
//! The lower piece meets the interface at `x = tau/h` and the upper piece
//! closes the bubble on the y-axis at `y = r`.

use std::f64::consts::FRAC_PI_6;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Alpha, SampledProfile};
use crate::isoperimetric::{arcsine_moment, isoperimetric_set_area, isoperimetric_set_perimeter, IsoperimetricProfile};
use crate::quadrature::{integrate, integrate_singular, QuadratureSpec};
use crate::vertical::{check_volume, solve_vertical};

/// Half-width of the interface in isoperimetric coordinates.
pub const TAU: f64 = 0.866_025_403_784_438_6;

#[derive(Debug, Clone, Copy)]
pub struct HorizontalBubble {
    alpha: Alpha,
    v: f64,
    h: f64,
    r: f64,
    shift: f64,
    iso: IsoperimetricProfile,
}

pub fn solve_horizontal(alpha: Alpha, v: f64, spec: QuadratureSpec) -> Result<HorizontalBubble> {
    check_volume(v)?;
    let iso = IsoperimetricProfile::new(alpha, spec)?;
    let a = alpha.value();
    let cap = arcsine_moment(a + 2.0, 0.0, TAU, &spec)?;
    let h = ((isoperimetric_set_area(alpha)? - 2.0 * cap) / v).powf(1.0 / (a + 2.0));
    let shift = iso.phi(TAU)?;
    let r = (iso.r_alpha() + shift) / h.powf(a + 1.0);
    Ok(HorizontalBubble {
        alpha,
        v,
        h,
        r,
        shift,
        iso,
    })
}

impl HorizontalBubble {
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn tau(&self) -> f64 {
        TAU
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `phi(tau)`, the vertical offset between the two glued pieces.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Height at which `g` attains its maximum `1/h`.
    pub fn y_hat(&self) -> f64 {
        self.shift / self.scale()
    }

    pub fn spec(&self) -> &QuadratureSpec {
        self.iso.spec()
    }

    fn scale(&self) -> f64 {
        self.h.powf(self.alpha.value() + 1.0)
    }

    fn check_y(&self, y: f64) -> Result<()> {
        if (0.0..=self.r).contains(&y) {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "y",
                value: y,
                lo: 0.0,
                hi: self.r,
            })
        }
    }

    /// `h g(y)`, the abscissa in the coordinates of the isoperimetric set.
    fn unit_x(&self, y: f64) -> Result<f64> {
        let s = self.scale();
        let y_hat = self.y_hat();
        if y <= y_hat {
            self.iso.phi_inverse((self.shift - s * y).clamp(0.0, self.shift))
        } else {
            let c = (s * (self.r - y)).clamp(0.0, self.iso.r_alpha());
            self.iso.phi_inverse_complement(c)
        }
    }

    pub fn profile_g(&self, y: f64) -> Result<f64> {
        self.check_y(y)?;
        Ok(self.unit_x(y)? / self.h)
    }

    /// `g'(y) = +-h^alpha sqrt(1 - X^2) / X^(alpha+1)` with `X = h g(y)`,
    /// positive below the maximum and negative above it.
    pub fn profile_g_prime(&self, y: f64) -> Result<f64> {
        self.check_y(y)?;
        let x = self.unit_x(y)?;
        let a = self.alpha.value();
        let magnitude = self.h.powf(a) * (1.0 - x * x).max(0.0).sqrt() / x.powf(a + 1.0);
        Ok(if y <= self.y_hat() { magnitude } else { -magnitude })
    }

    /// `g'(0) = h^alpha sqrt(1 - tau^2) / tau^(alpha+1)`, from the slope of
    /// the isoperimetric profile at `tau`.
    pub fn g_prime_at_zero(&self) -> f64 {
        let a = self.alpha.value();
        self.h.powf(a) * (1.0 - TAU * TAU).sqrt() / TAU.powf(a + 1.0)
    }

    /// `g(0)^alpha g'(0) - 1/sqrt(3)`. The product reduces to
    /// `sqrt(1 - tau^2)/tau`, independent of `h` and `alpha`.
    pub fn angle_constraint_residual(&self) -> f64 {
        (1.0 - TAU * TAU).sqrt() / TAU - 1.0 / 3f64.sqrt()
    }

    /// `arctan(g(0)^alpha g'(0))`, the interface angle after the change of
    /// variables.
    pub fn transformed_angle(&self) -> f64 {
        ((1.0 - TAU * TAU).sqrt() / TAU).atan()
    }

    pub fn min_perimeter(&self) -> Result<f64> {
        let a = self.alpha.value();
        let spec = self.spec();
        let bracket = isoperimetric_set_perimeter(self.alpha)? + TAU.powf(a + 1.0) / (a + 1.0)
            - 2.0 * arcsine_moment(a, 0.0, TAU, spec)?;
        Ok(2.0 * bracket / self.scale())
    }

    /// The functional `2 int_0^g(0) x^alpha + 4 int_0^g(r) x^alpha +
    /// 4 int_0^r sqrt(1 + g^(2 alpha) g'^2) dy`, with the arc length taken
    /// along `x` on the two monotone pieces of the profile, where the
    /// parametrization stays regular.
    pub fn assembled_perimeter(&self) -> Result<f64> {
        let a = self.alpha.value();
        let g0 = self.profile_g(0.0)?;
        let gr = self.profile_g(self.r)?;
        let caps = 2.0 * g0.powf(a + 1.0) / (a + 1.0) + 4.0 * gr.powf(a + 1.0) / (a + 1.0);
        let x_max = 1.0 / self.h;
        let spec = self.spec().with_singular(false, true);
        // dy/dx = h^-alpha phi'(h x) on either piece, up to sign
        let arc = |x: f64| -> f64 {
            let w = self.alpha.weight(x);
            match self.iso.phi_prime((self.h * x).min(1.0 - f64::EPSILON)) {
                Ok(p) => {
                    let dy = p / self.h.powf(a);
                    (w * w + dy * dy).sqrt()
                }
                Err(_) => f64::NAN,
            }
        };
        let upper = integrate_singular(arc, 0.0, x_max, &spec)?;
        let lower = integrate_singular(arc, g0, x_max, &spec)?;
        Ok(caps + 4.0 * (upper + lower))
    }

    /// `2 int_0^r g`, which equals `v` for the solved bubble.
    ///
    /// `g` has a cusp of order `2/3` at the maximum and vanishes like
    /// `(r - y)^(1/(alpha+2))` at the top; power substitutions on each piece
    /// remove both.
    pub fn area(&self) -> Result<f64> {
        let spec = QuadratureSpec {
            abs_tol: self.spec().abs_tol.max(1e-11),
            ..self.spec().regular()
        };
        let y_hat = self.y_hat();
        let mid = 0.5 * (y_hat + self.r);
        let g = |y: f64| self.profile_g(y.clamp(0.0, self.r)).unwrap_or(f64::NAN);
        let below = integrate(|w: f64| g(y_hat * (1.0 - w * w * w)) * 3.0 * w * w * y_hat, 0.0, 1.0, &spec)?;
        let len = mid - y_hat;
        let falling = integrate(|w: f64| g(y_hat + len * w * w * w) * 3.0 * w * w * len, 0.0, 1.0, &spec)?;
        let m = self.alpha.value() + 2.0;
        let top = self.r - mid;
        let closing = integrate(
            |w: f64| g(self.r - top * w.powf(m)) * m * w.powf(m - 1.0) * top,
            0.0,
            1.0,
            &spec,
        )?;
        Ok(2.0 * (below + falling + closing))
    }

    /// Samples of `g` on a uniform grid of `n + 1` heights.
    pub fn uniform_profile(&self, n: usize) -> Result<SampledProfile> {
        SampledProfile::from_fn(0.0, self.r, n, |y| self.profile_g(y.clamp(0.0, self.r)))
    }

    pub fn descriptor(&self) -> Result<HorizontalDescriptor> {
        Ok(HorizontalDescriptor {
            alpha: self.alpha,
            v: self.v,
            h: self.h,
            r: self.r,
            perimeter: self.min_perimeter()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizontalDescriptor {
    pub alpha: Alpha,
    pub v: f64,
    pub h: f64,
    pub r: f64,
    pub perimeter: f64,
}

pub fn horizontal_min_perimeter(b: &HorizontalBubble) -> Result<f64> {
    b.min_perimeter()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Vertical,
    Horizontal,
}

/// Both constrained minima for `alpha = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub alpha: u32,
    pub v: f64,
    #[serde(rename = "P_x")]
    pub p_vertical: f64,
    #[serde(rename = "P_y")]
    pub p_horizontal: f64,
    pub winner: Winner,
    pub ratio: f64,
}

pub fn compare_alpha1(v: f64) -> Result<Comparison> {
    let alpha = Alpha::new(1.0)?;
    let spec = QuadratureSpec::default();
    let p_vertical = solve_vertical(alpha, v, spec)?.min_perimeter()?;
    let p_horizontal = solve_horizontal(alpha, v, spec)?.min_perimeter()?;
    let winner = if p_horizontal < p_vertical {
        Winner::Horizontal
    } else {
        Winner::Vertical
    };
    Ok(Comparison {
        alpha: 1,
        v,
        p_vertical,
        p_horizontal,
        winner,
        ratio: p_vertical / p_horizontal,
    })
}

/// `pi/6`.
pub const TRANSFORMED_ANGLE: f64 = FRAC_PI_6;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bubble(a: f64, v: f64) -> HorizontalBubble {
        solve_horizontal(Alpha::new(a).unwrap(), v, QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn tau_constant() {
        assert_eq!(TAU, 3f64.sqrt() / 2.0);
    }

    #[test]
    fn scale_constants() {
        let b1 = bubble(1.0, 1.0);
        assert!((b1.h().powi(3) - 2.25).abs() < 1e-10);
        assert!((b1.h() - 1.310_370_7).abs() < 1e-7);
        let expect_r = (PI / 4.0 + (2.0 * PI + 3.0 * 3f64.sqrt()) / 24.0) / b1.h().powi(2);
        assert!((b1.r() - expect_r).abs() < 1e-10);
        assert!((b1.r() - 0.735_964_7).abs() < 1e-7);
        let b0 = bubble(0.0, 1.0);
        let k0 = ((8.0 * PI + 3.0 * 3f64.sqrt()) / 12.0).sqrt();
        assert!((b0.h() - k0).abs() < 1e-10);
    }

    #[test]
    fn profile_values() {
        let b = bubble(1.0, 1.0);
        assert!((b.profile_g(0.0).unwrap() - TAU / b.h()).abs() < 1e-11);
        assert!((b.profile_g(0.0).unwrap() - 0.660_901_1).abs() < 1e-7);
        assert!((b.y_hat() - 0.278_559_0).abs() < 1e-7);
        assert!((b.profile_g(b.y_hat()).unwrap() - 1.0 / b.h()).abs() < 1e-11);
        assert!(b.profile_g(b.r()).unwrap().abs() < 1e-11);
        assert!(b.profile_g(-1e-3).is_err());
    }

    #[test]
    fn angle_constraint() {
        let b = bubble(1.0, 1.0);
        assert!(b.angle_constraint_residual().abs() < 1e-12);
        assert!((b.g_prime_at_zero() - (2.0f64 / 3.0).cbrt()).abs() < 1e-10);
        let g0 = b.profile_g(0.0).unwrap();
        assert!((g0 * b.g_prime_at_zero() - 1.0 / 3f64.sqrt()).abs() < 1e-10);
        assert!((b.transformed_angle() - FRAC_PI_6).abs() < 1e-15);
    }

    #[test]
    fn perimeter_routes_agree() {
        for a in [0.0, 0.5, 1.0, 2.0] {
            for v in [0.5, 1.0, 2.0] {
                let b = bubble(a, v);
                let closed = b.min_perimeter().unwrap();
                let assembled = b.assembled_perimeter().unwrap();
                assert!((closed - assembled).abs() < 1e-7 * closed, "a={a} v={v}: {closed} {assembled}");
            }
        }
        let p = bubble(1.0, 1.0).min_perimeter().unwrap();
        assert!((p - 3.0 * 1.5f64.powf(2.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn area_constraint() {
        for a in [0.0, 1.0, 2.0] {
            let b = bubble(a, 0.7);
            let area = b.area().unwrap();
            assert!((area - 0.7).abs() < 1e-7, "a={a}: {area}");
        }
    }

    #[test]
    fn euclidean_cases_coincide() {
        let pv = solve_vertical(Alpha::new(0.0).unwrap(), 1.0, QuadratureSpec::default())
            .unwrap()
            .min_perimeter()
            .unwrap();
        let ph = bubble(0.0, 1.0).min_perimeter().unwrap();
        assert!((pv - ph).abs() < 1e-9);
    }

    #[test]
    fn comparison() {
        let c = compare_alpha1(1.0).unwrap();
        assert_eq!(c.winner, Winner::Horizontal);
        assert!((c.ratio - (9.0 * 3f64.sqrt() + 8.0 * PI).cbrt() / 3.0).abs() < 1e-9);
        let c8 = compare_alpha1(8.0).unwrap();
        assert!((c8.p_vertical / c.p_vertical - 4.0).abs() < 1e-9);
        assert!((c8.p_horizontal / c.p_horizontal - 4.0).abs() < 1e-9);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"P_x\":") && json.contains("\"winner\":\"horizontal\""));
    }
}
