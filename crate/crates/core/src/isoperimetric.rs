//! The Grushin isoperimetric profile and the isoperimetric set it bounds.
//!
//! `phi(x) = int_{asin x}^{pi/2} sin^(alpha+1)(t) dt` on `[0, 1]`; the set
//! `{|y| <= phi(|x|), |x| <= 1}` is the unique isoperimetric set up to
//! dilations and vertical translations.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{Alpha, SampledProfile};
use crate::quadrature::{integrate, QuadratureSpec};

/// `int_a^b t^p / sqrt(1 - t^2) dt` for `0 <= a <= b <= 1`, evaluated as
/// `int sin^p(u) du` over `[asin a, asin b]` so that the weight disappears.
pub fn arcsine_moment(p: f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(0.0 <= a && a <= b && b <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "arcsine moment needs 0 <= a <= b <= 1, got [{a}, {b}]"
        )));
    }
    integrate(|u: f64| u.sin().powf(p), a.asin(), b.asin(), &spec.regular())
}

const BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct IsoperimetricProfile {
    alpha: Alpha,
    r_alpha: f64,
    spec: QuadratureSpec,
}

impl IsoperimetricProfile {
    pub fn new(alpha: Alpha, spec: QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let p = alpha.value() + 1.0;
        let r_alpha = integrate(|t: f64| t.sin().powf(p), 0.0, FRAC_PI_2, &spec.regular())?;
        Ok(IsoperimetricProfile { alpha, r_alpha, spec })
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// `phi(0)`, the half-height of the isoperimetric set.
    pub fn r_alpha(&self) -> f64 {
        self.r_alpha
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    fn check_x(x: f64) -> Result<()> {
        if (0.0..=1.0).contains(&x) {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "x",
                value: x,
                lo: 0.0,
                hi: 1.0,
            })
        }
    }

    pub fn phi(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if x == 1.0 {
            return Ok(0.0);
        }
        if x == 0.0 {
            return Ok(self.r_alpha);
        }
        let p = self.alpha.value() + 1.0;
        integrate(|t: f64| t.sin().powf(p), x.asin(), FRAC_PI_2, &self.spec.regular())
    }

    /// `r_alpha - phi(x)`, computed directly so that it keeps full relative
    /// accuracy for small `x`.
    pub fn phi_complement(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        if x == 1.0 {
            return Ok(self.r_alpha);
        }
        let p = self.alpha.value() + 1.0;
        integrate(|t: f64| t.sin().powf(p), 0.0, x.asin(), &self.spec.regular())
    }

    /// `phi'(x) = -x^(alpha+1) / sqrt(1 - x^2)` on `[0, 1)`.
    pub fn phi_prime(&self, x: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(-x.powf(self.alpha.value() + 1.0) / (1.0 - x * x).sqrt())
    }

    /// Bisection for a strictly monotone `g` on `[0, 1]` with `g` increasing.
    fn bisect_increasing<G: Fn(f64) -> Result<f64>>(g: G, target: f64) -> Result<f64> {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if g(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The unique `x` in `[0, 1]` with `phi(x) = h`.
    pub fn phi_inverse(&self, h: f64) -> Result<f64> {
        if !(0.0..=self.r_alpha).contains(&h) {
            return Err(Error::Domain {
                what: "h",
                value: h,
                lo: 0.0,
                hi: self.r_alpha,
            });
        }
        if h == 0.0 {
            return Ok(1.0);
        }
        if h == self.r_alpha {
            return Ok(0.0);
        }
        if h <= 0.5 * self.r_alpha {
            Self::bisect_increasing(|x| self.phi(x).map(|v| -v), -h)
        } else {
            self.phi_inverse_complement(self.r_alpha - h)
        }
    }

    /// The unique `x` with `r_alpha - phi(x) = c`; accurate when `c` is tiny.
    pub fn phi_inverse_complement(&self, c: f64) -> Result<f64> {
        if !(0.0..=self.r_alpha).contains(&c) {
            return Err(Error::Domain {
                what: "c",
                value: c,
                lo: 0.0,
                hi: self.r_alpha,
            });
        }
        if c == 0.0 {
            return Ok(0.0);
        }
        if c == self.r_alpha {
            return Ok(1.0);
        }
        Self::bisect_increasing(|x| self.phi_complement(x), c)
    }

    /// `(x, phi(x))` on `samples` equally spaced points of `[0, 1]`.
    pub fn table(&self, samples: usize) -> Result<SampledProfile> {
        if samples < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 samples, got {samples}"
            )));
        }
        SampledProfile::from_fn(0.0, 1.0, samples - 1, |x| self.phi(x))
    }

    /// Dense samples of `phi` with nodes `sin(theta)`, `theta` uniform, so
    /// that the square-root behavior at `x = 1` is resolved.
    pub fn dense_profile(&self, n: usize) -> Result<SampledProfile> {
        let xs: Vec<f64> = (0..=n)
            .map(|i| {
                if i == n {
                    1.0
                } else {
                    (FRAC_PI_2 * i as f64 / n as f64).sin()
                }
            })
            .collect();
        SampledProfile::from_grid(xs, |x| self.phi(x))
    }
}

/// `P_alpha(E_alpha) = 2 int_0^pi sin^alpha(t) dt`.
pub fn isoperimetric_set_perimeter(alpha: Alpha) -> Result<f64> {
    if alpha.value() == 0.0 {
        return Ok(2.0 * PI);
    }
    let a = alpha.value();
    // symmetric about pi/2
    Ok(4.0 * integrate(|t: f64| t.sin().powf(a), 0.0, FRAC_PI_2, &QuadratureSpec::default())?)
}

/// `L^2(E_alpha) = (alpha+1)/(alpha+2) P_alpha(E_alpha)`.
pub fn isoperimetric_set_area(alpha: Alpha) -> Result<f64> {
    let a = alpha.value();
    Ok((a + 1.0) / (a + 2.0) * isoperimetric_set_perimeter(alpha)?)
}

/// The sharp constant `c(alpha)` in `L^2(E) <= c(alpha) P_alpha(E)^((alpha+2)/(alpha+1))`.
pub fn isoperimetric_constant(alpha: Alpha) -> Result<f64> {
    let a = alpha.value();
    let p = isoperimetric_set_perimeter(alpha)?;
    Ok(isoperimetric_set_area(alpha)? / p.powf((a + 2.0) / (a + 1.0)))
}

/// Isoperimetric deficit data for the set `{|y| <= f(|x|), |x| <= X}` built
/// from a profile on `[0, X]`: returns `(area, perimeter)`.
///
/// The perimeter counts four copies of the graph plus the two vertical sides
/// at `x = +-X`, whose normal is horizontal and so carries unit weight.
pub fn symmetric_set_measures(profile: &SampledProfile, alpha: Alpha, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let (x0, _) = profile.domain();
    if x0 != 0.0 {
        return Err(Error::InvalidInput(format!(
            "profile must start at x = 0, starts at {x0}"
        )));
    }
    let area = 4.0 * crate::geometry::area_under_profile(profile);
    let end = *profile.ys().last().expect("profile is nonempty");
    let per = 4.0 * crate::geometry::alpha_length_of_graph_over_x(profile, alpha, spec)? + 4.0 * end;
    Ok((area, per))
}
