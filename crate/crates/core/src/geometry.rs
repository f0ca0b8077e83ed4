//! Grushin-plane primitives on graph-described sets.
//!
//! Sets are never rasterized: every set handled here is the region under (or
//! beside) a piecewise-linear profile, and every length or area is assembled
//! segment by segment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_algebraic_left, QuadratureSpec};

/// The Grushin exponent; `0` is the Euclidean plane.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Alpha(f64);

impl Alpha {
    pub const EUCLIDEAN: Alpha = Alpha(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::Domain {
                what: "alpha",
                value,
                lo: 0.0,
                hi: f64::INFINITY,
            })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `|x|^alpha`, with `0^0 = 1`.
    #[inline]
    pub fn weight(self, x: f64) -> f64 {
        if self.0 == 0.0 {
            1.0
        } else {
            x.abs().powf(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Alpha::new(v).map_err(serde::de::Error::custom)
    }
}

/// A point, either in Grushin coordinates `(x, y)` or in the transformed
/// plane `(xi, eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// A nonnegative function sampled on a strictly increasing grid and
/// interpolated linearly between samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledProfile {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

#[derive(Deserialize)]
struct RawProfile {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl<'de> Deserialize<'de> for SampledProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawProfile::deserialize(d)?;
        SampledProfile::new(raw.xs, raw.ys).map_err(serde::de::Error::custom)
    }
}

impl SampledProfile {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidInput(format!(
                "profile has {} abscissae but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidInput(
                "profile needs at least two samples".into(),
            ));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("profile samples must be finite".into()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "profile abscissae must be strictly increasing".into(),
            ));
        }
        if let Some(y) = ys.iter().find(|&&y| y < 0.0) {
            return Err(Error::InvalidInput(format!(
                "profile values must be nonnegative, found {y}"
            )));
        }
        Ok(SampledProfile { xs, ys })
    }

    /// Samples `f` on `n + 1` equally spaced points of `[a, b]`.
    pub fn from_fn<F: FnMut(f64) -> Result<f64>>(a: f64, b: f64, n: usize, mut f: F) -> Result<Self> {
        if n == 0 || !(a < b) {
            return Err(Error::InvalidInput(format!(
                "cannot sample [{a}, {b}] with {n} segments"
            )));
        }
        let h = (b - a) / n as f64;
        let xs: Vec<f64> = (0..=n)
            .map(|i| if i == n { b } else { a + h * i as f64 })
            .collect();
        let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        SampledProfile::new(xs, ys)
    }

    /// Samples `f` on an explicit grid.
    pub fn from_grid<F: FnMut(f64) -> Result<f64>>(xs: Vec<f64>, mut f: F) -> Result<Self> {
        let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        SampledProfile::new(xs, ys)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Iterates over `(x0, x1, y0, y1)` for each linear piece.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (x[0], x[1], y[0], y[1]))
    }

    /// Linear interpolation; `None` outside the domain.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&x) {
            return None;
        }
        let i = match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => return Some(self.ys[i]),
            Err(i) => i - 1,
        };
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        Some(self.ys[i] + t * (self.ys[i + 1] - self.ys[i]))
    }

    /// The image under the anisotropic dilation: `x -> lambda x`,
    /// values `-> lambda^(alpha+1)` values.
    pub fn dilate(&self, lambda: f64, alpha: Alpha) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::NonPositiveLambda(lambda));
        }
        let sy = lambda.powf(alpha.value() + 1.0);
        SampledProfile::new(
            self.xs.iter().map(|x| x * lambda).collect(),
            self.ys.iter().map(|y| y * sy).collect(),
        )
    }

    /// Mirror image `x -> -x` (the grid is reversed to stay increasing).
    pub fn reflect(&self) -> Self {
        SampledProfile {
            xs: self.xs.iter().rev().map(|x| -x).collect(),
            ys: self.ys.iter().rev().copied().collect(),
        }
    }

    pub fn shift_values(&self, c: f64) -> Result<Self> {
        SampledProfile::new(self.xs.clone(), self.ys.iter().map(|y| y + c).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Two-column CSV with header `x,y`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in self.xs.iter().zip(&self.ys) {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('x')) {
                continue;
            }
            let mut cols = line.split(',');
            let mut next = |name: &str| -> Result<f64> {
                let field = cols.next().ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    column: 1,
                    message: format!("missing {name} column"),
                })?;
                field.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    column: 1,
                    message: format!("bad {name} value {field:?}: {e}"),
                })
            };
            xs.push(next("x")?);
            ys.push(next("y")?);
        }
        SampledProfile::new(xs, ys)
    }
}

/// `int_a^b |x|^alpha dx` in closed form.
pub fn weight_integral(a: f64, b: f64, alpha: Alpha) -> f64 {
    let p = alpha.value() + 1.0;
    let prim = |x: f64| x.signum() * x.abs().powf(p) / p;
    prim(b) - prim(a)
}

/// `int_x0^x1 sqrt(|x|^(2 alpha) + s^2) dx` for a single linear piece.
fn segment_length_over_x(x0: f64, x1: f64, slope: f64, alpha: Alpha, spec: &QuadratureSpec) -> Result<f64> {
    if alpha.value() == 0.0 {
        return Ok((x1 - x0) * slope.hypot(1.0));
    }
    if slope == 0.0 {
        return Ok(weight_integral(x0, x1, alpha));
    }
    if x0 < 0.0 && x1 > 0.0 {
        return Ok(segment_length_over_x(x0, 0.0, slope, alpha, spec)?
            + segment_length_over_x(0.0, x1, slope, alpha, spec)?);
    }
    integrate(|x| alpha.weight(x).hypot(slope), x0, x1, spec)
}

/// Grushin length `int_D sqrt(|x|^(2 alpha) + phi'(x)^2) dx` of the graph
/// `y = phi(x)`.
pub fn alpha_length_of_graph_over_x(profile: &SampledProfile, alpha: Alpha, spec: &QuadratureSpec) -> Result<f64> {
    profile
        .segments()
        .map(|(x0, x1, y0, y1)| segment_length_over_x(x0, x1, (y1 - y0) / (x1 - x0), alpha, spec))
        .sum()
}

/// Grushin length `int_D sqrt(1 + |psi(y)|^(2 alpha) psi'(y)^2) dy` of the
/// graph `x = psi(y)`; the profile's abscissae are the `y` values.
pub fn alpha_length_of_graph_over_y(profile: &SampledProfile, alpha: Alpha, spec: &QuadratureSpec) -> Result<f64> {
    profile
        .segments()
        .map(|(y0, y1, p0, p1)| {
            let slope = (p1 - p0) / (y1 - y0);
            if slope == 0.0 {
                Ok(y1 - y0)
            } else if alpha.value() == 0.0 {
                Ok((y1 - y0) * slope.hypot(1.0))
            } else {
                integrate(
                    |y| {
                        let psi = p0 + slope * (y - y0);
                        (alpha.weight(psi) * slope).hypot(1.0)
                    },
                    y0,
                    y1,
                    spec,
                )
            }
        })
        .sum()
}

/// Lebesgue measure of the subgraph; exact for piecewise-linear data.
pub fn area_under_profile(profile: &SampledProfile) -> f64 {
    profile
        .segments()
        .map(|(x0, x1, y0, y1)| 0.5 * (x1 - x0) * (y0 + y1))
        .sum()
}

/// The intrinsic dilation `(x, y) -> (lambda x, lambda^(alpha+1) y)`.
pub fn dilate(p: Point, lambda: f64, alpha: Alpha) -> Result<Point> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveLambda(lambda));
    }
    Ok(Point::new(lambda * p.x, lambda.powf(alpha.value() + 1.0) * p.y))
}

/// First component of the map to the transformed plane,
/// `sgn(x) |x|^(alpha+1) / (alpha+1)`.
#[inline]
pub fn xi_of_x(x: f64, alpha: Alpha) -> f64 {
    let p = alpha.value() + 1.0;
    x.signum() * x.abs().powf(p) / p
}

/// Inverse of [`xi_of_x`]: `sgn(xi) |(alpha+1) xi|^(1/(alpha+1))`.
#[inline]
pub fn x_of_xi(xi: f64, alpha: Alpha) -> f64 {
    let p = alpha.value() + 1.0;
    xi.signum() * (p * xi.abs()).powf(1.0 / p)
}

/// Grushin plane to transformed plane.
pub fn to_transformed(p: Point, alpha: Alpha) -> Point {
    Point::new(xi_of_x(p.x, alpha), p.y)
}

/// Transformed plane back to the Grushin plane.
pub fn from_transformed(p: Point, alpha: Alpha) -> Point {
    Point::new(x_of_xi(p.x, alpha), p.y)
}

/// Weight `|(alpha+1) xi|^(-alpha/(alpha+1))` of the pushed-forward Lebesgue
/// measure.
#[inline]
pub fn transformed_density(xi: f64, alpha: Alpha) -> f64 {
    let p = alpha.value() + 1.0;
    (p * xi.abs()).powf(-alpha.value() / p)
}

/// Weighted area `int profile(xi) |(alpha+1) xi|^(-alpha/(alpha+1)) dxi` of the
/// subgraph of a profile given in transformed coordinates.
///
/// Each linear piece `c0 + c1 xi` is integrated exactly: the density has
/// primitive `x_of_xi` and `xi` times the density has primitive
/// `(alpha+1)^(-beta) |xi|^(2-beta) / (2-beta)`, `beta = alpha/(alpha+1)`.
pub fn weighted_area_of_transformed_profile(profile: &SampledProfile, alpha: Alpha) -> f64 {
    let p = alpha.value() + 1.0;
    let beta = alpha.value() / p;
    // Primitives on xi >= 0.
    let w0 = |xi: f64| x_of_xi(xi, alpha);
    let w1 = |xi: f64| p.powf(-beta) * xi.powf(2.0 - beta) / (2.0 - beta);
    let piece = |a: f64, b: f64, ya: f64, yb: f64| -> f64 {
        // 0 <= a < b
        let c1 = (yb - ya) / (b - a);
        let c0 = ya - c1 * a;
        c0 * (w0(b) - w0(a)) + c1 * (w1(b) - w1(a))
    };
    profile
        .segments()
        .map(|(a, b, ya, yb)| {
            if a >= 0.0 {
                piece(a, b, ya, yb)
            } else if b <= 0.0 {
                piece(-b, -a, yb, ya)
            } else {
                let y0 = ya + (yb - ya) * (-a) / (b - a);
                piece(0.0, -a, y0, ya) + piece(0.0, b, y0, yb)
            }
        })
        .sum()
}

/// Lebesgue area of the Grushin set whose image in the transformed plane is
/// the subgraph of `profile`, computed by quadrature in the original `x`.
pub fn pulled_back_area(profile: &SampledProfile, alpha: Alpha, spec: &QuadratureSpec) -> Result<f64> {
    profile
        .segments()
        .map(|(a, b, ya, yb)| {
            let c1 = (yb - ya) / (b - a);
            integrate(
                |x| ya + c1 * (xi_of_x(x, alpha) - a),
                x_of_xi(a, alpha),
                x_of_xi(b, alpha),
                spec,
            )
        })
        .sum()
}

/// The image of a Grushin profile `y = phi(x)` in the transformed plane,
/// `eta(xi) = phi(x_of_xi(xi))`. It is no longer piecewise linear in `xi`.
#[derive(Debug, Clone)]
pub struct PushedProfile {
    source: SampledProfile,
    alpha: Alpha,
}

/// Pushes a Grushin profile forward to the transformed plane.
pub fn push_forward(profile: &SampledProfile, alpha: Alpha) -> PushedProfile {
    PushedProfile {
        source: profile.clone(),
        alpha,
    }
}

impl PushedProfile {
    pub fn breakpoints(&self) -> Vec<f64> {
        self.source.xs().iter().map(|&x| xi_of_x(x, self.alpha)).collect()
    }

    pub fn eval(&self, xi: f64) -> Option<f64> {
        self.source.eval(x_of_xi(xi, self.alpha))
    }

    /// Integrates `g(xi, eta(xi), deta/dxi)` piece by piece in `xi`. Pieces
    /// ending at `xi = 0` carry an integrable `|xi|^(-alpha/(alpha+1))`
    /// singularity, removed by a power substitution.
    fn integrate_pieces<G>(&self, g: G, spec: &QuadratureSpec) -> Result<f64>
    where
        G: Fn(f64, f64, f64) -> f64,
    {
        let alpha = self.alpha;
        let exponent = alpha.value() / (alpha.value() + 1.0);
        let mut total = 0.0;
        for (x0, x1, y0, y1) in self.source.segments() {
            let slope = (y1 - y0) / (x1 - x0);
            let mut pieces = vec![(x0, x1)];
            if x0 < 0.0 && x1 > 0.0 {
                pieces = vec![(x0, 0.0), (0.0, x1)];
            }
            for (a, b) in pieces {
                let ya = y0 + slope * (a - x0);
                let integrand = |xi: f64| {
                    let x = x_of_xi(xi, alpha);
                    let eta = ya + slope * (x - a);
                    let deta = slope / alpha.weight(x);
                    g(xi, eta, deta)
                };
                let (xa, xb) = (xi_of_x(a, alpha), xi_of_x(b, alpha));
                total += if exponent > 0.0 && a == 0.0 {
                    integrate_algebraic_left(integrand, xa, xb, exponent, spec)?
                } else if exponent > 0.0 && b == 0.0 {
                    // mirror so the singular end sits on the left
                    integrate_algebraic_left(|s| integrand(-s), -xb, -xa, exponent, spec)?
                } else {
                    integrate(integrand, xa, xb, spec)?
                };
            }
        }
        Ok(total)
    }

    /// Euclidean length `int sqrt(1 + eta'(xi)^2) dxi` of the pushed-forward graph.
    pub fn euclidean_length(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.integrate_pieces(|_, _, d| d.hypot(1.0), spec)
    }

    /// Weighted area `int eta(xi) |(alpha+1) xi|^(-alpha/(alpha+1)) dxi`.
    pub fn weighted_area(&self, spec: &QuadratureSpec) -> Result<f64> {
        let alpha = self.alpha;
        self.integrate_pieces(|xi, eta, _| eta * transformed_density(xi, alpha), spec)
    }
}
