//! Scalar kernel for circular arcs, circular segments, perturbed circles and
//! the polar equation of a circle tangent to another.
//!
//! Curvature is signed relative to a chamber: positive when the arc bulges
//! away from the chamber whose boundary it is.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric;

/// Below this |ℓκ| the arc formulas are evaluated from their Taylor series.
pub const SERIES_THRESHOLD: f64 = 0.5;

/// Slack on the |ℓκ| ≤ 2 bound for inputs produced by floating-point geometry.
const DIAMETER_SLACK: f64 = 1e-12;

/// A chord of length `chord` spanned by an arc of signed curvature `curvature`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordArc {
    pub chord: f64,
    pub curvature: f64,
}

impl ChordArc {
    pub fn new(chord: f64, curvature: f64) -> Result<Self> {
        if !(chord >= 0.0) || !curvature.is_finite() {
            return Err(Error::domain(format!(
                "chord must be non-negative and curvature finite (ℓ={chord}, κ={curvature})"
            )));
        }
        if (chord * curvature).abs() > 2.0 * (1.0 + DIAMETER_SLACK) {
            return Err(Error::domain(format!(
                "|ℓκ| = {:.6} exceeds 2: the chord is longer than the diameter 2/|κ|",
                (chord * curvature).abs()
            )));
        }
        Ok(ChordArc { chord, curvature })
    }

    /// ℓκ/2 clamped into [-1, 1].
    fn half_product(&self) -> f64 {
        (0.5 * self.chord * self.curvature).clamp(-1.0, 1.0)
    }

    pub fn radius(&self) -> f64 {
        1.0 / self.curvature
    }

    pub fn angle(&self) -> f64 {
        2.0 * self.half_product().asin()
    }

    pub fn length(&self) -> f64 {
        self.chord + self.excess()
    }

    /// Arc length minus chord length, free of cancellation for flat arcs.
    pub fn excess(&self) -> f64 {
        let x = self.half_product();
        if x.abs() < 0.5 * SERIES_THRESHOLD {
            self.chord * asin_over_x_minus_one(x)
        } else {
            self.chord * (x.asin() / x - 1.0)
        }
    }

    /// Signed area between the chord and the arc.
    pub fn segment_area(&self) -> f64 {
        let x = self.half_product();
        let k = self.curvature;
        if x.abs() < 0.5 * SERIES_THRESHOLD {
            // (ℓ³κ/4)·Σ b_n x^{2n} / (2n+3)
            let l = self.chord;
            0.25 * l * l * l * k * segment_series(x)
        } else {
            (x.asin() - x * (1.0 - x * x).max(0.0).sqrt()) / (k * k)
        }
    }
}

impl fmt::Display for ChordArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(ℓ={}, κ={})", self.chord, self.curvature)
    }
}

/// Coefficients b_n = C(2n, n)/4ⁿ of (1 - t²)^{-1/2}.
fn central_binomial_terms() -> impl Iterator<Item = f64> {
    (0..).scan(1.0, |b, n: i32| {
        let cur = *b;
        *b *= (2.0 * n as f64 + 1.0) / (2.0 * n as f64 + 2.0);
        Some(cur)
    })
}

/// asin(x)/x − 1 = Σ_{n≥1} b_n x^{2n}/(2n+1)
fn asin_over_x_minus_one(x: f64) -> f64 {
    let x2 = x * x;
    let mut pow = 1.0;
    let mut sum = 0.0;
    for (n, b) in central_binomial_terms().enumerate().skip(1).take(40) {
        pow *= x2;
        let term = b * pow / (2.0 * n as f64 + 1.0);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Σ_{n≥0} b_n x^{2n}/(2n+3)
fn segment_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut pow = 1.0;
    let mut sum = 0.0;
    for (n, b) in central_binomial_terms().enumerate().take(40) {
        let term = b * pow / (2.0 * n as f64 + 3.0);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        pow *= x2;
    }
    sum
}

/// Turning angle θ = 2·asin(ℓκ/2).
pub fn arc_angle(a: ChordArc) -> Result<f64> {
    ChordArc::new(a.chord, a.curvature).map(|a| a.angle())
}

/// Arc length s = (2/κ)·asin(ℓκ/2), equal to ℓ for a straight chord.
pub fn arc_length(a: ChordArc) -> Result<f64> {
    ChordArc::new(a.chord, a.curvature).map(|a| a.length())
}

/// Signed area of the circular segment cut off by the chord.
pub fn segment_area(a: ChordArc) -> Result<f64> {
    ChordArc::new(a.chord, a.curvature).map(|a| a.segment_area())
}

/// Polar radius, about the center of a circle of radius `r`, of the circle of
/// signed radius `big_r` tangent to it at angle 0 with center `(r + big_r, 0)`.
///
/// `big_r > 0` puts the second center across the common tangent line,
/// `big_r < 0` on the same side; `big_r = ±∞` is the tangent line itself.
pub fn tangent_circle_polar(r: f64, big_r: f64, theta: f64) -> Result<f64> {
    if big_r == 0.0 || big_r.is_nan() || !(r > 0.0) {
        return Err(Error::domain(format!(
            "tangent_circle_polar needs r > 0 and R != 0 (r={r}, R={big_r})"
        )));
    }
    let (s, c) = theta.sin_cos();
    if big_r.is_infinite() {
        if c <= 0.0 {
            return Err(Error::domain(format!(
                "angle {theta} does not meet the tangent line"
            )));
        }
        return Ok(r / c);
    }
    let k = 1.0 + r / big_r;
    let disc = 1.0 - k * k * s * s;
    if disc < 0.0 {
        return Err(Error::domain(format!(
            "angle {theta} is off the near branch of the tangent circle (r={r}, R={big_r})"
        )));
    }
    let a = (big_r + r) * c;
    let b = big_r * disc.sqrt();
    if a * b > 0.0 {
        // a - b = (a² - b²)/(a + b) with a² - b² = r(r + 2R) exactly
        Ok(r * (r + 2.0 * big_r) / (a + b))
    } else {
        Ok(a - b)
    }
}

/// dρ/dθ for [`tangent_circle_polar`].
pub fn tangent_circle_polar_derivative(r: f64, big_r: f64, theta: f64) -> Result<f64> {
    let (s, c) = theta.sin_cos();
    if big_r.is_infinite() {
        return Ok(r * s / (c * c));
    }
    let k = 1.0 + r / big_r;
    let disc = 1.0 - k * k * s * s;
    if disc <= 0.0 {
        return Err(Error::domain(format!(
            "derivative undefined at the branch end (θ={theta})"
        )));
    }
    Ok(-(big_r + r) * s + big_r * k * k * s * c / disc.sqrt())
}

/// Half-angle Δθ (seen from the center of the circle of radius `r`) of the
/// chord of length `chord` on the tangent circle of signed radius `big_r`,
/// i.e. the root of 2ρ(Δθ)·sin Δθ = ℓ in (0, π/4].
pub fn invert_chord_to_angle(chord: f64, r: f64, big_r: f64) -> Result<f64> {
    if !(chord >= 0.0) {
        return Err(Error::domain(format!("chord must be non-negative, got {chord}")));
    }
    if chord == 0.0 {
        return Ok(0.0);
    }
    let mut hi = FRAC_PI_4;
    if big_r.is_finite() {
        let k = (1.0 + r / big_r).abs();
        if k > 1.0 {
            hi = hi.min((1.0 / k).asin() * (1.0 - 1e-15));
        }
    }
    let g = |t: f64| -> (f64, f64) {
        let rho = tangent_circle_polar(r, big_r, t).unwrap_or(f64::NAN);
        let drho = tangent_circle_polar_derivative(r, big_r, t).unwrap_or(f64::NAN);
        let (s, c) = t.sin_cos();
        (2.0 * rho * s - chord, 2.0 * (drho * s + rho * c))
    };
    let top = g(hi).0;
    if !(top >= 0.0) {
        return Err(Error::domain(format!(
            "chord {chord} has no root in (0, {hi:.4}] for r={r}, R={big_r}"
        )));
    }
    numeric::bracketed_newton(g, 0.0, hi, 1e-15)
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Periodic normal perturbation u(t), t ∈ [-π, π], of the unit circle.
#[derive(Clone)]
pub enum RadialProfile {
    PiecewiseLinear { knots: Vec<f64>, values: Vec<f64> },
    Analytic {
        u: ScalarFn,
        du: ScalarFn,
        /// Interior points where u' may jump, sorted.
        breaks: Vec<f64>,
    },
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialProfile::PiecewiseLinear { knots, values } => f
                .debug_struct("PiecewiseLinear")
                .field("knots", knots)
                .field("values", values)
                .finish(),
            RadialProfile::Analytic { breaks, .. } => {
                f.debug_struct("Analytic").field("breaks", breaks).finish()
            }
        }
    }
}

const PROFILE_SAMPLES: usize = 4096;

impl RadialProfile {
    /// Piecewise-linear profile through `(knot, value)` pairs. The knots must
    /// increase strictly from -π to π and the end values must agree.
    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::domain("need at least two knots with one value each"));
        }
        if (knots[0] + PI).abs() > 1e-12 || (knots[knots.len() - 1] - PI).abs() > 1e-12 {
            return Err(Error::domain("knots must start at -π and end at π"));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("knots must be strictly increasing"));
        }
        if (values[0] - values[values.len() - 1]).abs() > 1e-12 {
            return Err(Error::domain("profile is not closed: u(-π) != u(π)"));
        }
        if let Some(v) = values.iter().find(|v| !(**v > -1.0)) {
            return Err(Error::domain(format!("profile value {v} <= -1")));
        }
        Ok(RadialProfile::PiecewiseLinear { knots, values })
    }

    pub fn analytic(
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        du: impl Fn(f64) -> f64 + Send + Sync + 'static,
        breaks: Vec<f64>,
    ) -> Result<Self> {
        if (u(-PI) - u(PI)).abs() > 1e-12 {
            return Err(Error::domain("profile is not closed: u(-π) != u(π)"));
        }
        let p = RadialProfile::Analytic {
            u: Arc::new(u),
            du: Arc::new(du),
            breaks,
        };
        let min = p.min_value();
        if !(min > -1.0) {
            return Err(Error::domain(format!("profile reaches {min} <= -1")));
        }
        Ok(p)
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::piecewise_linear(vec![-PI, PI], vec![c, c])
    }

    /// Integration panels: consecutive breakpoints covering [-π, π].
    fn panels(&self) -> Vec<(f64, f64)> {
        let pts: Vec<f64> = match self {
            RadialProfile::PiecewiseLinear { knots, .. } => knots.clone(),
            RadialProfile::Analytic { breaks, .. } => {
                let mut v = vec![-PI];
                v.extend(breaks.iter().copied().filter(|b| *b > -PI && *b < PI));
                v.push(PI);
                v
            }
        };
        pts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            RadialProfile::PiecewiseLinear { knots, values } => {
                let t = wrap_angle(t);
                let i = knots.partition_point(|k| *k <= t).clamp(1, knots.len() - 1);
                let (a, b) = (knots[i - 1], knots[i]);
                let w = (t - a) / (b - a);
                values[i - 1] + w * (values[i] - values[i - 1])
            }
            RadialProfile::Analytic { u, .. } => u(t),
        }
    }

    /// u'(t); at a knot of a piecewise-linear profile the right derivative.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            RadialProfile::PiecewiseLinear { knots, values } => {
                let t = wrap_angle(t);
                let i = knots.partition_point(|k| *k <= t).clamp(1, knots.len() - 1);
                (values[i] - values[i - 1]) / (knots[i] - knots[i - 1])
            }
            RadialProfile::Analytic { du, .. } => du(t),
        }
    }

    fn sampled_extrema(&self, f: impl Fn(f64) -> f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in self.panels() {
            for k in 0..=PROFILE_SAMPLES {
                let t = a + (b - a) * k as f64 / PROFILE_SAMPLES as f64;
                let v = f(t);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    pub fn min_value(&self) -> f64 {
        match self {
            RadialProfile::PiecewiseLinear { values, .. } => {
                values.iter().copied().fold(f64::INFINITY, f64::min)
            }
            RadialProfile::Analytic { u, .. } => self.sampled_extrema(|t| u(t)).0,
        }
    }

    /// ‖u‖_{W^{1,∞}} = max(sup|u|, sup|u'|). Exact for piecewise-linear
    /// profiles, sampled on a dense grid otherwise.
    pub fn w1inf_norm(&self) -> f64 {
        match self {
            RadialProfile::PiecewiseLinear { knots, values } => {
                let sup_u = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let sup_du = knots
                    .windows(2)
                    .zip(values.windows(2))
                    .map(|(k, v)| ((v[1] - v[0]) / (k[1] - k[0])).abs())
                    .fold(0.0, f64::max);
                sup_u.max(sup_du)
            }
            RadialProfile::Analytic { u, du, .. } => {
                let (ulo, uhi) = self.sampled_extrema(|t| u(t));
                let (dlo, dhi) = self.sampled_extrema(|t| du(t));
                ulo.abs().max(uhi.abs()).max(dlo.abs()).max(dhi.abs())
            }
        }
    }

    /// Point γ_u(t) = (1 + u(t))(cos t, sin t).
    pub fn point(&self, t: f64) -> (f64, f64) {
        let rho = 1.0 + self.value(t);
        (rho * t.cos(), rho * t.sin())
    }

    /// (∫u, ∫u², ∫u'²) over [-π, π].
    fn moments(&self, tol: f64) -> Result<(f64, f64, f64)> {
        match self {
            RadialProfile::PiecewiseLinear { knots, values } => {
                let mut m = (0.0, 0.0, 0.0);
                for (k, v) in knots.windows(2).zip(values.windows(2)) {
                    let h = k[1] - k[0];
                    let (a, b) = (v[0], v[1]);
                    m.0 += h * (a + b) / 2.0;
                    m.1 += h * (a * a + a * b + b * b) / 3.0;
                    m.2 += (b - a) * (b - a) / h;
                }
                Ok(m)
            }
            RadialProfile::Analytic { u, du, .. } => {
                let panels = self.panels();
                let t = tol / panels.len() as f64;
                let mut m = (0.0, 0.0, 0.0);
                for (a, b) in panels {
                    m.0 += numeric::integrate(|x| u(x), a, b, t)?;
                    m.1 += numeric::integrate(|x| u(x).powi(2), a, b, t)?;
                    m.2 += numeric::integrate(|x| du(x).powi(2), a, b, t)?;
                }
                Ok(m)
            }
        }
    }
}

fn wrap_angle(t: f64) -> f64 {
    if (-PI..=PI).contains(&t) {
        t
    } else {
        (t + PI).rem_euclid(TAU) - PI
    }
}

/// Tolerance used for quadrature of analytic profiles.
pub const PROFILE_QUADRATURE_TOL: f64 = 1e-10;

/// Area enclosed by γ_u: π + ∫u + ½∫u² (an identity, not an expansion).
pub fn perturbed_area(p: &RadialProfile) -> Result<f64> {
    let (m1, m2, _) = p.moments(1e-12)?;
    Ok(PI + m1 + 0.5 * m2)
}

/// Length of γ_u by quadrature of √((1+u)² + u'²).
pub fn perturbed_length_exact(p: &RadialProfile) -> Result<f64> {
    let panels = p.panels();
    let tol = PROFILE_QUADRATURE_TOL / panels.len() as f64;
    let mut total = 0.0;
    for (a, b) in panels {
        let d = match p {
            // the slope is constant on each piece
            RadialProfile::PiecewiseLinear { .. } => Some(p.derivative(0.5 * (a + b))),
            RadialProfile::Analytic { .. } => None,
        };
        total += numeric::integrate(
            |t| {
                let rho = 1.0 + p.value(t);
                let du = d.unwrap_or_else(|| p.derivative(t));
                rho.hypot(du)
            },
            a,
            b,
            tol,
        )?;
    }
    Ok(total)
}

/// Second-order expansion 2π + ∫u + ½∫u'² of the length of γ_u.
pub fn perturbed_length_series(p: &RadialProfile) -> Result<f64> {
    let min = p.min_value();
    if min < -0.5 {
        return Err(Error::domain(format!("series needs u >= -1/2, got min u = {min}")));
    }
    let norm = p.w1inf_norm();
    if norm > 1.0 {
        return Err(Error::domain(format!("series needs ‖u‖_W1∞ <= 1, got {norm}")));
    }
    let (m1, _, m3) = p.moments(1e-12)?;
    Ok(TAU + m1 + 0.5 * m3)
}
