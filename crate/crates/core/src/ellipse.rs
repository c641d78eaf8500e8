//! Direct least-squares ellipse fitting and component orientation.
//!
//! The direct fit minimises the algebraic distance `‖D a‖²` of the conic
//! `a = [A, B, C, D, E, F]` (`A x² + B xy + C y² + D x + E y + F = 0`)
//! subject to `4AC − B² = 1`, which admits ellipses only. The 6×6
//! generalized eigenproblem is reduced to a 3×3 one by eliminating the
//! linear part of the conic, and the admissible eigenvector is the one with
//! `4AC − B² > 0` and the smallest algebraic residual.
//!
//! Points are shifted to zero mean and scaled to unit RMS radius before the
//! scatter matrix is built; the geometric parameters are mapped back
//! afterwards.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::components::Component;
use crate::error::{Error, Result};

/// Below this ratio of smallest to largest eigenvalue the linear scatter
/// block is treated as singular (collinear or coincident input).
const SINGULAR_RATIO: f64 = 1e-12;

/// Smallest-to-largest eigenvalue ratio of the reduced scatter below which
/// the points are taken to lie exactly on one conic.
const EXACT_FIT_RATIO: f64 = 1e-10;

/// `4AC − B²` of a unit-norm exact-fit conic at or below this is degenerate.
const DEGENERATE_CONSTRAINT: f64 = 1e-6;

/// Relative bound on `‖M a − λ a‖` for an accepted eigenpair.
const EIGEN_RESIDUAL: f64 = 1e-9;

/// `|θ_y|` below this is snapped to zero before choosing the half-plane.
const AXIS_SNAP: f64 = 1e-12;

/// Variance of a point spread uniformly over a unit pixel.
const PIXEL_VARIANCE: f64 = 1.0 / 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    /// Constrained least-squares conic fit.
    Direct,
    /// Axes from the second central moments.
    Moments,
    /// Single-pixel component; orientation by convention.
    SinglePixel,
}

/// Which pixels of a component feed the fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitPoints {
    #[default]
    Boundary,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseFit {
    pub center: (f64, f64),
    /// Semi-major axis length.
    pub r_major: f64,
    /// Semi-minor axis length.
    pub r_minor: f64,
    /// Unit vector along the major axis, `θ_y >= 0` (and `θ_x > 0` when `θ_y == 0`).
    pub theta: (f64, f64),
    /// `r_major / (r_major + r_minor)`.
    pub alpha: f64,
    pub method: FitMethod,
}

impl EllipseFit {
    fn new(center: (f64, f64), r_major: f64, r_minor: f64, theta: (f64, f64), method: FitMethod) -> Self {
        EllipseFit {
            center,
            r_major,
            r_minor,
            theta: canonical_direction(theta),
            alpha: alpha(r_major, r_minor),
            method,
        }
    }

    /// Orientation of the major axis in radians, in `[0, π)`.
    pub fn angle(&self) -> f64 {
        let a = self.theta.1.atan2(self.theta.0);
        if a >= std::f64::consts::PI {
            a - std::f64::consts::PI
        } else {
            a
        }
    }

    /// Implicit conic `[A, B, C, D, E, F]` of this ellipse, scaled to unit norm.
    pub fn conic(&self) -> [f64; 6] {
        let (c, s) = self.theta;
        let (a2, b2) = (self.r_major * self.r_major, self.r_minor * self.r_minor);
        let a = c * c / a2 + s * s / b2;
        let b = 2.0 * c * s * (1.0 / a2 - 1.0 / b2);
        let cc = s * s / a2 + c * c / b2;
        let (x0, y0) = self.center;
        let d = -2.0 * a * x0 - b * y0;
        let e = -b * x0 - 2.0 * cc * y0;
        let f = a * x0 * x0 + b * x0 * y0 + cc * y0 * y0 - 1.0;
        let coeffs = [a, b, cc, d, e, f];
        let norm = coeffs.iter().map(|v| v * v).sum::<f64>().sqrt();
        coeffs.map(|v| v / norm)
    }
}

/// Elongation confidence `r_major / (r_major + r_minor)`; 0.5 for a circle.
pub fn alpha(r_major: f64, r_minor: f64) -> f64 {
    r_major / (r_major + r_minor)
}

/// Flips `v` into the half-plane `y > 0`, or onto `+x` when it lies on the
/// x axis, and normalises it.
pub fn canonical_direction(v: (f64, f64)) -> (f64, f64) {
    let n = v.0.hypot(v.1);
    let (mut x, mut y) = (v.0 / n, v.1 / n);
    if y.abs() < AXIS_SNAP {
        return (1.0, 0.0);
    }
    if y < 0.0 {
        x = -x;
        y = -y;
    }
    (x, y)
}

/// Fits an ellipse to `points`.
///
/// Uses the direct fit when at least six points are given and the fit is
/// admissible. Otherwise, with `fallback` set, derives axes from the second
/// central moments of the points; without it, returns a degenerate-input
/// error.
pub fn fit_ellipse(points: &[(f64, f64)], fallback: bool) -> Result<EllipseFit> {
    if points.len() >= 6 {
        if let Some(fit) = fit_direct(points) {
            return Ok(fit);
        }
    }
    if !fallback {
        return Err(Error::Degenerate(format!(
            "no admissible direct ellipse fit for {} points",
            points.len()
        )));
    }
    fit_moments(points)
}

/// Fits the component's ellipse. Single pixels get a unit circle-like fit
/// with `θ = (1, 0)`; small or degenerate outlines fall back to moments of
/// all member pixels.
pub fn fit_component(c: &Component, which: FitPoints) -> EllipseFit {
    let to_f = |v: &[(u32, u32)]| v.iter().map(|&(x, y)| (x as f64, y as f64)).collect::<Vec<_>>();
    if c.area() == 1 {
        let (x, y) = c.pixels[0];
        return EllipseFit::new((x as f64, y as f64), 0.5, 0.5, (1.0, 0.0), FitMethod::SinglePixel);
    }
    let sample = match which {
        FitPoints::Boundary => c.boundary_pixels(),
        FitPoints::All => c.pixels.clone(),
    };
    if sample.len() >= 6 {
        if let Some(fit) = fit_direct(&to_f(&sample)) {
            return fit;
        }
    }
    fit_moments(&to_f(&c.pixels)).expect("a component with two or more pixels has distinct points")
}

/// Second-central-moment ellipse. Every point is treated as a unit pixel,
/// so the covariance carries an extra `1/12` per axis and collinear input
/// still yields a positive minor radius. Radii are `2σ`.
pub fn fit_moments(points: &[(f64, f64)]) -> Result<EllipseFit> {
    let first = points
        .first()
        .ok_or_else(|| Error::Degenerate("no points".into()))?;
    if points.iter().all(|p| p == first) {
        return Err(Error::Degenerate("fewer than two distinct points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let (sxx, sxy, syy) = (sxx / n + PIXEL_VARIANCE, sxy / n, syy / n + PIXEL_VARIANCE);
    let (l_big, l_small, dir) = sym2_eigen(sxx, sxy, syy);
    Ok(EllipseFit::new(
        (mx, my),
        2.0 * l_big.sqrt(),
        2.0 * l_small.sqrt(),
        dir,
        FitMethod::Moments,
    ))
}

/// Eigen-decomposition of `[[a, b], [b, c]]`: returns `(λ_max, λ_min, v_max)`.
fn sym2_eigen(a: f64, b: f64, c: f64) -> (f64, f64, (f64, f64)) {
    let mean = 0.5 * (a + c);
    let half_diff = 0.5 * (a - c);
    let rad = half_diff.hypot(b);
    let (l_max, l_min) = (mean + rad, mean - rad);
    if rad == 0.0 {
        return (l_max, l_min, (1.0, 0.0));
    }
    // Two algebraically equal forms; use the better conditioned one.
    let v1 = (b, l_max - a);
    let v2 = (l_max - c, b);
    let v = if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) { v1 } else { v2 };
    (l_max, l_min, v)
}

fn fit_direct(points: &[(f64, f64)]) -> Option<EllipseFit> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let scale = (points
        .iter()
        .map(|p| (p.0 - mx).powi(2) + (p.1 - my).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }

    // Scatter blocks: quadratic terms [x², xy, y²] and linear terms [x, y, 1].
    let mut s1 = Matrix3::<f64>::zeros();
    let mut s2 = Matrix3::<f64>::zeros();
    let mut s3 = Matrix3::<f64>::zeros();
    for &(px, py) in points {
        let (x, y) = ((px - mx) / scale, (py - my) / scale);
        let q = Vector3::new(x * x, x * y, y * y);
        let l = Vector3::new(x, y, 1.0);
        s1 += q * q.transpose();
        s2 += q * l.transpose();
        s3 += l * l.transpose();
    }

    let eig = SymmetricEigen::new(s3);
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(lo > SINGULAR_RATIO * hi) {
        return None;
    }
    let s3_inv = s3.try_inverse()?;
    let t = -(s3_inv * s2.transpose());
    let reduced = s1 + s2 * t;

    // Points lying exactly on a conic give `reduced` a null vector. If that
    // conic is a line pair or parabola, no ellipse fits and the remaining
    // eigenvectors only reflect rounding noise.
    let re = SymmetricEigen::new(reduced);
    let (imin, _) = re.eigenvalues.argmin();
    let top = re.eigenvalues.amax();
    if re.eigenvalues[imin] <= EXACT_FIT_RATIO * top {
        let v = re.eigenvectors.column(imin);
        if 4.0 * v[0] * v[2] - v[1] * v[1] <= DEGENERATE_CONSTRAINT {
            return None;
        }
    }

    // Premultiply by the inverse of the constraint block [[0,0,2],[0,-1,0],[2,0,0]].
    let m = Matrix3::from_rows(&[
        reduced.row(2) * 0.5,
        -reduced.row(1),
        reduced.row(0) * 0.5,
    ]);

    let m_norm = m.norm();
    let mut best: Option<(f64, Vector3<f64>)> = None;
    for lambda in real_eigenvalues(&m) {
        let Some(a1) = null_vector(&(m - Matrix3::identity() * lambda)) else {
            continue;
        };
        let a1 = refine_eigenvector(&m, lambda, a1);
        // When the cubic has a complex pair, the candidate taken from its
        // real part is not an eigenvalue; drop pairs that do not satisfy
        // `M a = λ a`.
        if (m * a1 - a1 * lambda).norm() > EIGEN_RESIDUAL * m_norm {
            continue;
        }
        let constraint = 4.0 * a1[0] * a1[2] - a1[1] * a1[1];
        if !(constraint > 0.0) {
            continue;
        }
        let residual = (a1.transpose() * reduced * a1)[(0, 0)] / constraint;
        if best.as_ref().map_or(true, |(r, _)| residual < *r) {
            best = Some((residual, a1));
        }
    }
    let (_, a1) = best?;
    let a2 = t * a1;
    let (nc, r_major, r_minor, theta) = conic_to_geometric([a1[0], a1[1], a1[2], a2[0], a2[1], a2[2]])?;
    let center = (mx + scale * nc.0, my + scale * nc.1);
    Some(EllipseFit::new(
        center,
        scale * r_major,
        scale * r_minor,
        theta,
        FitMethod::Direct,
    ))
}

/// Converts conic coefficients to `(center, r_major, r_minor, θ)`; `None`
/// unless the conic is a real, non-degenerate ellipse.
fn conic_to_geometric(k: [f64; 6]) -> Option<((f64, f64), f64, f64, (f64, f64))> {
    let [mut a, mut b, mut c, mut d, mut e, mut f] = k;
    if a + c < 0.0 {
        [a, b, c, d, e, f] = [-a, -b, -c, -d, -e, -f];
    }
    let det = 4.0 * a * c - b * b;
    if !(det > 0.0) {
        return None;
    }
    let cx = (b * e - 2.0 * c * d) / det;
    let cy = (b * d - 2.0 * a * e) / det;
    let f0 = f + 0.5 * (d * cx + e * cy);
    if !(f0 < 0.0) {
        return None;
    }
    // Quadratic form [[A, B/2], [B/2, C]]; the major axis follows its
    // smaller eigenvalue.
    let (l_max, l_min, v_max) = sym2_eigen(a, 0.5 * b, c);
    if !(l_min > 0.0) {
        return None;
    }
    let r_major = (-f0 / l_min).sqrt();
    let r_minor = (-f0 / l_max).sqrt();
    let theta = (-v_max.1, v_max.0);
    if !(r_major.is_finite() && r_minor > 0.0) {
        return None;
    }
    Some(((cx, cy), r_major, r_minor, theta))
}

/// Real eigenvalues of a 3×3 matrix from its characteristic cubic, each
/// polished with Newton steps. For a complex pair only the shared real part
/// is returned; callers validate eigenvectors independently.
fn real_eigenvalues(m: &Matrix3<f64>) -> Vec<f64> {
    let tr = m.trace();
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
        + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)];
    let det = m.determinant();
    // λ³ + c2 λ² + c1 λ + c0
    let (c2, c1, c0) = (-tr, minors, -det);
    let poly = |x: f64| ((x + c2) * x + c1) * x + c0;
    let dpoly = |x: f64| (3.0 * x + 2.0 * c2) * x + c1;

    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut roots = Vec::with_capacity(3);
    if p == 0.0 && q == 0.0 {
        roots.push(-shift);
    } else if disc <= 0.0 {
        let r = (-p / 3.0).sqrt();
        let cos_arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
        let phi = cos_arg.acos() / 3.0;
        for k in 0..3 {
            let t = 2.0 * r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            roots.push(t - shift);
        }
    } else {
        let sq = disc.sqrt();
        let t = (-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt();
        roots.push(t - shift);
        roots.push(-t / 2.0 - shift);
    }

    for r in roots.iter_mut() {
        for _ in 0..4 {
            let d = dpoly(*r);
            if d == 0.0 {
                break;
            }
            let step = poly(*r) / d;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    roots
}

/// Inverse iteration on `M − λI`, which sharpens an eigenvector obtained
/// from cross products when `λ` is close to another eigenvalue or to zero.
fn refine_eigenvector(m: &Matrix3<f64>, lambda: f64, mut v: Vector3<f64>) -> Vector3<f64> {
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let shifted = m - Matrix3::identity() * (lambda + scale * 1e-13);
    let lu = shifted.lu();
    for _ in 0..3 {
        let Some(next) = lu.solve(&v) else { break };
        let n = next.norm();
        if !(n > 0.0 && n.is_finite()) {
            break;
        }
        let next = next / n;
        // Keep the sign stable across iterations.
        v = if next.dot(&v) < 0.0 { -next } else { next };
    }
    v
}

/// Unit vector spanning the (numerical) null space of a rank-2 matrix: the
/// longest cross product of two of its rows.
fn null_vector(a: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let rows = [
        a.row(0).transpose(),
        a.row(1).transpose(),
        a.row(2).transpose(),
    ];
    let candidates = [
        rows[0].cross(&rows[1]),
        rows[0].cross(&rows[2]),
        rows[1].cross(&rows[2]),
    ];
    let v = candidates
        .into_iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))?;
    let n = v.norm();
    (n > 0.0 && n.is_finite()).then(|| v / n)
}
