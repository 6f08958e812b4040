use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{edge_intersection, Domain};
use crate::hodograph::HodographMap;
use crate::scalar::{cplx, Cplx, Real};
use crate::solver::{Harmonic, HarmonicFunction};

const MAX_STEP: f64 = 1e-2;
const MIN_STEP: f64 = 1e-9;
const CRITICAL: f64 = 1e-10;
const SCAN: usize = 4096;
const MAX_NODES: usize = 200_000;

/// One component of `{v = ℓ}`, ordered so that `v̄` increases.
#[derive(Clone, Debug)]
pub struct LevelCurve<T> {
    pub level: T,
    pub nodes: Vec<Cplx<T>>,
    /// Boundary points where the curve starts and ends.
    pub endpoints: (Cplx<T>, Cplx<T>),
}

impl<T: Real> LevelCurve<T> {
    /// No two non-adjacent node segments intersect.
    pub fn is_simple(&self) -> bool {
        let n = self.nodes.len();
        for i in 0..n.saturating_sub(1) {
            for j in i + 2..n - 1 {
                if edge_intersection((self.nodes[i], self.nodes[i + 1]), (self.nodes[j], self.nodes[j + 1])).is_some() {
                    return false;
                }
            }
        }
        true
    }
}

/// Point just inside the boundary at arc length `s`.
fn inset<T: Real>(domain: &Domain<T>, s: T, depth: T) -> Cplx<T> {
    let curve = domain.boundary();
    let at = curve.at_arclength(s);
    curve.point(at) - curve.outward_normal(at).to_complex() * depth
}

/// Arc-length positions where `v - ℓ` changes sign along a curve parallel
/// to the boundary at a small inward depth.
fn boundary_crossings<T: Real>(v: &HarmonicFunction<T>, domain: &Domain<T>, level: T, depth: T) -> Result<Vec<T>> {
    let curve = domain.boundary();
    let total = curve.length();
    let mut marks: Vec<T> = (0..SCAN).map(|k| total * T::from_usize_lossy(k) / T::from_usize_lossy(SCAN)).collect();
    marks.extend(curve.knots().iter().map(|k| k.arclength));
    marks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    marks.dedup_by(|a, b| (*a - *b).abs() < total * T::lit(1e-12));
    // knots themselves are skipped: the inward normal is ambiguous there
    let knot_gap = total * T::lit(1e-7);
    let probe = |s: T| -> Result<Option<T>> {
        let p = inset(domain, s, depth);
        if !domain.inside(p) {
            return Ok(None);
        }
        Ok(Some(v.value(p)? - level))
    };
    let mut vals = Vec::with_capacity(marks.len());
    for &s in &marks {
        let s = if curve.knots().iter().any(|k| (k.arclength - s).abs() < knot_gap) {
            s + knot_gap * T::lit(10.0)
        } else {
            s
        };
        vals.push((s, probe(s)?));
    }
    let mut out = Vec::new();
    let n = vals.len();
    for i in 0..n {
        let (s0, f0) = vals[i];
        let (mut s1, f1) = vals[(i + 1) % n];
        if i + 1 == n {
            s1 += total;
        }
        let (Some(f0), Some(f1)) = (f0, f1) else { continue };
        if (f0 > T::zero()) == (f1 > T::zero()) {
            continue;
        }
        let (mut a, mut b, fa) = (s0, s1, f0);
        for _ in 0..60 {
            let m = (a + b) * T::lit(0.5);
            match probe(m)? {
                Some(fm) if (fm > T::zero()) == (fa > T::zero()) => a = m,
                Some(_) => b = m,
                None => break,
            }
        }
        out.push(curve.wrap((a + b) * T::lit(0.5)));
    }
    Ok(out)
}

/// Unit tangent `J∇v / |∇v|`, along which `v̄` increases.
fn tangent<T: Real>(v: &HarmonicFunction<T>, z: Cplx<T>) -> Result<(Cplx<T>, T)> {
    let g = v.gradient(z)?;
    let n = g.norm();
    if n < T::lit(CRITICAL) {
        return Err(Error::CriticalOnLevelCurve {
            x: z.re.as_f64(),
            y: z.im.as_f64(),
        });
    }
    Ok((cplx(g.y, -g.x) / n, n))
}

/// Newton projection onto `{v = ℓ}` along the gradient.
fn correct<T: Real>(v: &HarmonicFunction<T>, mut z: Cplx<T>, level: T) -> Result<Cplx<T>> {
    let tol = T::tol(1e-13) * (T::one() + level.abs());
    for _ in 0..12 {
        let r = v.value(z)? - level;
        if r.abs() <= tol {
            break;
        }
        let g = v.gradient(z)?;
        let n2 = g.norm_sqr();
        if n2 < T::lit(CRITICAL * CRITICAL) {
            return Err(Error::CriticalOnLevelCurve {
                x: z.re.as_f64(),
                y: z.im.as_f64(),
            });
        }
        z -= cplx(g.x, g.y) * (r / n2);
    }
    Ok(z)
}

/// Point where the level curve leaves the domain, by bisection on the
/// predictor step length with each trial projected back onto the curve.
fn exit_point<T: Real>(v: &HarmonicFunction<T>, domain: &Domain<T>, level: T, z: Cplx<T>, dir: Cplx<T>, h: T) -> Result<Cplx<T>> {
    let (mut lo, mut hi) = (T::zero(), h);
    let mut out = correct(v, z + dir * h, level)?;
    for _ in 0..60 {
        let m = (lo + hi) * T::lit(0.5);
        let p = correct(v, z + dir * m, level)?;
        if domain.inside(p) {
            lo = m;
        } else {
            hi = m;
            out = p;
        }
    }
    Ok(out)
}

/// Traces from the inside point `start` along `sign * J∇v` until the curve
/// leaves the domain.
fn march<T: Real>(v: &HarmonicFunction<T>, domain: &Domain<T>, level: T, start: Cplx<T>, sign: T) -> Result<(Vec<Cplx<T>>, Cplx<T>)> {
    let mut nodes = vec![start];
    let mut z = start;
    let mut h = T::lit(MAX_STEP) * T::lit(0.1);
    loop {
        if nodes.len() > MAX_NODES {
            return Err(Error::NonFinite("level curve did not terminate".into()));
        }
        let (t, grad) = tangent(v, z)?;
        // curvature of a level line of a harmonic function is at most |g''|/|g'|
        let kappa = v.complex_second_derivative(z)?.norm() / grad;
        let cap = if kappa > T::zero() { T::lit(0.2) / kappa } else { T::infinity() };
        // |g'/g''| estimates the distance to the nearest critical point
        if cap < T::lit(MIN_STEP) {
            return Err(Error::CriticalOnLevelCurve {
                x: z.re.as_f64(),
                y: z.im.as_f64(),
            });
        }
        h = (h * T::lit(1.5)).min(T::lit(MAX_STEP)).min(cap).max(T::lit(MIN_STEP));
        loop {
            let pred = z + t * (h * sign);
            let next = correct(v, pred, level)?;
            let jump = (next - z).norm();
            if jump > h * T::lit(2.0) && h > T::lit(MIN_STEP) {
                h = h * T::lit(0.5);
                continue;
            }
            if !domain.inside(next) {
                let end = exit_point(v, domain, level, z, t * sign, h)?;
                return Ok((nodes, end));
            }
            // turning back on itself means the step overshot a tight bend
            let (t2, _) = tangent(v, next)?;
            if (t2 * t.conj()).re < T::zero() && h > T::lit(MIN_STEP) {
                h = h * T::lit(0.5);
                continue;
            }
            nodes.push(next);
            z = next;
            break;
        }
    }
}

/// Every component of `{v = ℓ}` meeting the boundary, each oriented so
/// that `v̄` increases. Components are found from sign changes of `v - ℓ`
/// just inside the boundary; an empty level set gives an empty list.
pub fn trace_level_set<T: Real>(v: &HarmonicFunction<T>, domain: &Domain<T>, level: T) -> Result<Vec<LevelCurve<T>>> {
    let depth = T::lit(1e-7);
    let mut starts = boundary_crossings(v, domain, level, depth)?;
    let curve = domain.boundary();
    let total = curve.length();
    let mut out = Vec::new();
    while let Some(s) = starts.pop() {
        let p = correct(v, inset(domain, s, depth), level)?;
        if !domain.inside(p) {
            continue;
        }
        let (t, _) = tangent(v, p)?;
        // start at the end from which J∇v points inward
        let sign = if domain.inside(p + t * T::lit(1e-5)) { T::one() } else { -T::one() };
        let (mut nodes, end) = march(v, domain, level, p, sign)?;
        let begin = curve.point(curve.at_arclength(s));
        let mut endpoints = (begin, end);
        if sign < T::zero() {
            nodes.reverse();
            endpoints = (end, begin);
        }
        // drop the crossing at the far end
        let (far, _) = curve.closest(end);
        let s_end = curve.arclength_of(far);
        if let Some(k) = starts
            .iter()
            .enumerate()
            .map(|(k, &x)| (k, (x - s_end).abs().min(total - (x - s_end).abs())))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .filter(|&(_, d)| d < T::lit(1e-3))
            .map(|(k, _)| k)
        {
            starts.remove(k);
        }
        out.push(LevelCurve { level, nodes, endpoints });
    }
    out.sort_by(|a, b| {
        let ka = (a.endpoints.0.re.as_f64(), a.endpoints.0.im.as_f64());
        let kb = (b.endpoints.0.re.as_f64(), b.endpoints.0.im.as_f64());
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// The level curve `{v = ℓ}`, or `None` when the level set is empty.
/// Errors if the level set has more than one component.
pub fn trace_level_curve<T: Real>(v: &HarmonicFunction<T>, domain: &Domain<T>, level: T) -> Result<Option<LevelCurve<T>>> {
    if !(level > T::zero()) {
        return Err(Error::InvalidParameter(format!("level {level} must be positive")));
    }
    let mut set = trace_level_set(v, domain, level)?;
    match set.len() {
        0 => Ok(None),
        1 => Ok(set.pop()),
        n => Err(Error::InvalidParameter(format!("level set {level} has {n} components"))),
    }
}

#[derive(Clone, Debug)]
pub struct LevelCheck<T> {
    pub level: T,
    pub components: usize,
    pub nodes: usize,
    /// Smallest increment of `v̄` between consecutive nodes.
    pub min_increment: T,
    /// Nodes where the increment is smallest.
    pub witness: Option<(Cplx<T>, Cplx<T>)>,
}

#[derive(Clone, Copy, Debug)]
pub struct Collision<T> {
    pub first: Cplx<T>,
    pub second: Cplx<T>,
    /// `|Θ(first) - Θ(second)|`.
    pub gap: T,
}

#[derive(Clone, Debug)]
pub struct InjectivityReport<T> {
    pub levels: Vec<LevelCheck<T>>,
    pub probes: usize,
    pub collisions: Vec<Collision<T>>,
    pub curves: Vec<LevelCurve<T>>,
}

impl<T: Real> InjectivityReport<T> {
    pub fn monotone(&self) -> bool {
        self.levels.iter().all(|l| l.min_increment > T::zero())
    }

    pub fn passed(&self) -> bool {
        self.monotone() && self.collisions.is_empty()
    }

    pub fn min_increment(&self) -> T {
        self.levels.iter().map(|l| l.min_increment).fold(T::infinity(), T::min)
    }
}

/// Probe points where the multi-seed inversion check runs.
const INVERSION_PROBES: usize = 64;

/// (a) `v̄` increases strictly along every traced level curve; (b) among
/// `n_probe` quasi-random pairs of interior points more than 1e-3 apart,
/// none have images closer than 1e-9. Part (b) also inverts the images of
/// the first 64 probes from every seed and reports any distant preimage.
pub fn verify_injectivity<T: Real>(map: &HodographMap<T>, levels: &[T], n_probe: usize, seed: u64) -> Result<InjectivityReport<T>> {
    let v = map.completion().base();
    let vb = map.completion().conjugate();
    let domain = map.domain();
    let mut checks = Vec::new();
    let mut curves = Vec::new();
    for &level in levels {
        let set = trace_level_set(v, domain, level)?;
        let mut check = LevelCheck {
            level,
            components: set.len(),
            nodes: 0,
            min_increment: T::infinity(),
            witness: None,
        };
        for c in &set {
            let vals: Vec<T> = c.nodes.iter().map(|&z| vb.value(z)).collect::<Result<_>>()?;
            check.nodes += c.nodes.len();
            for k in 1..vals.len() {
                let inc = vals[k] - vals[k - 1];
                if inc < check.min_increment {
                    check.min_increment = inc;
                    check.witness = Some((c.nodes[k - 1], c.nodes[k]));
                }
            }
        }
        checks.push(check);
        curves.extend(set);
    }

    let pts = domain.interior_samples(2 * n_probe, seed, T::lit(1e-6), None);
    let half = pts.len() / 2;
    let images: Vec<Cplx<T>> = pts.par_iter().map(|&z| map.theta(z)).collect::<Result<_>>()?;
    let sep = T::lit(1e-3);
    let close = T::lit(1e-9);
    let mut collisions: Vec<Collision<T>> = (0..half)
        .filter_map(|i| {
            let (a, b) = (pts[i], pts[i + half]);
            let gap = (images[i] - images[i + half]).norm();
            ((a - b).norm() > sep && gap < close).then_some(Collision { first: a, second: b, gap })
        })
        .collect();
    let extra: Vec<Option<Collision<T>>> = pts
        .par_iter()
        .zip(&images)
        .take(INVERSION_PROBES.min(pts.len()))
        .map(|(&z, &w)| {
            for &(s, _) in &map.seeds {
                let (y, res) = map.newton(w, s);
                if res <= T::tol(1e-10) && (y - z).norm() > sep && map.contains_closed(y) {
                    return Some(Collision { first: z, second: y, gap: res });
                }
            }
            None
        })
        .collect();
    collisions.extend(extra.into_iter().flatten());
    Ok(InjectivityReport {
        levels: checks,
        probes: half,
        collisions,
        curves,
    })
}
