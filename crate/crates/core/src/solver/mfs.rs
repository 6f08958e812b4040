//! Method of fundamental solutions: logarithmic charges outside the domain,
//! plus dipoles clustered at corners and data breakpoints, fitted to the
//! Dirichlet trace by truncated least squares.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Knot, Segment};
use crate::linalg::{truncated_lstsq, Matrix};
use crate::scalar::{Cplx, Real, Vec2};
use crate::solver::data::Trace;
use crate::solver::harmonic::{ChargeExpansion, Harmonic, HarmonicFunction};

// Geometric grading of the corner clusters, distances d_j = beta exp(-SIGMA (sqrt K - sqrt j)).
const SIGMA: f64 = 4.0;
const DENSITY_CELLS: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    /// Charges on the offset curve.
    pub charges: usize,
    /// Collocation points on the boundary, at least twice `charges`.
    pub collocation: usize,
    /// Distance of the offset curve from the boundary.
    pub offset: T,
    /// Charge-and-dipole pairs clustered geometrically at each corner and
    /// data breakpoint (0 disables).
    pub cluster: usize,
    /// Boundary residual above which the result carries a warning.
    pub target_residual: T,
    /// Relative singular value cutoff.
    pub truncation: T,
    /// Collocation density doubles within this arc distance of a corner.
    pub refine_radius: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            charges: 96,
            collocation: 192,
            offset: T::lit(0.3),
            cluster: 12,
            target_residual: T::lit(1e-6),
            truncation: T::lit(1e-12),
            refine_radius: T::lit(0.1),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn with_charges(mut self, n: usize) -> Self {
        self.charges = n;
        self.collocation = self.collocation.max(2 * n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.charges < 4 {
            return Err(Error::InvalidParameter(format!("charge count {} < 4", self.charges)));
        }
        if self.collocation < 2 * self.charges {
            return Err(Error::InvalidParameter(format!(
                "collocation count {} < 2 x charges {}",
                self.collocation, self.charges
            )));
        }
        for (name, v) in [
            ("offset", self.offset),
            ("target_residual", self.target_residual),
            ("truncation", self.truncation),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v}")));
            }
        }
        if !(self.refine_radius >= T::zero()) {
            return Err(Error::InvalidParameter(format!("refine_radius = {}", self.refine_radius)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    /// Residual above the configured target.
    AboveTarget,
}

#[derive(Clone, Debug)]
pub struct SolveReport<T> {
    /// Max residual over validation points distinct from the collocation set.
    pub residual: T,
    pub residual_rms: T,
    pub collocation_residual: T,
    pub rank: usize,
    pub columns: usize,
    pub condition: T,
    pub charges: usize,
    pub rows: usize,
    /// Smallest charge distance to the boundary.
    pub offset_min: T,
    /// Range of the trace over the validation points.
    pub data_min: T,
    pub data_max: T,
    pub status: SolveStatus,
}

#[derive(Clone, Debug)]
pub struct Solution<T> {
    pub function: HarmonicFunction<T>,
    pub report: SolveReport<T>,
}

impl<T: Real> Solution<T> {
    pub fn expansion(&self) -> &ChargeExpansion<T> {
        match &self.function {
            HarmonicFunction::Charges(c) => c,
            _ => unreachable!("solver always returns a charge expansion"),
        }
    }
}

/// Boundary node with its arc-length coordinate.
#[derive(Clone, Copy, Debug)]
pub struct Node<T> {
    pub point: Cplx<T>,
    pub s: T,
}

/// Collocation points, validation points and charges for one domain.
#[derive(Clone, Debug)]
pub struct Layout<T> {
    pub collocation: Vec<Node<T>>,
    pub validation: Vec<Node<T>>,
    pub charges: Vec<Cplx<T>>,
    /// Dipole centres; each carries a complex moment (two unknowns).
    pub dipoles: Vec<Cplx<T>>,
    pub offset_min: T,
}

/// Knots where the solution may be singular: corners and junctions of
/// curved graph pieces.
pub fn singular_knots<T: Real>(domain: &Domain<T>) -> Vec<Knot<T>> {
    let segs = domain.boundary().segments();
    let n = segs.len();
    let curved_graph = |i: usize| matches!(&segs[i], Segment::Graph { profile, .. } if !profile.is_piecewise_linear());
    domain
        .boundary()
        .knots()
        .iter()
        .filter(|k| k.is_corner() || curved_graph(k.index % n) || curved_graph((k.index + n - 1) % n))
        .copied()
        .collect()
}

fn arc_gap<T: Real>(a: T, b: T, total: T) -> T {
    let d = (a - b).abs();
    d.min(total - d)
}

/// Piecewise-constant density in arc length, inverted on a fine grid.
struct Grading<T> {
    cum: Vec<T>,
    cell: T,
}

impl<T: Real> Grading<T> {
    fn new(total: T, knots: &[T], radius: T) -> Self {
        let cell = total / T::from_usize_lossy(DENSITY_CELLS);
        let mut cum = Vec::with_capacity(DENSITY_CELLS + 1);
        cum.push(T::zero());
        let mut acc = T::zero();
        for i in 0..DENSITY_CELLS {
            let s = (T::from_usize_lossy(i) + T::lit(0.5)) * cell;
            let dense = knots.iter().any(|&k| arc_gap(s, k, total) < radius);
            acc += if dense { T::lit(2.0) } else { T::one() };
            cum.push(acc);
        }
        cum.iter_mut().for_each(|c| *c /= acc);
        Self { cum, cell }
    }

    /// Arc length at cumulative fraction `u` in `[0, 1]`.
    fn at(&self, u: T) -> T {
        let i = self.cum.partition_point(|&c| c <= u).clamp(1, self.cum.len() - 1) - 1;
        let (c0, c1) = (self.cum[i], self.cum[i + 1]);
        (T::from_usize_lossy(i) + (u - c0) / (c1 - c0)) * self.cell
    }
}

fn node<T: Real>(domain: &Domain<T>, s: T) -> Node<T> {
    let curve = domain.boundary();
    let s = curve.wrap(s);
    Node {
        point: curve.point(curve.at_arclength(s)),
        s,
    }
}

/// Charge layout for `domain`; `breakpoints` are arc-length positions where
/// the boundary data loses smoothness and get a charge cluster like corners.
pub fn layout<T: Real>(domain: &Domain<T>, config: &SolverConfig<T>, breakpoints: &[T]) -> Result<Layout<T>> {
    config.validate()?;
    let curve = domain.boundary();
    let total = curve.length();
    let knots = singular_knots(domain);
    let knot_s: Vec<T> = knots.iter().map(|k| k.arclength).collect();
    let grading = Grading::new(total, &knot_s, config.refine_radius);
    let half = T::lit(0.5);
    let frac = |i: usize, n: usize, shift: T| (T::from_usize_lossy(i) + shift) / T::from_usize_lossy(n);

    let m = config.collocation;
    let mut collocation: Vec<Node<T>> = (0..m).map(|i| node(domain, grading.at(frac(i, m, half)))).collect();
    let mut validation: Vec<Node<T>> = (0..m).map(|i| node(domain, grading.at(frac(i, m, T::zero())))).collect();

    let mut charges = Vec::new();
    let mut dipoles = Vec::new();
    let mut offset_min = T::infinity();
    let n = config.charges;
    for i in 0..n {
        let s = grading.at(frac(i, n, T::lit(0.25)));
        let at = curve.at_arclength(s);
        let normal = curve.outward_normal(at);
        let z = curve.point(at) + normal.to_complex() * config.offset;
        let dist = domain.distance_to_boundary(z);
        if !domain.inside(z) && dist >= config.offset * half {
            charges.push(z);
            offset_min = offset_min.min(dist);
        }
    }

    if config.cluster > 0 {
        // cluster sites: singular knots along the bisector, data breakpoints along the normal
        let mut sites: Vec<(T, Cplx<T>, Vec2<T>)> = knots.iter().map(|k| (k.arclength, k.point, bisector(domain, k))).collect();
        for &b in breakpoints {
            let b = curve.wrap(b);
            if sites.iter().any(|s| arc_gap(s.0, b, total) < T::tol(1e-9)) {
                continue;
            }
            let at = curve.at_arclength(b);
            sites.push((b, curve.point(at), curve.outward_normal(at)));
        }
        let mut marks: Vec<T> = curve.knots().iter().map(|k| k.arclength).collect();
        marks.extend(sites.iter().map(|s| s.0));
        for &(s0, p0, dir) in &sites {
            // half the arc distance to the nearest other knot or site
            let reach = marks
                .iter()
                .map(|&s| arc_gap(s, s0, total))
                .filter(|&g| g > T::tol(1e-9))
                .fold(total, T::min)
                * half;
            let beta = config.offset.min(reach);
            let kk = T::from_usize_lossy(config.cluster);
            for j in 1..=config.cluster {
                let d = beta * (-T::lit(SIGMA) * (kk.sqrt() - T::from_usize_lossy(j).sqrt())).exp();
                let z = p0 + dir.to_complex() * d;
                let dist = domain.distance_to_boundary(z);
                if !domain.inside(z) && dist >= d * T::lit(0.25) {
                    charges.push(z);
                    // the dipole carries the part odd along the boundary
                    dipoles.push(z);
                    offset_min = offset_min.min(dist);
                }
                for (f, into_colloc) in [(0.5, true), (1.0, true), (2.0, true), (0.75, false), (1.5, false)] {
                    let ds = d * T::lit(f);
                    if ds >= reach {
                        continue;
                    }
                    for sign in [T::one(), -T::one()] {
                        let nd = node(domain, s0 + sign * ds);
                        if into_colloc {
                            collocation.push(nd);
                        } else {
                            validation.push(nd);
                        }
                    }
                }
            }
        }
    }
    if charges.is_empty() {
        return Err(Error::InvalidParameter("no admissible charge positions".into()));
    }
    Ok(Layout {
        collocation,
        validation,
        charges,
        dipoles,
        offset_min,
    })
}

/// Outward bisector at a knot: the normalized sum of the one-sided normals.
fn bisector<T: Real>(domain: &Domain<T>, k: &Knot<T>) -> Vec2<T> {
    let curve = domain.boundary();
    let n = curve.segments().len();
    let before = crate::geometry::CurvePoint {
        segment: (k.index + n - 1) % n,
        t: T::one(),
    };
    let after = crate::geometry::CurvePoint {
        segment: k.index % n,
        t: T::zero(),
    };
    let sum = curve.outward_normal(before) + curve.outward_normal(after);
    if sum.norm() < T::lit(1e-6) {
        curve.outward_normal(after)
    } else {
        sum.normalized()
    }
}

/// Solves `Δv = 0` with `v = trace` on the whole boundary.
pub fn solve_dirichlet<T: Real>(domain: &Domain<T>, trace: &Trace<T>, config: &SolverConfig<T>) -> Result<Solution<T>> {
    let layout = layout(domain, config, &trace.breakpoints())?;
    solve_on_layout(&layout, trace, config)
}

pub fn solve_on_layout<T: Real>(layout: &Layout<T>, trace: &Trace<T>, config: &SolverConfig<T>) -> Result<Solution<T>> {
    let rows = layout.collocation.len();
    let nc = layout.charges.len();
    let cols = 1 + nc + 2 * layout.dipoles.len();
    let mut a = Matrix::zeros(rows, cols);
    let half = T::lit(0.5);
    a.columns_mut().enumerate().collect::<Vec<_>>().into_par_iter().for_each(|(j, col)| {
        for (i, entry) in col.iter_mut().enumerate() {
            let x = layout.collocation[i].point;
            *entry = if j == 0 {
                T::one()
            } else if j <= nc {
                half * (x - layout.charges[j - 1]).norm_sqr().ln()
            } else {
                // Im(m / w) = (-Re m Im w + Im m Re w) / |w|^2
                let k = j - 1 - nc;
                let w = x - layout.dipoles[k / 2];
                if k % 2 == 0 {
                    -w.im / w.norm_sqr()
                } else {
                    w.re / w.norm_sqr()
                }
            };
        }
    });
    let rhs: Vec<T> = layout.collocation.iter().map(|n| trace.at(n.point, n.s)).collect();
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("boundary trace".into()));
    }
    let ls = truncated_lstsq(&a, &rhs, config.truncation);
    let condition = ls.condition();
    if ls.rank * 10 < cols {
        return Err(Error::RankDeficient {
            rank: ls.rank,
            columns: cols,
            condition: condition.as_f64(),
        });
    }
    let x = &ls.solution;
    let moments = x[1 + nc..].chunks(2).map(|m| Cplx::new(m[0], m[1])).collect();
    let expansion = ChargeExpansion::new(x[0], layout.charges.clone(), x[1..=nc].to_vec())
        .with_dipoles(layout.dipoles.clone(), moments);

    let errors = |nodes: &[Node<T>]| -> Result<Vec<T>> {
        nodes
            .par_iter()
            .map(|n| Ok((expansion.value(n.point)? - trace.at(n.point, n.s)).abs()))
            .collect()
    };
    let verr = errors(&layout.validation)?;
    let cerr = errors(&layout.collocation)?;
    let residual = verr.iter().copied().fold(T::zero(), T::max);
    let residual_rms = (verr.iter().map(|&e| e * e).sum::<T>() / T::from_usize_lossy(verr.len())).sqrt();
    let collocation_residual = cerr.iter().copied().fold(T::zero(), T::max);
    let data: Vec<T> = layout.validation.iter().map(|n| trace.at(n.point, n.s)).collect();
    let status = if residual.max(collocation_residual) <= config.target_residual {
        SolveStatus::Converged
    } else {
        SolveStatus::AboveTarget
    };
    Ok(Solution {
        report: SolveReport {
            residual: residual.max(collocation_residual),
            residual_rms,
            collocation_residual,
            rank: ls.rank,
            columns: cols,
            condition,
            charges: layout.charges.len(),
            rows,
            offset_min: layout.offset_min,
            data_min: data.iter().copied().fold(T::infinity(), T::min),
            data_max: data.iter().copied().fold(T::neg_infinity(), T::max),
            status,
        },
        function: HarmonicFunction::Charges(expansion),
    })
}
