//! Finite-dimensional normed space: points, norms, box domains, convex
//! combination, and deterministic sampling.
//!
//! Everything downstream (mappings, iteration schemes, condition checkers)
//! works over these primitives, so the invariants here are deliberately
//! strict: every stored coordinate is finite, every domain is a non-empty
//! closed box, and sampling is a pure function of (seed, stream, index).

use crate::error::{Error, Result};
use crate::numfmt::g17;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

/// Tolerance for box membership tests. Convex combinations of box members
/// can leave the box by a few ulps in binary64; anything beyond this slack
/// is treated as a genuine escape.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// A point with finite binary64 coordinates, dimension at least one.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPoint);
        }
        for (index, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFiniteCoordinate { index });
            }
        }
        Ok(Point { coords })
    }

    /// One-dimensional point.
    pub fn scalar(v: f64) -> Result<Self> {
        Point::new(vec![v])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Comma-separated coordinates at full precision, e.g. for witnesses.
    pub fn display_g17(&self) -> String {
        self.coords
            .iter()
            .map(|&c| g17(c))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.coords {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Parses comma-separated coordinates: `"0.9"`, `"0.5,0.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let coords: std::result::Result<Vec<f64>, _> =
            s.split(',').map(|t| t.trim().parse::<f64>()).collect();
        match coords {
            Ok(c) if !c.is_empty() => Point::new(c),
            _ => Err(Error::BadPoint {
                text: s.to_string(),
            }),
        }
    }
}

/// Which norm distances are measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// l2, the default everywhere.
    Euclidean,
    /// l-infinity.
    Max,
    /// l1.
    Sum,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Euclidean, NormKind::Max, NormKind::Sum];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::Euclidean => "euclidean",
            NormKind::Max => "max",
            NormKind::Sum => "sum",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(NormKind::Euclidean),
            "max" => Ok(NormKind::Max),
            "sum" => Ok(NormKind::Sum),
            _ => Err(Error::UnknownNorm {
                name: s.to_string(),
            }),
        }
    }
}

/// Norm of a coordinate vector.
pub fn norm(v: &[f64], kind: NormKind) -> f64 {
    match kind {
        NormKind::Euclidean => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
        NormKind::Max => v.iter().fold(0.0, |m, c| m.max(c.abs())),
        NormKind::Sum => v.iter().map(|c| c.abs()).sum(),
    }
}

/// Distance between two points of equal dimension.
pub fn distance(a: &Point, b: &Point, kind: NormKind) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let diff: Vec<f64> = a
        .coords
        .iter()
        .zip(&b.coords)
        .map(|(x, y)| x - y)
        .collect();
    Ok(norm(&diff, kind))
}

/// The convex combination `(1 - alpha) * a + alpha * b`, evaluated in
/// exactly that form coordinatewise. Requires `alpha` in [0, 1].
pub fn convex_combine(alpha: f64, a: &Point, b: &Point) -> Result<Point> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::WeightOutOfRange { alpha });
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let coords = a
        .coords
        .iter()
        .zip(&b.coords)
        .map(|(x, y)| (1.0 - alpha) * x + alpha * y)
        .collect();
    Point::new(coords)
}

/// A non-empty closed box `[l_1, u_1] x ... x [l_d, u_d]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    lower: Point,
    upper: Point,
}

impl Domain {
    pub fn new(lower: Point, upper: Point) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch {
                expected: lower.dim(),
                found: upper.dim(),
            });
        }
        for index in 0..lower.dim() {
            if lower[index] > upper[index] {
                return Err(Error::InvalidDomain {
                    index,
                    lower: lower[index],
                    upper: upper[index],
                });
            }
        }
        Ok(Domain { lower, upper })
    }

    /// The unit box `[0, 1]^d`.
    pub fn unit(dim: usize) -> Result<Self> {
        Domain::new(Point::new(vec![0.0; dim])?, Point::new(vec![1.0; dim])?)
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &Point {
        &self.lower
    }

    pub fn upper(&self) -> &Point {
        &self.upper
    }

    /// Box center, the fixed point of the rotation mapping.
    pub fn center(&self) -> Point {
        let coords = (0..self.dim())
            .map(|i| 0.5 * (self.lower[i] + self.upper[i]))
            .collect();
        Point::new(coords).expect("bounds are finite")
    }

    /// Membership up to `tol` per coordinate.
    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        p.dim() == self.dim()
            && (0..self.dim())
                .all(|i| p[i] >= self.lower[i] - tol && p[i] <= self.upper[i] + tol)
    }

    /// Errors with the violated bound if `p` is not in the box up to `tol`.
    /// `what` names the point's role in the message ("x1", "image of ...").
    pub fn check_membership(&self, p: &Point, tol: f64, what: &str) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        for i in 0..self.dim() {
            if p[i] < self.lower[i] - tol {
                return Err(Error::OutsideDomain {
                    what: what.to_string(),
                    index: i,
                    value: p[i],
                    side: "lower",
                    bound: self.lower[i],
                });
            }
            if p[i] > self.upper[i] + tol {
                return Err(Error::OutsideDomain {
                    what: what.to_string(),
                    index: i,
                    value: p[i],
                    side: "upper",
                    bound: self.upper[i],
                });
            }
        }
        Ok(())
    }

    /// Largest distance between two box points under `kind`.
    pub fn diameter(&self, kind: NormKind) -> f64 {
        distance(&self.lower, &self.upper, kind).expect("equal dims")
    }

    /// The corner selected by `mask`: bit `i` picks the upper bound in
    /// coordinate `i`. Masks run over `0..corner_count()`.
    pub fn corner(&self, mask: u64) -> Point {
        let coords = (0..self.dim())
            .map(|i| {
                if mask >> i & 1 == 1 {
                    self.upper[i]
                } else {
                    self.lower[i]
                }
            })
            .collect();
        Point::new(coords).expect("bounds are finite")
    }

    /// Number of corners enumerated by [`Domain::corner`]. Capped at 2^16 so
    /// high-dimensional boxes stay tractable; beyond the cap only a corner
    /// subset is visited, which weakens enrichment but never correctness.
    pub fn corner_count(&self) -> u64 {
        1u64 << self.dim().min(16)
    }

    /// Parses per-coordinate bounds: `"0,1"` or `"0,1 ; -2,2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for part in s.split(';') {
            let (l, u) = part.split_once(',').ok_or_else(|| Error::BadDomain {
                text: s.to_string(),
            })?;
            let parse = |t: &str| {
                t.trim().parse::<f64>().map_err(|_| Error::BadDomain {
                    text: s.to_string(),
                })
            };
            lower.push(parse(l)?);
            upper.push(parse(u)?);
        }
        Domain::new(Point::new(lower)?, Point::new(upper)?)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{},{}", self.lower[i], self.upper[i])?;
        }
        Ok(())
    }
}

/// How a [`Sampler`] draws points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleStrategy {
    /// Coordinatewise uniform draws only.
    Uniform,
    /// Box corners first, then registered special points, then uniform
    /// draws. Counterexamples of the catalog mappings sit on corners or
    /// special points, so falsification streams use this strategy.
    Enriched,
}

/// Deterministic point stream over a box.
///
/// Uniform draws come from ChaCha8 seeded with `seed` on stream `stream`,
/// so the n-th drawn point is a pure function of (seed, stream, n) and is
/// identical across platforms and runs. Distinct streams under one seed are
/// statistically independent; checkers use them for their sub-streams.
#[derive(Clone, Debug)]
pub struct Sampler {
    domain: Domain,
    strategy: SampleStrategy,
    specials: Vec<Point>,
    rng: ChaCha8Rng,
    next_corner: u64,
    next_special: usize,
}

impl Sampler {
    pub fn new(domain: Domain, seed: u64, strategy: SampleStrategy) -> Self {
        Sampler::with_stream(domain, seed, 0, strategy)
    }

    /// Sampler on a dedicated ChaCha8 stream. Samplers with equal seeds but
    /// different streams produce unrelated uniform draws.
    pub fn with_stream(domain: Domain, seed: u64, stream: u64, strategy: SampleStrategy) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler {
            domain,
            strategy,
            specials: Vec::new(),
            rng,
            next_corner: 0,
            next_special: 0,
        }
    }

    /// Registers points to emit after the corners in enriched order.
    /// Points outside the domain are ignored rather than emitted.
    pub fn with_specials(mut self, specials: &[Point]) -> Self {
        self.specials = specials
            .iter()
            .filter(|p| self.domain.contains(p, MEMBERSHIP_TOL))
            .cloned()
            .collect();
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    fn uniform(&mut self) -> Point {
        let coords = (0..self.domain.dim())
            .map(|i| {
                let l = self.domain.lower[i];
                let u = self.domain.upper[i];
                let r: f64 = self.rng.random();
                l + (u - l) * r
            })
            .collect();
        Point::new(coords).expect("bounds finite, r in [0,1)")
    }
}

impl Iterator for Sampler {
    type Item = Point;

    /// Never returns `None`; the consumer bounds the draw count.
    fn next(&mut self) -> Option<Point> {
        if self.strategy == SampleStrategy::Enriched {
            if self.next_corner < self.domain.corner_count() {
                let p = self.domain.corner(self.next_corner);
                self.next_corner += 1;
                return Some(p);
            }
            if self.next_special < self.specials.len() {
                let p = self.specials[self.next_special].clone();
                self.next_special += 1;
                return Some(p);
            }
        }
        Some(self.uniform())
    }
}

/// First point of the stream that [`Sampler`] produces for these arguments.
pub fn sample(domain: &Domain, seed: u64, strategy: SampleStrategy) -> Point {
    Sampler::new(domain.clone(), seed, strategy)
        .next()
        .expect("sampler is infinite")
}
