//! Self-maps of a box domain, with metadata the checkers and schemes rely
//! on: declared fixed points, special points for the enriched sampler, and
//! sampled self-map validation at registration time.

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::space::{
    distance, Domain, NormKind, Point, SampleStrategy, Sampler, MEMBERSHIP_TOL,
};
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Seed for the sampled self-map validation run at registration. Fixed so
/// that acceptance or rejection of a mapping is deterministic.
const VALIDATION_SEED: u64 = 0x5eed;

/// Enriched sample size used to probe the self-map property.
const VALIDATION_SAMPLES: usize = 256;

/// Hand-coded mapping bodies available in the default catalog.
#[derive(Clone, Debug)]
pub enum Builtin {
    /// `x/2` away from 1 and `5/8` at exactly 1, on `[0,1]`. Discontinuous
    /// at 1, where the enriched sampler must land exactly; its only fixed
    /// point is 0.
    PiecewiseHalving,
    Identity,
    /// Every input maps to the stored point.
    Constant(Point),
    /// Coordinatewise scaling toward the origin by a factor in `[0,1)`.
    Contraction(f64),
    /// `1 - x` on `[0,1]`.
    Reflection,
    /// Quarter turn about the box center. Requires dimension 2 and a
    /// square box; an exact isometry in all three norms.
    QuarterTurn,
    /// `x^2` on `[0,1]`. Fixes 0 and 1 but pushes interior points toward 0,
    /// so it fails quasi-nonexpansiveness at 1; the negative control.
    Square,
}

impl Builtin {
    fn apply(&self, domain: &Domain, x: &Point) -> Point {
        let out = match self {
            Builtin::PiecewiseHalving => {
                if x[0] == 1.0 {
                    vec![0.625]
                } else {
                    vec![x[0] / 2.0]
                }
            }
            Builtin::Identity => return x.clone(),
            Builtin::Constant(c) => return c.clone(),
            Builtin::Contraction(lambda) => {
                x.coords().iter().map(|c| lambda * c).collect()
            }
            Builtin::Reflection => vec![1.0 - x[0]],
            Builtin::QuarterTurn => {
                let c = domain.center();
                vec![c[0] - (x[1] - c[1]), c[1] + (x[0] - c[0])]
            }
            Builtin::Square => vec![x[0] * x[0]],
        };
        Point::new(out).expect("builtin bodies preserve finiteness")
    }

    fn describe(&self) -> String {
        match self {
            Builtin::PiecewiseHalving => "x == 1 ? 5/8 : x/2".to_string(),
            Builtin::Identity => "identity".to_string(),
            Builtin::Constant(c) => format!("constant ({c})"),
            Builtin::Contraction(lambda) => format!("{lambda} * x"),
            Builtin::Reflection => "1 - x".to_string(),
            Builtin::QuarterTurn => "quarter turn about the center".to_string(),
            Builtin::Square => "x ^ 2".to_string(),
        }
    }
}

/// How a mapping computes its image: a hand-coded body or parsed
/// expressions, one per output coordinate.
#[derive(Clone, Debug)]
pub enum MappingBody {
    Builtin(Builtin),
    Exprs { source: String, asts: Vec<Expr> },
}

/// Declared fixed-point set `F(T)`. Finite lists cover every catalog entry
/// except the identity, whose fixed-point set is the whole domain; checkers
/// that quantify over `F(T)` handle both shapes.
#[derive(Clone, Debug, PartialEq)]
pub enum FixedPointSet {
    Points(Vec<Point>),
    WholeDomain,
}

impl FixedPointSet {
    /// Finite members, when the set is a list.
    pub fn points(&self) -> Option<&[Point]> {
        match self {
            FixedPointSet::Points(pts) => Some(pts),
            FixedPointSet::WholeDomain => None,
        }
    }

    /// `d(x, F(T))` under `k`; zero when every point is fixed.
    pub fn distance_from(&self, x: &Point, k: NormKind) -> Result<f64> {
        match self {
            FixedPointSet::WholeDomain => Ok(0.0),
            FixedPointSet::Points(pts) => {
                let mut best = f64::INFINITY;
                for p in pts {
                    best = best.min(distance(x, p, k)?);
                }
                Ok(best)
            }
        }
    }

    /// Whether `p` is (within 1e-12) a declared fixed point.
    pub fn declares(&self, p: &Point, domain: &Domain) -> bool {
        match self {
            FixedPointSet::WholeDomain => domain.contains(p, MEMBERSHIP_TOL),
            FixedPointSet::Points(pts) => pts.iter().any(|q| {
                distance(p, q, NormKind::Euclidean)
                    .map(|d| d <= 1e-12)
                    .unwrap_or(false)
            }),
        }
    }
}

/// A self-map `T` of a box domain plus checker-facing metadata.
///
/// Immutable after registration; share via the [`Catalog`]'s `Arc`s.
#[derive(Clone, Debug)]
pub struct MappingSpec {
    id: String,
    domain: Domain,
    body: MappingBody,
    known_fixed_points: Option<FixedPointSet>,
    special_points: Vec<Point>,
}

impl MappingSpec {
    pub fn builtin(id: &str, domain: Domain, body: Builtin) -> Self {
        MappingSpec {
            id: id.to_string(),
            domain,
            body: MappingBody::Builtin(body),
            known_fixed_points: None,
            special_points: Vec::new(),
        }
    }

    /// Parses `src` in the expression language, one output per coordinate.
    pub fn from_expr(id: &str, domain: Domain, src: &str) -> Result<Self> {
        let asts = expr::parse(src, domain.dim())?;
        if asts.len() != domain.dim() {
            return Err(Error::OutputArity {
                id: id.to_string(),
                declared: asts.len(),
                dim: domain.dim(),
            });
        }
        Ok(MappingSpec {
            id: id.to_string(),
            domain,
            body: MappingBody::Exprs {
                source: src.to_string(),
                asts,
            },
            known_fixed_points: None,
            special_points: Vec::new(),
        })
    }

    pub fn with_fixed_points(mut self, points: Vec<Point>) -> Self {
        self.known_fixed_points = Some(FixedPointSet::Points(points));
        self
    }

    /// Declares that every domain point is fixed (the identity mapping).
    pub fn with_all_points_fixed(mut self) -> Self {
        self.known_fixed_points = Some(FixedPointSet::WholeDomain);
        self
    }

    pub fn with_special_points(mut self, points: Vec<Point>) -> Self {
        self.special_points = points;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn body(&self) -> &MappingBody {
        &self.body
    }

    /// Expression source when the body came from [`MappingSpec::from_expr`].
    pub fn expr_source(&self) -> Option<&str> {
        match &self.body {
            MappingBody::Exprs { source, .. } => Some(source),
            MappingBody::Builtin(_) => None,
        }
    }

    /// Human-readable body description for summaries.
    pub fn describe_body(&self) -> String {
        match &self.body {
            MappingBody::Builtin(b) => b.describe(),
            MappingBody::Exprs { source, .. } => source.clone(),
        }
    }

    pub fn known_fixed_points(&self) -> Option<&FixedPointSet> {
        self.known_fixed_points.as_ref()
    }

    /// The declared fixed-point set, or an error naming the operation that
    /// needed it. Checkers quantifying over `F(T)` call this.
    pub fn require_fixed_points(&self, operation: &'static str) -> Result<&FixedPointSet> {
        self.known_fixed_points
            .as_ref()
            .filter(|set| !matches!(set, FixedPointSet::Points(pts) if pts.is_empty()))
            .ok_or_else(|| Error::MissingFixedPoints {
                id: self.id.clone(),
                operation,
            })
    }

    pub fn special_points(&self) -> &[Point] {
        &self.special_points
    }

    /// Applies `T` to a domain member. The input is membership-checked to
    /// tolerance 1e-12; the output is not re-checked per call because the
    /// self-map property was validated at registration.
    pub fn evaluate(&self, x: &Point) -> Result<Point> {
        self.domain
            .check_membership(x, MEMBERSHIP_TOL, &format!("input to mapping {:?}", self.id))?;
        self.apply(x)
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        match &self.body {
            MappingBody::Builtin(b) => Ok(b.apply(&self.domain, x)),
            MappingBody::Exprs { asts, .. } => expr::evaluate_ast(asts, x),
        }
    }

    /// `‖Tx - x‖` under `k`; zero exactly at a fixed point.
    pub fn residual(&self, x: &Point, k: NormKind) -> Result<f64> {
        let tx = self.evaluate(x)?;
        distance(&tx, x, k)
    }

    /// Enriched sampler over the domain with this mapping's special points
    /// registered, on the given ChaCha8 stream.
    pub fn enriched_sampler(&self, seed: u64, stream: u64) -> Sampler {
        Sampler::with_stream(self.domain.clone(), seed, stream, SampleStrategy::Enriched)
            .with_specials(&self.special_points)
    }

    /// Registration-time validation: declared points are domain members,
    /// declared fixed points have residual at most 1e-12, and an enriched
    /// sample of the domain stays inside under `T`. Sampled, not proved.
    pub fn validate(&self) -> Result<()> {
        let declared_points = match &self.known_fixed_points {
            Some(FixedPointSet::Points(pts)) => pts.as_slice(),
            _ => &[],
        };
        for p in declared_points {
            self.domain
                .check_membership(p, MEMBERSHIP_TOL, "declared fixed point")?;
            self.check_fixed(p)?;
        }
        for p in &self.special_points {
            self.domain
                .check_membership(p, MEMBERSHIP_TOL, "declared special point")?;
        }
        let everywhere_fixed = matches!(
            self.known_fixed_points,
            Some(FixedPointSet::WholeDomain)
        );
        let sampler = self.enriched_sampler(VALIDATION_SEED, 0);
        for x in sampler.take(VALIDATION_SAMPLES) {
            let tx = self.apply(&x)?;
            match self.domain.check_membership(&tx, MEMBERSHIP_TOL, "image") {
                Ok(()) => {}
                Err(Error::OutsideDomain {
                    index, side, bound, ..
                }) => {
                    return Err(Error::NotSelfMap {
                        id: self.id.clone(),
                        x: x.to_string(),
                        image: tx.to_string(),
                        index,
                        side,
                        bound,
                    })
                }
                Err(other) => return Err(other),
            }
            if everywhere_fixed {
                self.check_fixed(&x)?;
            }
        }
        Ok(())
    }

    fn check_fixed(&self, p: &Point) -> Result<()> {
        let r = self.residual(p, NormKind::Euclidean)?;
        if r > 1e-12 {
            return Err(Error::NotAFixedPoint {
                id: self.id.clone(),
                point: p.to_string(),
                residual: r,
            });
        }
        Ok(())
    }
}

/// Registry of named mappings. Lookup is concurrent; registration is
/// serialized and runs [`MappingSpec::validate`], rejecting violators.
pub struct Catalog {
    maps: RwLock<HashMap<String, Arc<MappingSpec>>>,
}

impl Catalog {
    pub fn empty() -> Self {
        Catalog {
            maps: RwLock::new(HashMap::new()),
        }
    }

    /// The built-in catalog:
    ///
    /// * `paper_example`: the piecewise halving map `x/2` away from 1,
    ///   `5/8` at 1, on `[0,1]`; fixed point 0, special point 1. This is
    ///   the worked example behind the bundled reference table.
    /// * `identity` on `[0,1]`, declaring the whole domain as its
    ///   fixed-point set.
    /// * `constant` `0.25` on `[0,1]`.
    /// * `contraction` `0.5 * x` on `[0,1]`.
    /// * `reflection` `1 - x` on `[0,1]`.
    /// * `rotation`: quarter turn of the unit square about its center,
    ///   nonexpansive in l2 (and exactly so in max and sum norms too).
    /// * `quadratic` `x^2` on `[0,1]`: fails quasi-nonexpansiveness at
    ///   the fixed point 1 with witness x = 0.5; the negative control.
    pub fn with_builtins() -> Self {
        let catalog = Catalog::empty();
        let unit1 = Domain::unit(1).expect("static");
        let unit2 = Domain::unit(2).expect("static");
        let p = |v: f64| Point::scalar(v).expect("static");
        let entries = vec![
            MappingSpec::builtin("paper_example", unit1.clone(), Builtin::PiecewiseHalving)
                .with_fixed_points(vec![p(0.0)])
                .with_special_points(vec![p(1.0)]),
            MappingSpec::builtin("identity", unit1.clone(), Builtin::Identity)
                .with_all_points_fixed(),
            MappingSpec::builtin("constant", unit1.clone(), Builtin::Constant(p(0.25)))
                .with_fixed_points(vec![p(0.25)])
                .with_special_points(vec![p(0.25)]),
            MappingSpec::builtin("contraction", unit1.clone(), Builtin::Contraction(0.5))
                .with_fixed_points(vec![p(0.0)]),
            MappingSpec::builtin("reflection", unit1.clone(), Builtin::Reflection)
                .with_fixed_points(vec![p(0.5)])
                .with_special_points(vec![p(0.5)]),
            MappingSpec::builtin("rotation", unit2, Builtin::QuarterTurn)
                .with_fixed_points(vec![Point::new(vec![0.5, 0.5]).expect("static")]),
            MappingSpec::builtin("quadratic", unit1, Builtin::Square)
                .with_fixed_points(vec![p(0.0), p(1.0)])
                .with_special_points(vec![p(0.5)]),
        ];
        for spec in entries {
            catalog
                .register(spec)
                .expect("built-in mappings validate");
        }
        catalog
    }

    pub fn register(&self, spec: MappingSpec) -> Result<String> {
        let id = spec.id().to_string();
        if self.maps.read().expect("catalog lock").contains_key(&id) {
            return Err(Error::DuplicateMapping(id));
        }
        spec.validate()?;
        let mut maps = self.maps.write().expect("catalog lock");
        if maps.contains_key(&id) {
            return Err(Error::DuplicateMapping(id));
        }
        maps.insert(id.clone(), Arc::new(spec));
        Ok(id)
    }

    pub fn lookup(&self, id: &str) -> Result<Arc<MappingSpec>> {
        self.maps
            .read()
            .expect("catalog lock")
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownMapping(id.to_string()))
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .maps
            .read()
            .expect("catalog lock")
            .keys()
            .cloned()
            .collect();
        ids.sort();
        ids
    }
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> Catalog {
        Catalog::with_builtins()
    }

    fn p1(v: f64) -> Point {
        Point::scalar(v).unwrap()
    }

    #[test]
    fn piecewise_halving_values() {
        let t = catalog().lookup("paper_example").unwrap();
        assert_eq!(t.evaluate(&p1(1.0)).unwrap(), p1(0.625));
        assert_eq!(t.evaluate(&p1(0.0)).unwrap(), p1(0.0));
        assert_eq!(t.evaluate(&p1(0.8)).unwrap(), p1(0.4));
        assert_eq!(t.evaluate(&p1(0.9)).unwrap(), p1(0.45));
    }

    #[test]
    fn piecewise_halving_residuals() {
        let t = catalog().lookup("paper_example").unwrap();
        assert_eq!(t.residual(&p1(1.0), NormKind::Euclidean).unwrap(), 0.375);
        assert_eq!(t.residual(&p1(0.0), NormKind::Euclidean).unwrap(), 0.0);
        assert_eq!(t.residual(&p1(0.9), NormKind::Euclidean).unwrap(), 0.45);
    }

    #[test]
    fn evaluate_rejects_points_outside_the_domain() {
        let t = catalog().lookup("paper_example").unwrap();
        let err = t.evaluate(&p1(1.5)).unwrap_err();
        match err {
            Error::OutsideDomain {
                side, bound, value, ..
            } => {
                assert_eq!(side, "upper");
                assert_eq!(bound, 1.0);
                assert_eq!(value, 1.5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn registration_validates_the_self_map_property() {
        let c = Catalog::empty();
        let ok = MappingSpec::from_expr("ident", Domain::unit(1).unwrap(), "x").unwrap();
        assert_eq!(c.register(ok).unwrap(), "ident");

        let doubler =
            MappingSpec::from_expr("doubler", Domain::unit(1).unwrap(), "2 * x").unwrap();
        let err = c.register(doubler).unwrap_err();
        match err {
            Error::NotSelfMap { x, image, .. } => {
                assert_eq!(x, "1");
                assert_eq!(image, "2");
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(c.lookup("doubler").is_err(), "rejected maps are not stored");
    }

    #[test]
    fn registration_rejects_bogus_fixed_points() {
        let c = Catalog::empty();
        let spec = MappingSpec::from_expr("half", Domain::unit(1).unwrap(), "x/2")
            .unwrap()
            .with_fixed_points(vec![p1(0.5)]);
        assert!(matches!(
            c.register(spec),
            Err(Error::NotAFixedPoint { .. })
        ));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let c = catalog();
        let again = MappingSpec::builtin(
            "identity",
            Domain::unit(1).unwrap(),
            Builtin::Identity,
        );
        assert!(matches!(
            c.register(again),
            Err(Error::DuplicateMapping(id)) if id == "identity"
        ));
    }

    #[test]
    fn lookup_exposes_declared_metadata() {
        let t = catalog().lookup("paper_example").unwrap();
        assert_eq!(
            t.known_fixed_points().unwrap(),
            &FixedPointSet::Points(vec![p1(0.0)])
        );
        assert_eq!(t.special_points(), &[p1(1.0)]);
        assert!(catalog().lookup("no_such_map").is_err());
    }

    #[test]
    fn every_catalog_fixed_point_has_tiny_residual() {
        let c = catalog();
        for id in c.ids() {
            let t = c.lookup(&id).unwrap();
            match t.known_fixed_points().unwrap() {
                FixedPointSet::Points(pts) => {
                    for p in pts {
                        let r = t.residual(p, NormKind::Euclidean).unwrap();
                        assert!(r <= 1e-12, "{id} at {p}: residual {r:e}");
                    }
                }
                FixedPointSet::WholeDomain => {
                    assert_eq!(id, "identity");
                    for x in t.enriched_sampler(5, 0).take(100) {
                        assert_eq!(t.residual(&x, NormKind::Euclidean).unwrap(), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn fixed_point_set_distances() {
        let c = catalog();
        let ident = c.lookup("identity").unwrap();
        let set = ident.known_fixed_points().unwrap();
        assert_eq!(
            set.distance_from(&p1(0.3), NormKind::Euclidean).unwrap(),
            0.0
        );
        assert!(set.declares(&p1(0.3), ident.domain()));

        let quad = c.lookup("quadratic").unwrap();
        let set = quad.known_fixed_points().unwrap();
        assert_eq!(
            set.distance_from(&p1(0.75), NormKind::Euclidean).unwrap(),
            0.25
        );
        assert!(set.declares(&p1(1.0), quad.domain()));
        assert!(!set.declares(&p1(0.75), quad.domain()));
    }

    #[test]
    fn piecewise_halving_is_quasi_nonexpansive_toward_zero() {
        // |Tx| <= |x| exactly in binary64 over an enriched 1e4 sample.
        let t = catalog().lookup("paper_example").unwrap();
        for x in t.enriched_sampler(11, 0).take(10_000) {
            let tx = t.evaluate(&x).unwrap();
            assert!(tx[0].abs() <= x[0].abs(), "x = {}", x[0]);
        }
    }

    #[test]
    fn quadratic_violates_quasi_nonexpansiveness_at_one() {
        let t = catalog().lookup("quadratic").unwrap();
        let x = p1(0.5);
        let fixed = p1(1.0);
        let tx = t.evaluate(&x).unwrap();
        let lhs = distance(&tx, &fixed, NormKind::Euclidean).unwrap();
        let rhs = distance(&x, &fixed, NormKind::Euclidean).unwrap();
        assert_eq!(lhs, 0.75);
        assert_eq!(rhs, 0.5);
        assert!(lhs > rhs);
    }

    #[test]
    fn quarter_turn_is_an_exact_isometry_of_the_square() {
        let t = catalog().lookup("rotation").unwrap();
        let center = Point::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(t.evaluate(&center).unwrap(), center);
        let corner = Point::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(
            t.evaluate(&corner).unwrap(),
            Point::new(vec![1.0, 1.0]).unwrap()
        );
        let mut sampler = t.enriched_sampler(3, 0);
        for _ in 0..500 {
            let a = sampler.next().unwrap();
            let b = sampler.next().unwrap();
            let ta = t.evaluate(&a).unwrap();
            let tb = t.evaluate(&b).unwrap();
            for k in NormKind::ALL {
                let before = distance(&a, &b, k).unwrap();
                let after = distance(&ta, &tb, k).unwrap();
                assert!(
                    (before - after).abs() <= 1e-12 * (1.0 + before),
                    "{k}: {before} vs {after}"
                );
            }
        }
    }

    #[test]
    fn expression_body_matches_builtin_everywhere() {
        // The parsed form of the piecewise halving map agrees bitwise with
        // the hand-coded body on 1e5 enriched samples.
        let c = catalog();
        let builtin = c.lookup("paper_example").unwrap();
        let parsed = MappingSpec::from_expr(
            "parsed_halving",
            Domain::unit(1).unwrap(),
            "x == 1 ? 5/8 : x/2",
        )
        .unwrap()
        .with_fixed_points(vec![p1(0.0)])
        .with_special_points(vec![p1(1.0)]);
        c.register(parsed).unwrap();
        let parsed = c.lookup("parsed_halving").unwrap();
        for x in builtin.enriched_sampler(17, 0).take(100_000) {
            let a = builtin.evaluate(&x).unwrap();
            let b = parsed.evaluate(&x).unwrap();
            assert_eq!(a[0].to_bits(), b[0].to_bits(), "diverged at x = {}", x[0]);
        }
    }

    #[test]
    fn expr_mapping_requires_one_output_per_coordinate() {
        let err =
            MappingSpec::from_expr("swap", Domain::unit(2).unwrap(), "x[1]").unwrap_err();
        assert!(matches!(err, Error::OutputArity { declared: 1, dim: 2, .. }));
    }
}
