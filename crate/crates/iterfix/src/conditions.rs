//! Sampled falsification of mapping-class conditions.
//!
//! Each checker draws a deterministic sample stream from the mapping's
//! domain and searches for a counterexample to one inequality family. A
//! passing verdict means "no counterexample found within budget", never a
//! proof: the conditions quantify over continua and sampling can only
//! falsify. Premises are compared exactly; a conclusion only counts as
//! violated when it exceeds its bound by more than the tolerance, so
//! floating-point near-ties are not reported.
//!
//! Sampling is pure in `(seed, stream, index)`, which buys two invariants:
//! equal `(mapping, parameters, seed, budget)` produce byte-equal reports,
//! and a counterexample found with budget `B` is still found with any
//! budget `>= B` under the same seed, because every stream is a
//! deterministic prefix-extensible sequence.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::mapping::{FixedPointSet, MappingSpec};
use crate::numfmt::g17;
use crate::space::{convex_combine, distance, NormKind, Point, SampleStrategy, Sampler};

/// Conclusion violations must exceed their bound by more than this.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Pair budget for the two-point conditions.
pub const DEFAULT_PAIR_BUDGET: u64 = 100_000;
/// Point budget for the one-point conditions, and the x quantifier of the
/// interpolated-pair condition.
pub const DEFAULT_POINT_BUDGET: u64 = 10_000;
/// Admissible (p, q) pairs sampled per base point x.
pub const DEFAULT_PQ_BUDGET: u64 = 100;
/// Grid points for the alpha quantifier on [a, 1].
pub const DEFAULT_ALPHA_GRID: usize = 16;

// Stream ids keep the checkers' draws independent of one another while
// staying pure in (seed, stream, index).
const X_STREAM: u64 = 0;
const Y_STREAM: u64 = 1;
const P_STREAM: u64 = 2;
const Q_STREAM: u64 = 3;

// Per-x streams for the admissible-pair search, so enlarging the x budget
// never perturbs the pairs an earlier x saw.
fn pq_streams(x_index: u64) -> (u64, u64) {
    ((1 << 32) | (2 * x_index), (1 << 32) | (2 * x_index + 1))
}

/// Which inequality family a report covers. The names are the strings the
/// command line accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionId {
    /// `‖Tx - p‖ <= ‖x - p‖` for every declared fixed point p.
    QuasiNonexpansive,
    /// `(1/2)‖x - Tx‖ <= ‖x - y‖` implies `‖Tx - Ty‖ <= ‖x - y‖`.
    ConditionC,
    /// `‖Tx - Ty‖ <= ‖x - y‖` for y interpolated from admissible pairs.
    ConditionDa,
    /// `‖Tx - x‖ <= ‖Ty - y‖` implies `‖x - Ty‖ <= 3‖Tx - x‖ + ‖x - y‖`.
    Lemma1,
    /// `‖x - Tx‖ >= h(d(x, F(T)))` for a rate function h.
    ConditionI,
}

impl ConditionId {
    pub const ALL: [ConditionId; 5] = [
        ConditionId::QuasiNonexpansive,
        ConditionId::ConditionC,
        ConditionId::ConditionDa,
        ConditionId::Lemma1,
        ConditionId::ConditionI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionId::QuasiNonexpansive => "quasi",
            ConditionId::ConditionC => "C",
            ConditionId::ConditionDa => "Da",
            ConditionId::Lemma1 => "lemma1",
            ConditionId::ConditionI => "I",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quasi" => Ok(ConditionId::QuasiNonexpansive),
            "c" => Ok(ConditionId::ConditionC),
            "da" => Ok(ConditionId::ConditionDa),
            "lemma1" => Ok(ConditionId::Lemma1),
            "i" => Ok(ConditionId::ConditionI),
            _ => Err(Error::BadParameter {
                name: "condition",
                detail: format!("unknown condition {s:?}, expected one of quasi, C, Da, lemma1, I"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    NoCounterexampleFound,
    Counterexample,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NoCounterexampleFound => "no_counterexample_found",
            Verdict::Counterexample => "counterexample",
        })
    }
}

/// Everything needed to recheck a reported violation without sampling.
#[derive(Clone, Debug)]
pub enum Witness {
    Quasi {
        x: Point,
        p: Point,
        lhs: f64,
        rhs: f64,
    },
    ConditionC {
        x: Point,
        y: Point,
        /// `(1/2)‖x - Tx‖`; the premise bound is `rhs`.
        premise_lhs: f64,
        lhs: f64,
        rhs: f64,
    },
    ConditionDa {
        x: Point,
        alpha: f64,
        p: Point,
        q: Point,
        /// `(1 - alpha) p + alpha T q`, recomputable from the other items.
        y: Point,
        lhs: f64,
        rhs: f64,
    },
    Lemma1 {
        x: Point,
        y: Point,
        premise_lhs: f64,
        premise_rhs: f64,
        lhs: f64,
        rhs: f64,
    },
    ConditionI {
        x: Point,
        /// Source text of the rate function, so the witness is self-contained.
        h_source: String,
        h_value: f64,
        distance_to_fixed: f64,
        residual: f64,
    },
}

impl Witness {
    /// Amount by which the witness exceeds its bound.
    pub fn violation(&self) -> f64 {
        match self {
            Witness::Quasi { lhs, rhs, .. }
            | Witness::ConditionC { lhs, rhs, .. }
            | Witness::ConditionDa { lhs, rhs, .. }
            | Witness::Lemma1 { lhs, rhs, .. } => lhs - rhs,
            Witness::ConditionI {
                h_value, residual, ..
            } => h_value - residual,
        }
    }

    fn kv(&self, rows: &mut Vec<(String, String)>) {
        let mut push = |k: &str, v: String| rows.push((format!("witness.{k}"), v));
        match self {
            Witness::Quasi { x, p, lhs, rhs } => {
                push("x", x.display_g17());
                push("p", p.display_g17());
                push("lhs", g17(*lhs));
                push("rhs", g17(*rhs));
            }
            Witness::ConditionC {
                x,
                y,
                premise_lhs,
                lhs,
                rhs,
            } => {
                push("x", x.display_g17());
                push("y", y.display_g17());
                push("premise_lhs", g17(*premise_lhs));
                push("lhs", g17(*lhs));
                push("rhs", g17(*rhs));
            }
            Witness::ConditionDa {
                x,
                alpha,
                p,
                q,
                y,
                lhs,
                rhs,
            } => {
                push("x", x.display_g17());
                push("alpha", g17(*alpha));
                push("p", p.display_g17());
                push("q", q.display_g17());
                push("y", y.display_g17());
                push("lhs", g17(*lhs));
                push("rhs", g17(*rhs));
            }
            Witness::Lemma1 {
                x,
                y,
                premise_lhs,
                premise_rhs,
                lhs,
                rhs,
            } => {
                push("x", x.display_g17());
                push("y", y.display_g17());
                push("premise_lhs", g17(*premise_lhs));
                push("premise_rhs", g17(*premise_rhs));
                push("lhs", g17(*lhs));
                push("rhs", g17(*rhs));
            }
            Witness::ConditionI {
                x,
                h_source,
                h_value,
                distance_to_fixed,
                residual,
            } => {
                push("x", x.display_g17());
                push("h", h_source.clone());
                push("h_value", g17(*h_value));
                push("distance_to_fixed", g17(*distance_to_fixed));
                push("residual", g17(*residual));
            }
        }
    }
}

/// Outcome of one checker invocation. Equal inputs produce equal reports.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub mapping_id: String,
    pub norm: NormKind,
    /// Checker-specific settings in print order (budgets, grids, rate source).
    pub parameters: Vec<(String, String)>,
    pub verdict: Verdict,
    pub samples_tested: u64,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    pub seed: u64,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::NoCounterexampleFound
    }

    /// Flat `key = value` block containing every field, witness values at
    /// 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("condition".into(), self.condition.name().into()),
            ("mapping".into(), self.mapping_id.clone()),
            ("norm".into(), self.norm.name().into()),
            ("seed".into(), self.seed.to_string()),
            ("tolerance".into(), format!("{:e}", self.tolerance)),
        ];
        rows.extend(self.parameters.iter().cloned());
        rows.push(("samples_tested".into(), self.samples_tested.to_string()));
        rows.push(("verdict".into(), self.verdict.to_string()));
        if let Some(w) = &self.witness {
            w.kv(&mut rows);
            rows.push(("witness.violation".into(), g17(w.violation())));
        }
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

fn report(
    condition: ConditionId,
    t: &MappingSpec,
    k: NormKind,
    parameters: Vec<(String, String)>,
    samples_tested: u64,
    witness: Option<Witness>,
    tol: f64,
    seed: u64,
) -> ConditionReport {
    ConditionReport {
        condition,
        mapping_id: t.id().to_string(),
        norm: k,
        parameters,
        verdict: if witness.is_some() {
            Verdict::Counterexample
        } else {
            Verdict::NoCounterexampleFound
        },
        samples_tested,
        witness,
        tolerance: tol,
        seed,
    }
}

/// Deterministic (x, y) pair stream. First every ordered pair of
/// distinguished points (box corners and declared special points,
/// deduplicated, capped at 64); then repeating blocks that cross each
/// distinguished point with a fresh uniform draw on either side, followed
/// by one fresh uniform pair. Violations at extremes surface immediately,
/// and the uniform tail covers the interior.
struct PairStream {
    prelude: Vec<Point>,
    xs: Sampler,
    ys: Sampler,
    phase0: usize,
    block_pos: usize,
}

impl PairStream {
    fn new(t: &MappingSpec, seed: u64, streams: (u64, u64)) -> Self {
        let domain = t.domain().clone();
        let mut prelude: Vec<Point> = Vec::new();
        let push_unique = |list: &mut Vec<Point>, p: Point| {
            if !list.iter().any(|q| q == &p) {
                list.push(p);
            }
        };
        for mask in 0..domain.corner_count() {
            push_unique(&mut prelude, domain.corner(mask));
        }
        for p in t.special_points() {
            push_unique(&mut prelude, p.clone());
        }
        prelude.truncate(64);
        let xs = Sampler::with_stream(domain.clone(), seed, streams.0, SampleStrategy::Uniform);
        let ys = Sampler::with_stream(domain, seed, streams.1, SampleStrategy::Uniform);
        PairStream {
            prelude,
            xs,
            ys,
            phase0: 0,
            block_pos: 0,
        }
    }
}

impl Iterator for PairStream {
    type Item = (Point, Point);

    fn next(&mut self) -> Option<(Point, Point)> {
        let m = self.prelude.len();
        if self.phase0 < m * m {
            let i = self.phase0 / m;
            let j = self.phase0 % m;
            self.phase0 += 1;
            return Some((self.prelude[i].clone(), self.prelude[j].clone()));
        }
        let pos = self.block_pos;
        self.block_pos = if pos + 1 < 2 * m + 1 { pos + 1 } else { 0 };
        let pair = if pos < m {
            (self.prelude[pos].clone(), self.ys.next()?)
        } else if pos < 2 * m {
            (self.xs.next()?, self.prelude[pos - m].clone())
        } else {
            (self.xs.next()?, self.ys.next()?)
        };
        Some(pair)
    }
}

/// Pairs admitted around a base point: (p, q, Tq) with
/// `residual(p) <= residual(x) + tol` and likewise for q.
struct AdmissiblePool {
    pairs: Vec<(Point, Point, Point)>,
    attempts: u64,
    low_coverage: bool,
}

fn admissible_pairs(
    t: &MappingSpec,
    x: &Point,
    k: NormKind,
    budget: u64,
    seed: u64,
    streams: (u64, u64),
    tol: f64,
) -> Result<AdmissiblePool> {
    let rx = t.residual(x, k)?;
    let mut stream = PairStream::new(t, seed, streams);
    // Rejection can be severe near fixed points; cap the attempts and
    // report low coverage instead of stalling.
    let cap = budget.saturating_mul(10).max(1);
    let mut pairs = Vec::new();
    let mut attempts = 0u64;
    while attempts < cap && (pairs.len() as u64) < budget {
        let (p, q) = stream.next().expect("pair stream is infinite");
        attempts += 1;
        if t.residual(&p, k)? > rx + tol {
            continue;
        }
        if t.residual(&q, k)? > rx + tol {
            continue;
        }
        let tq = t.evaluate(&q)?;
        pairs.push((p, q, tq));
    }
    let low_coverage = (pairs.len() as u64).saturating_mul(10) < budget;
    Ok(AdmissiblePool {
        pairs,
        attempts,
        low_coverage,
    })
}

/// Interpolated points around a base point x: triples (y, p, q) with
/// admissible (p, q) and `y = (1 - alpha) p + alpha T q`.
#[derive(Clone, Debug)]
pub struct CSetSample {
    pub triples: Vec<(Point, Point, Point)>,
    /// Candidate pairs drawn before the budget or the attempt cap hit.
    pub attempts: u64,
    /// True when under 10% of the pair budget was admissible.
    pub low_coverage: bool,
}

/// Samples up to `budget` admissible triples around `x`. Admissibility
/// compares residuals under `k`: `residual(p) <= residual(x) + tol`, same
/// for q. Every returned y lies in the domain by convexity of the box.
pub fn sample_c_set(
    t: &MappingSpec,
    x: &Point,
    alpha: f64,
    k: NormKind,
    budget: u64,
    seed: u64,
    tol: f64,
) -> Result<CSetSample> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::BadParameter {
            name: "alpha",
            detail: format!("{alpha} is outside (1/2, 1]"),
        });
    }
    let pool = admissible_pairs(t, x, k, budget, seed, (P_STREAM, Q_STREAM), tol)?;
    let triples = pool
        .pairs
        .into_iter()
        .map(|(p, q, tq)| Ok((convex_combine(alpha, &p, &tq)?, p, q)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CSetSample {
        triples,
        attempts: pool.attempts,
        low_coverage: pool.low_coverage,
    })
}

/// Tests `‖Tx - p‖ <= ‖x - p‖ + tol` over sampled x and declared fixed
/// points p. When every domain point is fixed, p is sampled too. The
/// budget counts (x, p) pairs.
pub fn check_quasi_nonexpansive(
    t: &MappingSpec,
    k: NormKind,
    budget: u64,
    seed: u64,
    tol: f64,
) -> Result<ConditionReport> {
    let fixed = t.require_fixed_points("the quasi-nonexpansiveness check")?;
    let parameters = vec![("budget".to_string(), budget.to_string())];
    let mut tested = 0u64;
    let mut witness = None;
    let mut xs = t.enriched_sampler(seed, X_STREAM);
    match fixed {
        FixedPointSet::Points(pts) => 'outer: loop {
            let x = xs.next().expect("sampler is infinite");
            let tx = t.evaluate(&x)?;
            for p in pts {
                if tested >= budget {
                    break 'outer;
                }
                tested += 1;
                let lhs = distance(&tx, p, k)?;
                let rhs = distance(&x, p, k)?;
                if lhs > rhs + tol {
                    witness = Some(Witness::Quasi {
                        x,
                        p: p.clone(),
                        lhs,
                        rhs,
                    });
                    break 'outer;
                }
            }
        },
        FixedPointSet::WholeDomain => {
            let mut ps = t.enriched_sampler(seed, P_STREAM);
            while tested < budget && witness.is_none() {
                let x = xs.next().expect("sampler is infinite");
                let p = ps.next().expect("sampler is infinite");
                tested += 1;
                let tx = t.evaluate(&x)?;
                let lhs = distance(&tx, &p, k)?;
                let rhs = distance(&x, &p, k)?;
                if lhs > rhs + tol {
                    witness = Some(Witness::Quasi { x, p, lhs, rhs });
                }
            }
        }
    }
    Ok(report(
        ConditionId::QuasiNonexpansive,
        t,
        k,
        parameters,
        tested,
        witness,
        tol,
        seed,
    ))
}

/// Tests the implication `(1/2)‖x - Tx‖ <= ‖x - y‖  =>  ‖Tx - Ty‖ <=
/// ‖x - y‖ + tol` over the deterministic pair stream. The premise is
/// compared exactly.
pub fn check_condition_c(
    t: &MappingSpec,
    k: NormKind,
    budget: u64,
    seed: u64,
    tol: f64,
) -> Result<ConditionReport> {
    let parameters = vec![("budget".to_string(), budget.to_string())];
    let mut pairs = PairStream::new(t, seed, (X_STREAM, Y_STREAM));
    let mut tested = 0u64;
    let mut witness = None;
    while tested < budget && witness.is_none() {
        let (x, y) = pairs.next().expect("pair stream is infinite");
        tested += 1;
        let tx = t.evaluate(&x)?;
        let sep = distance(&x, &y, k)?;
        let premise_lhs = 0.5 * distance(&x, &tx, k)?;
        if premise_lhs <= sep {
            let ty = t.evaluate(&y)?;
            let lhs = distance(&tx, &ty, k)?;
            if lhs > sep + tol {
                witness = Some(Witness::ConditionC {
                    x,
                    y,
                    premise_lhs,
                    lhs,
                    rhs: sep,
                });
            }
        }
    }
    Ok(report(
        ConditionId::ConditionC,
        t,
        k,
        parameters,
        tested,
        witness,
        tol,
        seed,
    ))
}

fn alpha_grid(a: f64, size: usize) -> Vec<f64> {
    // Uniform on [a, 1] with both endpoints exact.
    (0..size)
        .map(|i| {
            if i == size - 1 {
                1.0
            } else {
                a + (1.0 - a) * i as f64 / (size - 1) as f64
            }
        })
        .collect()
}

/// Tests `‖Tx - Ty‖ <= ‖x - y‖ + tol` for y drawn from the admissible
/// interpolations around each sampled x, with alpha on a uniform grid over
/// [a, 1] including both endpoints. Requires `a` in (1/2, 1) and at least
/// two grid points. The budget counts (x, alpha, y) inequality tests; the
/// first violation in stream order is reported with all five generating
/// items.
pub fn check_condition_da(
    t: &MappingSpec,
    a: f64,
    alpha_grid_size: usize,
    k: NormKind,
    x_budget: u64,
    pq_budget: u64,
    seed: u64,
    tol: f64,
) -> Result<ConditionReport> {
    if !(a > 0.5 && a < 1.0) {
        return Err(Error::BadParameter {
            name: "a",
            detail: format!("{a} is outside (1/2, 1)"),
        });
    }
    if alpha_grid_size < 2 {
        return Err(Error::BadParameter {
            name: "alpha_grid_size",
            detail: format!("need at least 2 grid points, got {alpha_grid_size}"),
        });
    }
    let grid = alpha_grid(a, alpha_grid_size);
    let mut tested = 0u64;
    let mut witness = None;
    let mut low_coverage = false;
    let mut xs = t.enriched_sampler(seed, X_STREAM);
    'outer: for xi in 0..x_budget {
        let x = xs.next().expect("sampler is infinite");
        let tx = t.evaluate(&x)?;
        let pool = admissible_pairs(t, &x, k, pq_budget, seed, pq_streams(xi), tol)?;
        low_coverage |= pool.low_coverage;
        for &alpha in &grid {
            for (p, q, tq) in &pool.pairs {
                tested += 1;
                let y = convex_combine(alpha, p, tq)?;
                let ty = t.evaluate(&y)?;
                let lhs = distance(&tx, &ty, k)?;
                let rhs = distance(&x, &y, k)?;
                if lhs > rhs + tol {
                    witness = Some(Witness::ConditionDa {
                        x: x.clone(),
                        alpha,
                        p: p.clone(),
                        q: q.clone(),
                        y,
                        lhs,
                        rhs,
                    });
                    break 'outer;
                }
            }
        }
    }
    let parameters = vec![
        ("a".to_string(), format!("{a}")),
        ("alpha_grid".to_string(), alpha_grid_size.to_string()),
        ("x_budget".to_string(), x_budget.to_string()),
        ("pq_budget".to_string(), pq_budget.to_string()),
        ("low_coverage".to_string(), low_coverage.to_string()),
    ];
    Ok(report(
        ConditionId::ConditionDa,
        t,
        k,
        parameters,
        tested,
        witness,
        tol,
        seed,
    ))
}

/// Tests the implication `‖Tx - x‖ <= ‖Ty - y‖  =>  ‖x - Ty‖ <=
/// 3‖Tx - x‖ + ‖x - y‖ + tol` over the deterministic pair stream.
pub fn check_lemma1(
    t: &MappingSpec,
    k: NormKind,
    budget: u64,
    seed: u64,
    tol: f64,
) -> Result<ConditionReport> {
    let parameters = vec![("budget".to_string(), budget.to_string())];
    let mut pairs = PairStream::new(t, seed, (X_STREAM, Y_STREAM));
    let mut tested = 0u64;
    let mut witness = None;
    while tested < budget && witness.is_none() {
        let (x, y) = pairs.next().expect("pair stream is infinite");
        tested += 1;
        let tx = t.evaluate(&x)?;
        let ty = t.evaluate(&y)?;
        let premise_lhs = distance(&tx, &x, k)?;
        let premise_rhs = distance(&ty, &y, k)?;
        if premise_lhs <= premise_rhs {
            let lhs = distance(&x, &ty, k)?;
            let rhs = 3.0 * premise_lhs + distance(&x, &y, k)?;
            if lhs > rhs + tol {
                witness = Some(Witness::Lemma1 {
                    x,
                    y,
                    premise_lhs,
                    premise_rhs,
                    lhs,
                    rhs,
                });
            }
        }
    }
    Ok(report(
        ConditionId::Lemma1,
        t,
        k,
        parameters,
        tested,
        witness,
        tol,
        seed,
    ))
}

/// A rate function `h(r)` used as a residual lower bound: `h(0) = 0`, h
/// positive for positive arguments and nondecreasing. Parsed from the
/// expression language with variable `r`; the properties are verified on a
/// grid before use, since arbitrary expressions could silently fail them.
#[derive(Clone, Debug)]
pub struct RateFn {
    source: String,
    ast: Expr,
}

impl RateFn {
    pub fn parse(src: &str) -> Result<Self> {
        let ast = expr::parse_scalar(src, "r")?;
        Ok(RateFn {
            source: src.to_string(),
            ast,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        Ok(self.ast.eval(&[r])?)
    }

    /// Checks `h(0) = 0` exactly, and positivity plus monotonicity on a
    /// 1000-point grid over [0, max_r]. Grid-checked, not proved.
    pub fn verify(&self, max_r: f64) -> Result<()> {
        let h0 = self.eval(0.0)?;
        if h0 != 0.0 {
            return Err(Error::BadRateFunction(format!(
                "h(0) = {h0}, expected exactly 0"
            )));
        }
        let grid = 1000;
        let mut prev = 0.0;
        let mut prev_r = 0.0;
        for i in 1..=grid {
            let r = max_r * i as f64 / grid as f64;
            if r <= 0.0 {
                continue;
            }
            let v = self.eval(r)?;
            if v <= 0.0 {
                return Err(Error::BadRateFunction(format!(
                    "h({r}) = {v} is not positive"
                )));
            }
            if v < prev {
                return Err(Error::BadRateFunction(format!(
                    "h decreases from {prev} at r = {prev_r} to {v} at r = {r}"
                )));
            }
            prev = v;
            prev_r = r;
        }
        Ok(())
    }
}

/// Tests `residual(x) >= h(d(x, F(T))) - tol` over sampled x. The rate
/// function's own preconditions are verified on [0, diameter] first.
pub fn check_condition_i(
    t: &MappingSpec,
    h: &RateFn,
    k: NormKind,
    budget: u64,
    seed: u64,
    tol: f64,
) -> Result<ConditionReport> {
    let fixed = t.require_fixed_points("the residual lower-bound check")?;
    h.verify(t.domain().diameter(k))?;
    let parameters = vec![
        ("h".to_string(), h.source().to_string()),
        ("budget".to_string(), budget.to_string()),
    ];
    let mut tested = 0u64;
    let mut witness = None;
    let mut xs = t.enriched_sampler(seed, X_STREAM);
    while tested < budget && witness.is_none() {
        let x = xs.next().expect("sampler is infinite");
        tested += 1;
        let residual = t.residual(&x, k)?;
        let dist = fixed.distance_from(&x, k)?;
        let h_value = h.eval(dist)?;
        if residual < h_value - tol {
            witness = Some(Witness::ConditionI {
                x,
                h_source: h.source().to_string(),
                h_value,
                distance_to_fixed: dist,
                residual,
            });
        }
    }
    Ok(report(
        ConditionId::ConditionI,
        t,
        k,
        parameters,
        tested,
        witness,
        tol,
        seed,
    ))
}

/// Recomputes the violated inequality at a witness, without sampling, and
/// returns the recomputed violation. A sound counterexample yields a value
/// greater than the report's tolerance. Premises and the interpolation
/// identity are re-verified; `tol` is the admissibility tolerance for the
/// interpolated-pair condition.
pub fn recheck(t: &MappingSpec, k: NormKind, w: &Witness, tol: f64) -> Result<f64> {
    match w {
        Witness::Quasi { x, p, .. } => {
            let tx = t.evaluate(x)?;
            Ok(distance(&tx, p, k)? - distance(x, p, k)?)
        }
        Witness::ConditionC { x, y, .. } => {
            let tx = t.evaluate(x)?;
            let sep = distance(x, y, k)?;
            if 0.5 * distance(x, &tx, k)? > sep {
                return Err(Error::BadParameter {
                    name: "witness",
                    detail: "premise does not hold at the witness pair".to_string(),
                });
            }
            let ty = t.evaluate(y)?;
            Ok(distance(&tx, &ty, k)? - sep)
        }
        Witness::ConditionDa {
            x, alpha, p, q, y, ..
        } => {
            let rx = t.residual(x, k)?;
            if t.residual(p, k)? > rx + tol || t.residual(q, k)? > rx + tol {
                return Err(Error::BadParameter {
                    name: "witness",
                    detail: "witness pair is not admissible around x".to_string(),
                });
            }
            let tq = t.evaluate(q)?;
            let rebuilt = convex_combine(*alpha, p, &tq)?;
            if &rebuilt != y {
                return Err(Error::BadParameter {
                    name: "witness",
                    detail: "y does not match (1 - alpha) p + alpha T q".to_string(),
                });
            }
            let tx = t.evaluate(x)?;
            let ty = t.evaluate(y)?;
            Ok(distance(&tx, &ty, k)? - distance(x, y, k)?)
        }
        Witness::Lemma1 { x, y, .. } => {
            let tx = t.evaluate(x)?;
            let ty = t.evaluate(y)?;
            let premise_lhs = distance(&tx, x, k)?;
            if premise_lhs > distance(&ty, y, k)? {
                return Err(Error::BadParameter {
                    name: "witness",
                    detail: "premise does not hold at the witness pair".to_string(),
                });
            }
            Ok(distance(x, &ty, k)? - (3.0 * premise_lhs + distance(x, y, k)?))
        }
        Witness::ConditionI { x, h_source, .. } => {
            let h = RateFn::parse(h_source)?;
            let fixed = t.require_fixed_points("the witness recheck")?;
            let dist = fixed.distance_from(x, k)?;
            Ok(h.eval(dist)? - t.residual(x, k)?)
        }
    }
}
