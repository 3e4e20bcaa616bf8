//! Scalar convex and concave functions, with the monotonicity split data the
//! compression construction needs.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    Convex,
    Concave,
}

/// Where a function changes monotonicity.
///
/// For a convex function `Split(r)` means nonincreasing on `(−∞, r]` and
/// nondecreasing on `[r, ∞)`; for a concave one the two directions swap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Monotonicity {
    Split(f64),
    Nondecreasing,
    Nonincreasing,
}

type Eval = dyn Fn(f64) -> Option<f64> + Send + Sync;

#[derive(Clone)]
pub struct ConvexFunction {
    name: String,
    params: Vec<(String, f64)>,
    curvature: Curvature,
    monotonicity: Monotonicity,
    domain_lo: Option<f64>,
    eval: Arc<Eval>,
    at_zero: Option<f64>,
}

impl fmt::Debug for ConvexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFunction")
            .field("spec", &self.spec_string())
            .field("curvature", &self.curvature)
            .field("monotonicity", &self.monotonicity)
            .finish()
    }
}

const BUILTINS: &[(&str, &[&str])] = &[
    ("abs", &[]),
    ("square", &[]),
    ("relu", &["shift"]),
    ("exp", &[]),
    ("power_p", &["p"]),
    ("huber", &["delta"]),
    ("affine", &["a", "b"]),
    ("neg", &[]),
    ("sqrt_shifted", &["shift"]),
];

/// Names accepted by [`ConvexFunction::builtin`].
pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

fn param(params: &[(&str, f64)], key: &str) -> Option<f64> {
    params.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
}

impl ConvexFunction {
    /// User-defined function. `eval` returns `None` outside the domain; the
    /// split point (or monotone tag) must be supplied by the caller.
    pub fn custom(
        name: impl Into<String>,
        curvature: Curvature,
        monotonicity: Monotonicity,
        eval: impl Fn(f64) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        let eval: Arc<Eval> = Arc::new(eval);
        let at_zero = eval(0.0);
        ConvexFunction {
            name: name.into(),
            params: Vec::new(),
            curvature,
            monotonicity,
            domain_lo: None,
            eval,
            at_zero,
        }
    }

    /// One of the built-in functions:
    ///
    /// | name | formula | split |
    /// |------|---------|-------|
    /// | `abs` | `|x|` | 0 |
    /// | `square` | `x²` | 0 |
    /// | `relu` | `max(x − shift, 0)` | shift (default 0) |
    /// | `exp` | `eˣ` | nondecreasing |
    /// | `power_p` | `|x|^p`, `p ≥ 1` | 0 |
    /// | `huber` | `x²/2` for `|x| ≤ δ`, else `δ(|x| − δ/2)` | 0 |
    /// | `affine` | `a·x + b` (default `a = 1, b = 0`) | monotone by sign of `a` |
    /// | `neg` | `−|x|` (concave) | 0 |
    /// | `sqrt_shifted` | `√(x + shift)` (concave, default shift 0) | nondecreasing |
    pub fn builtin(name: &str, params: &[(&str, f64)]) -> Result<Self> {
        let allowed = BUILTINS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, keys)| *keys)
            .ok_or_else(|| Error::UnknownFunction(name.to_string()))?;
        for (k, v) in params {
            if !allowed.contains(k) {
                return Err(Error::InvalidParams(format!("`{name}` does not take parameter `{k}`")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("parameter `{k}` must be finite")));
            }
        }

        use Curvature::*;
        use Monotonicity::*;
        let (curvature, monotonicity, domain_lo, eval): (_, _, _, Arc<Eval>) = match name {
            "abs" => (Convex, Split(0.0), None, Arc::new(|x: f64| Some(x.abs()))),
            "square" => (Convex, Split(0.0), None, Arc::new(|x: f64| Some(x * x))),
            "relu" => {
                let s = param(params, "shift").unwrap_or(0.0);
                (Convex, Split(s), None, Arc::new(move |x: f64| Some((x - s).max(0.0))))
            }
            "exp" => (Convex, Nondecreasing, None, Arc::new(|x: f64| Some(x.exp()))),
            "power_p" => {
                let p = param(params, "p")
                    .ok_or_else(|| Error::InvalidParams("power_p requires p".into()))?;
                if p < 1.0 {
                    return Err(Error::InvalidParams(format!("power_p requires p >= 1, got {p}")));
                }
                (Convex, Split(0.0), None, Arc::new(move |x: f64| Some(x.abs().powf(p))))
            }
            "huber" => {
                let d = param(params, "delta").unwrap_or(1.0);
                if d <= 0.0 {
                    return Err(Error::InvalidParams(format!("huber requires delta > 0, got {d}")));
                }
                let f = move |x: f64| {
                    let a = x.abs();
                    Some(if a <= d { 0.5 * x * x } else { d * (a - 0.5 * d) })
                };
                (Convex, Split(0.0), None, Arc::new(f))
            }
            "affine" => {
                let a = param(params, "a").unwrap_or(1.0);
                let b = param(params, "b").unwrap_or(0.0);
                let tag = if a >= 0.0 { Nondecreasing } else { Nonincreasing };
                (Convex, tag, None, Arc::new(move |x: f64| Some(a * x + b)))
            }
            "neg" => (Concave, Split(0.0), None, Arc::new(|x: f64| Some(-x.abs()))),
            "sqrt_shifted" => {
                let s = param(params, "shift").unwrap_or(0.0);
                let slack = ToleranceConfig::DEFAULT.cvx;
                let f = move |x: f64| {
                    let t = x + s;
                    if t >= 0.0 {
                        Some(t.sqrt())
                    } else if t >= -slack * x.abs().max(1.0) {
                        Some(0.0)
                    } else {
                        None
                    }
                };
                (Concave, Nondecreasing, Some(-s), Arc::new(f))
            }
            _ => unreachable!("checked against BUILTINS"),
        };
        let at_zero = eval(0.0);
        Ok(ConvexFunction {
            name: name.to_string(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            curvature,
            monotonicity,
            domain_lo,
            eval,
            at_zero,
        })
    }

    /// Parses `name` or `name:key=value(,key=value)*`, e.g. `power_p:p=1.5`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (spec.trim(), None),
        };
        let mut params = Vec::new();
        if let Some(rest) = rest {
            for kv in rest.split(',') {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidParams(format!("expected key=value, got `{kv}`")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParams(format!("bad number `{v}` for `{k}`")))?;
                params.push((k.trim(), v));
            }
        }
        Self::builtin(name, &params)
    }

    /// Canonical spec string, parseable by [`ConvexFunction::parse`] for builtins.
    pub fn spec_string(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            let kv: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{}:{}", self.name, kv.join(","))
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn domain_lo(&self) -> Option<f64> {
        self.domain_lo
    }

    /// Cached `f(0)`, `None` when 0 is outside the domain.
    pub fn at_zero(&self) -> Option<f64> {
        self.at_zero
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        (self.eval)(x).ok_or_else(|| Error::Domain { name: self.name.clone(), at: x })
    }

    /// `f + c`, keeping curvature and split.
    pub fn offset(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        let eval: Arc<Eval> = Arc::new(move |x| inner(x).map(|y| y + c));
        ConvexFunction {
            name: format!("{}{:+}", self.name, c),
            params: self.params.clone(),
            curvature: self.curvature,
            monotonicity: self.monotonicity,
            domain_lo: self.domain_lo,
            at_zero: self.at_zero.map(|y| y + c),
            eval,
        }
    }
}

/// Split point usable for a spectrum inside `[lo, hi]`.
///
/// A declared split is clamped to `[lo − 1, hi + 1]`. Nondecreasing functions
/// get `lo − 1` and nonincreasing ones `hi + 1`, so that one side of the split
/// is empty.
pub fn effective_split(f: &ConvexFunction, lo: f64, hi: f64) -> f64 {
    match f.monotonicity {
        Monotonicity::Split(r) => r.clamp(lo - 1.0, hi + 1.0),
        Monotonicity::Nondecreasing => lo - 1.0,
        Monotonicity::Nonincreasing => hi + 1.0,
    }
}

/// Worst sampled violation of a scalar shape property.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarCheck {
    pub holds: bool,
    /// Largest violation seen, relative to `max(1, |f|)` at the sample; `≤ 0`
    /// when no sample violates the property.
    pub worst_violation: f64,
    /// Sample pair at which the worst violation occurred.
    pub at: (f64, f64),
}

fn sample_interval(f: &ConvexFunction, lo: f64, hi: f64) -> (f64, f64) {
    match f.domain_lo {
        Some(d) => (lo.max(d), hi.max(d)),
        None => (lo, hi),
    }
}

/// Midpoint convexity `f((a+b)/2) ≤ (f(a)+f(b))/2` on random pairs from
/// `[lo, hi]` (reversed for concave functions).
pub fn check_convexity(
    f: &ConvexFunction,
    lo: f64,
    hi: f64,
    samples: usize,
    seed: u64,
    cvx_tol: f64,
) -> Result<ScalarCheck> {
    let (lo, hi) = sample_interval(f, lo, hi);
    let sign = match f.curvature {
        Curvature::Convex => 1.0,
        Curvature::Concave => -1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut at = (lo, hi);
    for _ in 0..samples.max(1) {
        let a = rng.random_range(lo..=hi);
        let b = rng.random_range(lo..=hi);
        let (fa, fb, fm) = (f.eval(a)?, f.eval(b)?, f.eval(0.5 * (a + b))?);
        let v = sign * (fm - 0.5 * (fa + fb)) / fa.abs().max(fb.abs()).max(1.0);
        if v > worst {
            worst = v;
            at = (a, b);
        }
    }
    Ok(ScalarCheck { holds: worst <= cvx_tol, worst_violation: worst, at })
}

/// Checks the declared monotonicity on random ordered pairs from `[lo, hi]`,
/// each pair drawn on one side of the split.
pub fn check_monotonicity(
    f: &ConvexFunction,
    lo: f64,
    hi: f64,
    samples: usize,
    seed: u64,
    cvx_tol: f64,
) -> Result<ScalarCheck> {
    let (lo, hi) = sample_interval(f, lo, hi);
    let flip = match f.curvature {
        Curvature::Convex => 1.0,
        Curvature::Concave => -1.0,
    };
    // (interval, +1 where nondecreasing, -1 where nonincreasing)
    let mut pieces = Vec::new();
    match f.monotonicity {
        Monotonicity::Split(r) => {
            if lo < r.min(hi) {
                pieces.push((lo, r.min(hi), -flip));
            }
            if r.max(lo) < hi {
                pieces.push((r.max(lo), hi, flip));
            }
        }
        Monotonicity::Nondecreasing => pieces.push((lo, hi, 1.0)),
        Monotonicity::Nonincreasing => pieces.push((lo, hi, -1.0)),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut at = (lo, hi);
    for k in 0..samples.max(1) {
        let Some(&(a0, b0, dir)) = pieces.get(k % pieces.len().max(1)) else { break };
        let x = rng.random_range(a0..=b0);
        let y = rng.random_range(a0..=b0);
        let (x1, x2) = if x <= y { (x, y) } else { (y, x) };
        let (f1, f2) = (f.eval(x1)?, f.eval(x2)?);
        // Nondecreasing: f1 ≤ f2. Violation is how much f1 exceeds f2.
        let v = dir * (f1 - f2) / f1.abs().max(f2.abs()).max(1.0);
        if v > worst {
            worst = v;
            at = (x1, x2);
        }
    }
    Ok(ScalarCheck { holds: worst <= cvx_tol, worst_violation: worst, at })
}
