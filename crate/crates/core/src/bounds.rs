//! Explicit constants and verdicts for the spectral-radius lower bounds in terms of
//! nontrivial short cycles.
//!
//! Every check returns a [`BoundReport`]. Failed hypotheses give
//! [`Verdict::NotApplicable`](crate::report::Verdict::NotApplicable), never a failure.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::Serialize;

use crate::census::CycleCensus;
use crate::error::BoundsError;
use crate::graph::SerreGraph;
use crate::report::{down, hyp, up, BoundReport};
use crate::spectral::{closed_walk_counts, spectral_radius, RhoEstimate};
use crate::treewalk::{rational_to_f64, tree_rho};

/// `nu_k = 2 * 10^11 * 2^(4k) * (d-1)^(3k) * k`.
pub fn nu_k(d: usize, k: usize) -> BigUint {
    BigUint::from(2u8) * BigUint::from(10u8).pow(11u32) * BigUint::from(2u8).pow(4 * k as u32) * BigUint::from(d - 1).pow(3 * k as u32) * BigUint::from(k)
}

/// `c_1 = 1/16` and `c_k = (d-1)^(-k) / 2` for `k >= 2`.
pub fn c_k(d: usize, k: usize) -> BigRational {
    if k == 1 {
        return BigRational::new(1.into(), 16.into());
    }
    BigRational::new(1.into(), (BigUint::from(2u8) * BigUint::from(d - 1).pow(k as u32)).into())
}

/// `ell = 6 * 10^8 * (4d - 4)^k`.
pub fn ell(d: usize, k: usize) -> BigUint {
    BigUint::from(6u8) * BigUint::from(10u8).pow(8u32) * BigUint::from(4 * d - 4).pow(k as u32)
}

/// `beta = 1 / (30 log(d-1))`.
pub fn beta(d: usize) -> f64 {
    1.0 / (30.0 * ((d - 1) as f64).ln())
}

/// Base of the logarithm of `|G|` in the finite bound. The statement uses `log_d`;
/// its derivation goes through `log_{d-1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    D,
    DMinusOne,
}

impl LogBase {
    fn log(self, d: usize, x: f64) -> f64 {
        let b = match self {
            LogBase::D => d,
            LogBase::DMinusOne => d - 1,
        };
        x.ln() / (b as f64).ln()
    }
}

/// `(3/2 log log_b |G| + 6) / log_b |G|`.
pub fn size_penalty(d: usize, size: usize, base: LogBase) -> f64 {
    let l = base.log(d, size as f64);
    (1.5 * l.ln() + 6.0) / l
}

fn mean_gamma(census: &CycleCensus) -> BigRational {
    let (total, n) = census.mean_fraction();
    BigRational::new(BigUint::from(total).into(), BigUint::from(n.max(1)).into())
}

/// The finite bound `rho(G)/rho(T_d) >= 1 + E gamma_k / nu_k - penalty` together with
/// its corollary for Ramanujan graphs, `E gamma_k <= nu_k * penalty`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteBound {
    pub main: BoundReport,
    /// Not applicable unless `rho(G) <= rho(T_d)`.
    pub ramanujan: BoundReport,
}

pub fn thm_main_finite(g: &SerreGraph, k: usize, base: LogBase) -> Result<FiniteBound, BoundsError> {
    let d = g.require_regular()?;
    let rho = spectral_radius(g, 0x5eed)?;
    let census = CycleCensus::compute(g, k)?;
    thm_main_finite_with(g, d, k, &rho, &census, base)
}

/// As [`thm_main_finite`] with `rho` and the cycle census supplied by the caller.
pub fn thm_main_finite_with(g: &SerreGraph, d: usize, k: usize, rho: &RhoEstimate, census: &CycleCensus, base: LogBase) -> Result<FiniteBound, BoundsError> {
    if d < 3 {
        return Err(BoundsError::Constraint(format!("degree {d} < 3")));
    }
    let size = g.vertex_count();
    let rt = tree_rho(d);
    let nu = nu_k(d, k);
    let eg = mean_gamma(census);
    let cycle_term = rational_to_f64(&(eg.clone() / BigRational::from_integer(nu.clone().into())));
    let big_enough = size >= 8 * d;
    let penalty = if big_enough { size_penalty(d, size, base) } else { f64::NAN };
    let lhs = down((rho.rho - rho.radius).max(0.0) / rt);
    let rhs = up(1.0 + cycle_term - penalty);
    let main = BoundReport::new(format!("finite rho bound (k={k})"), vec![hyp("|G| >= 8d", big_enough)], lhs, rhs, 1e-12)
        .constant("nu_k", &nu)
        .constant("E gamma_k", &eg)
        .constant("log base", format!("{base:?}"))
        .constant("rho", rho.rho)
        .constant("rho radius", rho.radius);

    let ramanujan_hyp = rho.rho - rho.radius <= rt;
    let nu_f = rational_to_f64(&BigRational::from_integer(nu.into()));
    let ramanujan = BoundReport::new(
        format!("Ramanujan cycle bound (k={k})"),
        vec![hyp("|G| >= 8d", big_enough), hyp("rho(G) <= rho(T_d)", ramanujan_hyp)],
        down(nu_f * penalty),
        rational_to_f64(&eg),
        1e-9,
    )
    .constant("E gamma_k", &eg);
    Ok(FiniteBound { main, ramanujan })
}

/// `E log p_{nk}(o,o) >= nk log rho(T_d) - 3/2 log(nk) - 4 + nk E gamma_k / nu_k`
/// with the expectation over a uniform root and exact return probabilities.
pub fn thm_main_returns(g: &SerreGraph, n: usize, k: usize) -> Result<BoundReport, BoundsError> {
    let d = g.require_regular()?;
    if (n * k) % 2 == 1 {
        return Err(BoundsError::Parity(format!("nk = {} is odd", n * k)));
    }
    let census = CycleCensus::compute(g, k)?;
    thm_main_returns_with(g, d, n, k, &census)
}

pub fn thm_main_returns_with(g: &SerreGraph, d: usize, n: usize, k: usize, census: &CycleCensus) -> Result<BoundReport, BoundsError> {
    let t = n * k;
    if t % 2 == 1 {
        return Err(BoundsError::Parity(format!("nk = {t} is odd")));
    }
    if d < 3 {
        return Err(BoundsError::Constraint(format!("degree {d} < 3")));
    }
    let size = g.vertex_count();
    let hyps = vec![hyp("|G| >= (nk)^2", size >= t * t), hyp("n >= 4", n >= 4)];
    let eg = mean_gamma(census);
    let nu = nu_k(d, k);
    let (lhs, rhs) = if hyps.iter().all(|h| h.holds) {
        let counts = closed_walk_counts(g, t);
        let ln_d = (d as f64).ln();
        let mean_log = counts.iter().map(|&c| (c as f64).ln() - t as f64 * ln_d).sum::<f64>() / size as f64;
        let cycle = rational_to_f64(&(eg.clone() * BigRational::from_integer(t.into()) / BigRational::from_integer(nu.clone().into())));
        let rhs = t as f64 * tree_rho(d).ln() - 1.5 * (t as f64).ln() - 4.0 + cycle;
        (mean_log, rhs)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(BoundReport::new(format!("return probability bound (n={n}, k={k})"), hyps, lhs, rhs, 1e-9)
        .constant("nu_k", &nu)
        .constant("E gamma_k", &eg))
}

/// `rho(T_d) + (d-2) / (d (d-1)^(2 floor(R + k/2 + 1)))`: the lower bound on `rho` of
/// an infinite `d`-regular graph in which every vertex is within `R` of a `k`-cycle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceBound {
    pub d: usize,
    pub radius: usize,
    pub k: usize,
    /// `floor(R + k/2 + 1)`.
    pub exponent_half: usize,
    pub gap: BigRational,
    pub value: f64,
}

pub fn distance_bound(d: usize, radius: usize, k: usize) -> Result<DistanceBound, BoundsError> {
    if d < 3 {
        return Err(BoundsError::Constraint(format!("degree {d} < 3")));
    }
    let h = radius + k / 2 + 1;
    let den = BigUint::from(d) * BigUint::from(d - 1).pow(2 * h as u32);
    let gap = BigRational::new(BigUint::from(d - 2).into(), den.into());
    let value = tree_rho(d) + rational_to_f64(&gap);
    Ok(DistanceBound { d, radius, k, exponent_half: h, gap, value })
}

/// Threshold data for the essential girth of nearly Ramanujan graphs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EssentialGirthBound {
    /// `(alpha ^ 1) / (6 log(d-1) + 8 log 2)`; `beta + eps` must stay below it.
    pub beta_max: f64,
    /// `beta log log |G|`.
    pub k: f64,
    /// `(log |G|)^(-eps)`, the scale of the predicted non-tree proportion.
    pub envelope: f64,
    /// `rho(T_d) + (log |G|)^(-alpha)`.
    pub rho_threshold: f64,
}

pub fn ess_girth_bound(size: usize, d: usize, alpha: f64, beta: f64, eps: f64) -> Result<EssentialGirthBound, BoundsError> {
    if d < 3 {
        return Err(BoundsError::Constraint(format!("degree {d} < 3")));
    }
    if !(alpha > 0.0 && beta > 0.0 && eps > 0.0) {
        return Err(BoundsError::Constraint("alpha, beta and eps must be positive".into()));
    }
    let beta_max = alpha.min(1.0) / (6.0 * ((d - 1) as f64).ln() + 8.0 * 2f64.ln());
    if beta + eps >= beta_max {
        return Err(BoundsError::Constraint(format!("beta + eps = {} is not below {beta_max}", beta + eps)));
    }
    let log_size = (size as f64).ln();
    if log_size <= 1.0 {
        return Err(BoundsError::Constraint(format!("log log |G| undefined or negative for |G| = {size}")));
    }
    Ok(EssentialGirthBound {
        beta_max,
        k: beta * log_size.ln(),
        envelope: log_size.powf(-eps),
        rho_threshold: tree_rho(d) + log_size.powf(-alpha),
    })
}

/// Observed proportion of vertices whose `floor(k)`-ball is not a tree, and the
/// constant `c` with proportion `= c (log |G|)^(-beta)` it implies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GirthObservation {
    pub radius: usize,
    pub non_tree: f64,
    pub constant: f64,
}

pub fn observe_essential_girth(g: &SerreGraph, radius: usize, beta: f64) -> GirthObservation {
    let n = g.vertex_count();
    let bad = (0..n).filter(|&v| crate::census::tree_radius(g, v, radius).map_or(true, |r| r < radius)).count();
    let non_tree = bad as f64 / n.max(1) as f64;
    GirthObservation { radius, non_tree, constant: non_tree * (n as f64).ln().powf(beta) }
}

/// Exact `(c_k / (30 (4d-4)^k ell k)) >= 1/nu_k`, the constant comparison behind the
/// main bound.
pub fn constants_consistent(d: usize, k: usize) -> bool {
    let lhs = c_k(d, k) / BigRational::from_integer((BigUint::from(30u8) * BigUint::from(4 * d - 4).pow(k as u32) * ell(d, k) * BigUint::from(k)).into());
    lhs >= BigRational::new(BigUint::one().into(), nu_k(d, k).into())
}
