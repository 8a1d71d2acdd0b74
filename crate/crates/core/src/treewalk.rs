//! Exact walk counts on the d-regular tree and on the integers.
//!
//! `c[n][k]` is the number of length-`n` walks from the root of `T_d` that end at
//! distance `k`; `f[n][k] = c[n][k] / (d (d-1)^(k-1))` is the number ending at one
//! fixed vertex at distance `k`, which by symmetry is also the number of walks from
//! that vertex back to the root.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::WalkError;
use crate::report::{down, up};

pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Number of vertices at distance `k` from the root of `T_d`.
pub fn sphere_size(d: usize, k: usize) -> BigUint {
    if k == 0 {
        BigUint::one()
    } else {
        BigUint::from(d) * BigUint::from(d - 1).pow((k - 1) as u32)
    }
}

/// `2 sqrt(d-1) / d`, the spectral radius of `T_d`.
pub fn tree_rho(d: usize) -> f64 {
    2.0 * ((d - 1) as f64).sqrt() / d as f64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeWalkTables {
    d: usize,
    nmax: usize,
    c: Vec<Vec<BigUint>>,
    f: Vec<Vec<BigUint>>,
}

impl TreeWalkTables {
    pub fn new(d: usize, nmax: usize) -> Result<Self, WalkError> {
        if d < 2 {
            return Err(WalkError::Degree { d, min: 2 });
        }
        let mut c: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        let mut f: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        let (bd, bd1) = (BigUint::from(d), BigUint::from(d - 1));
        let zero = BigUint::zero();
        for n in 1..=nmax {
            let (pc, pf) = (&c[n - 1], &f[n - 1]);
            let get = |v: &Vec<BigUint>, k: usize| -> BigUint { v.get(k).cloned().unwrap_or_else(|| zero.clone()) };
            let mut cn = Vec::with_capacity(n + 1);
            let mut fn_ = Vec::with_capacity(n + 1);
            for k in 0..=n {
                if (n + k) % 2 == 1 {
                    cn.push(BigUint::zero());
                    fn_.push(BigUint::zero());
                    continue;
                }
                if k == 0 {
                    cn.push(get(pc, 1));
                    fn_.push(&bd * get(pf, 1));
                } else {
                    let mult = if k == 1 { &bd } else { &bd1 };
                    cn.push(mult * &pc[k - 1] + get(pc, k + 1));
                    fn_.push(&pf[k - 1] + &bd1 * get(pf, k + 1));
                }
            }
            c.push(cn);
            f.push(fn_);
        }
        Ok(TreeWalkTables { d, nmax, c, f })
    }

    /// Loads cached tables from `dir` or builds and stores them.
    pub fn load_or_build(d: usize, nmax: usize, dir: Option<&Path>) -> Result<Self, WalkError> {
        let Some(dir) = dir else { return Self::new(d, nmax) };
        let path = Self::cache_path(dir, d, nmax);
        if let Ok(t) = Self::read_cache(&path, d, nmax) {
            return Ok(t);
        }
        let t = Self::new(d, nmax)?;
        let _ = fs::create_dir_all(dir).and_then(|_| t.write_cache(&path));
        Ok(t)
    }

    pub fn cache_key(d: usize, nmax: usize) -> String {
        format!("treewalk-d{d}-n{nmax}-v{CACHE_FORMAT_VERSION}")
    }

    pub fn cache_path(dir: &Path, d: usize, nmax: usize) -> PathBuf {
        dir.join(format!("{}.txt", Self::cache_key(d, nmax)))
    }

    fn write_cache(&self, path: &Path) -> io::Result<()> {
        let tmp = path.with_extension("tmp");
        let mut w = io::BufWriter::new(fs::File::create(&tmp)?);
        writeln!(w, "treewalk {} {} {}", CACHE_FORMAT_VERSION, self.d, self.nmax)?;
        for row in &self.c {
            let line: Vec<String> = row.iter().map(|x| x.to_str_radix(16)).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        w.flush()?;
        drop(w);
        fs::rename(tmp, path)
    }

    fn read_cache(path: &Path, d: usize, nmax: usize) -> io::Result<Self> {
        let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
        let file = io::BufReader::new(fs::File::open(path)?);
        let mut lines = file.lines();
        let header = lines.next().ok_or_else(|| bad("empty cache"))??;
        if header != format!("treewalk {} {} {}", CACHE_FORMAT_VERSION, d, nmax) {
            return Err(bad("cache header mismatch"));
        }
        let mut c = Vec::with_capacity(nmax + 1);
        for line in lines {
            let row: Option<Vec<BigUint>> =
                line?.split(' ').map(|s| BigUint::parse_bytes(s.as_bytes(), 16)).collect();
            c.push(row.ok_or_else(|| bad("bad number"))?);
        }
        if c.len() != nmax + 1 || c.iter().enumerate().any(|(n, r)| r.len() != n + 1) {
            return Err(bad("cache shape mismatch"));
        }
        let f = c
            .iter()
            .map(|row| row.iter().enumerate().map(|(k, x)| x / sphere_size(d, k)).collect())
            .collect();
        Ok(TreeWalkTables { d, nmax, c, f })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    /// Walks of length `n` from the root ending anywhere at distance `k`.
    pub fn count(&self, n: usize, k: usize) -> BigUint {
        self.c.get(n).and_then(|r| r.get(k)).cloned().unwrap_or_default()
    }

    pub fn count_ref(&self, n: usize, k: usize) -> Option<&BigUint> {
        self.c.get(n).and_then(|r| r.get(k))
    }

    /// Walks of length `n` between the root and one fixed vertex at distance `k`.
    pub fn to_vertex(&self, n: usize, k: usize) -> BigUint {
        self.f.get(n).and_then(|r| r.get(k)).cloned().unwrap_or_default()
    }

    pub fn to_vertex_ref(&self, n: usize, k: usize) -> Option<&BigUint> {
        self.f.get(n).and_then(|r| r.get(k))
    }

    /// `|N_n(d)|`: closed walks of length `n` at the root.
    pub fn returns(&self, n: usize) -> BigUint {
        self.count(n, 0)
    }

    fn need(&self, n: usize) -> Result<(), WalkError> {
        if n > self.nmax {
            Err(WalkError::TableTooShort { n, nmax: self.nmax })
        } else {
            Ok(())
        }
    }

    pub fn return_probability(&self, n: usize) -> Result<BigRational, WalkError> {
        if n % 2 == 1 {
            return Err(WalkError::OddLength(n));
        }
        self.need(n)?;
        Ok(ratio(&self.returns(n), &BigUint::from(self.d).pow(n as u32)))
    }

    /// `P(|X_j| = k)` for the uniform bridge of length `n`, for `j = 0..=n`.
    pub fn bridge_distance_profile(&self, n: usize, k: usize) -> Result<Vec<BigRational>, WalkError> {
        if n % 2 == 1 {
            return Err(WalkError::OddLength(n));
        }
        self.need(n)?;
        let total = self.returns(n);
        Ok((0..=n).map(|j| ratio(&(self.count(j, k) * self.to_vertex(n - j, k)), &total)).collect())
    }

    /// Expected number of times `j in 0..=n` the bridge of length `n` is at distance `k`.
    pub fn bridge_visit_expectation(&self, k: usize, n: usize) -> Result<BigRational, WalkError> {
        if n % 2 == 1 {
            return Err(WalkError::OddLength(n));
        }
        self.need(n)?;
        let num: BigUint = (0..=n).map(|j| self.count(j, k) * self.to_vertex(n - j, k)).sum();
        Ok(ratio(&num, &self.returns(n)))
    }

    /// Distance sequence of a uniform bridge of length `n`, drawn with floating-point
    /// step probabilities (used for Monte Carlo cross-checks).
    pub fn sample_bridge_distances<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        let mut out = Vec::with_capacity(n + 1);
        let mut k = 0usize;
        out.push(0);
        for j in 0..n {
            let rem = n - j;
            let here = to_f64(&self.to_vertex(rem, k));
            let up_children = if k == 0 { self.d } else { self.d - 1 } as f64;
            let p_up = up_children * to_f64(&self.to_vertex(rem - 1, k + 1)) / here;
            k = if rng.gen::<f64>() < p_up { k + 1 } else { k - 1 };
            out.push(k);
        }
        out
    }
}

pub fn ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(num.clone().into(), den.clone().into())
}

/// Converts a big integer to `f64`, saturating at infinity.
pub fn to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Converts a big rational to `f64` even when numerator and denominator overflow.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(x) = q.to_f64() {
        if x.is_finite() && (x != 0.0 || q.is_zero()) {
            return x;
        }
    }
    let (n, d) = (q.numer(), q.denom());
    let shift = |x: &num_bigint::BigInt| x.bits() as i64 - 60;
    let (sn, sd) = (shift(n).max(0), shift(d).max(0));
    let nf = (n >> sn as usize).to_f64().unwrap();
    let df = (d >> sd as usize).to_f64().unwrap();
    nf / df * 2f64.powi((sn - sd) as i32)
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits() as i64;
    let s = (bits - 60).max(0);
    let top = (x >> s as usize).to_f64().unwrap();
    top.ln() + s as f64 * std::f64::consts::LN_2
}

/// `r_n = c[n][0] / d^n`, exact; `n` must be even.
pub fn return_probability(d: usize, n: usize) -> Result<BigRational, WalkError> {
    if n % 2 == 1 {
        return Err(WalkError::OddLength(n));
    }
    TreeWalkTables::new(d, n)?.return_probability(n)
}

/// Like [`return_probability`] but returns 0 for odd `n`.
pub fn return_probability_allow_odd(d: usize, n: usize) -> Result<BigRational, WalkError> {
    if n % 2 == 1 {
        return Ok(BigRational::zero());
    }
    return_probability(d, n)
}

/// One row of the two-sided return-probability check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReturnBoundCheck {
    pub n: usize,
    pub lower: f64,
    pub r_n: f64,
    pub upper: f64,
    /// `min(r_n / lower, upper / r_n) - 1`: relative slack to the tighter side.
    pub margin: f64,
    pub pass: bool,
}

/// Checks `(2/3) rho^n n^{-3/2} < r_n < 10 rho^n n^{-3/2}` for even `0 < n <= nmax`.
///
/// With `n` even, `rho^n = (4(d-1)/d^2)^{n/2}` is rational, and squaring both
/// sides turns each comparison into an exact one between rationals.
pub fn check_return_bounds(d: usize, nmax: usize) -> Result<Vec<ReturnBoundCheck>, WalkError> {
    if d < 3 {
        return Err(WalkError::Degree { d, min: 3 });
    }
    let t = TreeWalkTables::new(d, nmax)?;
    check_return_bounds_with(&t, nmax)
}

pub fn check_return_bounds_with(t: &TreeWalkTables, nmax: usize) -> Result<Vec<ReturnBoundCheck>, WalkError> {
    let d = t.d();
    let rho2 = BigRational::new((4 * (d - 1)).into(), (d * d).into());
    let rho = tree_rho(d);
    let mut out = Vec::new();
    for n in (2..=nmax).step_by(2) {
        let r = t.return_probability(n)?;
        let rho2n = num_traits::pow(rho2.clone(), n); // rho^{2n}
        let lhs = &r * &r * BigRational::from_integer((n * n * n).into()); // r^2 n^3
        let lower_ok = BigRational::new(4.into(), 9.into()) * &rho2n < lhs;
        let upper_ok = lhs < BigRational::from_integer(100.into()) * &rho2n;
        let scale = rho.powi(n as i32) / (n as f64).powf(1.5);
        let (lo, hi) = (down(2.0 / 3.0 * scale), up(10.0 * scale));
        let rf = rational_to_f64(&r);
        out.push(ReturnBoundCheck {
            n,
            lower: lo,
            r_n: rf,
            upper: hi,
            margin: (rf / lo).min(hi / rf) - 1.0,
            pass: lower_ok && upper_ok,
        });
    }
    Ok(out)
}

/// Kesten–McKay density of the spectral measure of `T_d` at `t`.
pub fn kesten_mckay_density(d: usize, t: f64) -> f64 {
    let rho = tree_rho(d);
    if t.abs() >= rho {
        return 0.0;
    }
    d as f64 / (2.0 * std::f64::consts::PI) * (rho * rho - t * t).sqrt() / (1.0 - t * t)
}

/// `n`-th moment of the Kesten–McKay measure by quadrature.
///
/// After `t = rho cos(theta)` the integrand is smooth and periodic, so the
/// trapezoid rule converges geometrically; the node count doubles until two
/// successive values agree to `1e-13`.
pub fn kesten_mckay_moment(d: usize, n: usize) -> Result<f64, WalkError> {
    if d < 2 {
        return Err(WalkError::Degree { d, min: 2 });
    }
    if n % 2 == 1 {
        return Err(WalkError::OddLength(n));
    }
    let rho = tree_rho(d);
    let df = d as f64;
    // 1 - t^2 = (1 - rho^2) + rho^2 sin^2, which stays accurate near the endpoints;
    // for d = 2 the weight is identically 1 and the endpoints carry mass
    let gap = 1.0 - rho * rho;
    let g = |theta: f64| {
        let (c, s) = (theta.cos(), theta.sin());
        let weight = if d == 2 { 1.0 } else { rho * rho * s * s / (gap + rho * rho * s * s) };
        (rho * c).powi(n as i32) * df / (2.0 * std::f64::consts::PI) * weight
    };
    let trap = |m: usize| {
        let h = std::f64::consts::PI / m as f64;
        let ends = 0.5 * (g(0.0) + g(std::f64::consts::PI));
        (ends + (1..m).map(|i| g(i as f64 * h)).sum::<f64>()) * h
    };
    let mut m = 32;
    let mut prev = trap(m);
    let mut err = f64::INFINITY;
    while m < 1 << 20 {
        m *= 2;
        let cur = trap(m);
        err = (cur - prev).abs();
        if err <= 1e-13 * cur.abs().max(1e-300) || err < 1e-16 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(WalkError::Quadrature { achieved: err })
}

/// Simple random walk paths on the integers of length `n` from 0 to `k`.
pub fn z_paths(n: usize, k: usize) -> BigUint {
    if k > n || (n + k) % 2 == 1 {
        return BigUint::zero();
    }
    binomial(BigUint::from(n), BigUint::from((n + k) / 2))
}

/// Paths from 0 that stay positive after time 0. For `k > 0` they end at `k` and
/// are counted by the ballot formula `(k/n) z_paths(n, k)`; for `k = 0` they return
/// to 0 at time `n` only, counted by the Catalan number `C_{n/2 - 1}`.
pub fn z_positive_paths(n: usize, k: usize) -> BigUint {
    if n == 0 {
        return BigUint::from(usize::from(k == 0));
    }
    if k == 0 {
        if n % 2 == 1 {
            return BigUint::zero();
        }
        let m = n / 2 - 1;
        return binomial(BigUint::from(2 * m), BigUint::from(m)) / BigUint::from(m + 1);
    }
    z_paths(n, k) * BigUint::from(k) / BigUint::from(n)
}

/// Expected number of visits to level `k >= 1` of the positive excursion of length `n`.
pub fn excursion_visits_z(k: usize, n: usize) -> Result<BigRational, WalkError> {
    if n % 2 == 1 || n < 2 {
        return Err(WalkError::OddLength(n));
    }
    if k == 0 {
        return Err(WalkError::Domain("level must be positive".into()));
    }
    let pos = positive_paths_to(n, k);
    let num: BigUint = (1..n).map(|m| &pos[m] * &pos[n - m]).sum();
    Ok(ratio(&num, &z_positive_paths(n, 0)))
}

/// `z_positive_paths(m, k)` for `m = 0..=n`, `k >= 1`, by the ratio of consecutive
/// binomials along each parity class.
fn positive_paths_to(n: usize, k: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); n + 1];
    // c = C(m, (m+k)/2), stepped by m -> m + 2
    let mut c = BigUint::one();
    let mut m = k;
    while m <= n {
        out[m] = &c * BigUint::from(k) / BigUint::from(m);
        let (up, down) = ((m + k) / 2, (m - k) / 2);
        c = c * BigUint::from((m + 1) * (m + 2)) / BigUint::from((up + 1) * (down + 1));
        m += 2;
    }
    out
}

/// The limiting up/down ratio `(d-1)(d+(d-2)(x+1))/(d+(d-2)(x-1))` of the infinite bridge.
pub fn infinite_bridge_ratio(d: usize, dist: usize) -> Result<BigRational, WalkError> {
    if dist == 0 {
        return Err(WalkError::Domain("distance must be at least 1".into()));
    }
    if d < 2 {
        return Err(WalkError::Degree { d, min: 2 });
    }
    let (d, x) = (d as i64, dist as i64);
    Ok(BigRational::new(((d - 1) * (d + (d - 2) * (x + 1))).into(), (d + (d - 2) * (x - 1)).into()))
}

/// Large-`R` limit of the per-vertex ratio `p_R(x+, o) / p_R(x-, o)` for a child `x+`
/// and the parent `x-` of a vertex at distance `dist`.
pub fn per_vertex_bridge_limit(d: usize, dist: usize) -> BigRational {
    let (d, x) = (d as i64, dist as i64);
    BigRational::new((d + (d - 2) * (x + 1)).into(), ((d - 1) * (d + (d - 2) * (x - 1))).into())
}

/// Per-vertex walk counts `f(R, k)` for one `R`, scaled so the largest entry is 1.
/// Floating point, `O(R^2)`; used where exact tables would be too large.
pub fn scaled_to_vertex_column(d: usize, r: usize) -> Vec<f64> {
    let df = d as f64;
    let mut f = vec![1.0f64];
    for n in 1..=r {
        let mut g = vec![0.0; n + 1];
        for k in 0..=n {
            if (n + k) % 2 == 1 {
                continue;
            }
            let at = |k: usize| f.get(k).copied().unwrap_or(0.0);
            g[k] = if k == 0 { df * at(1) } else { at(k - 1) + (df - 1.0) * at(k + 1) };
        }
        let m = g.iter().cloned().fold(0.0, f64::max);
        for x in &mut g {
            *x /= m;
        }
        f = g;
    }
    f
}

/// Finite-length transition ratios of the bridge next to distance `dist`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeRatioReport {
    pub d: usize,
    pub dist: usize,
    /// Remaining walk length `R`.
    pub remaining: usize,
    /// `p_R(x+, o) / p_R(x-, o)`, one child against the parent.
    pub per_vertex_ratio: f64,
    /// `P(step up) / P(step down)` from distance `dist`: `(d-1)` times the above.
    pub transition_ratio: f64,
    /// `c[R][dist+1] / c[R][dist-1]`, whole spheres.
    pub sphere_ratio: f64,
    /// The closed-form limit as printed, `(d-1)(d+(d-2)(x+1))/(d+(d-2)(x-1))`.
    pub printed_limit: f64,
    pub per_vertex_limit: f64,
}

pub fn bridge_ratio_report(d: usize, dist: usize, remaining: usize) -> Result<BridgeRatioReport, WalkError> {
    if (remaining + dist) % 2 == 0 {
        return Err(WalkError::Domain("remaining length and distance must have opposite parity".into()));
    }
    let col = scaled_to_vertex_column(d, remaining);
    let (a, b) = (col[dist + 1], col[dist - 1]);
    let per_vertex = a / b;
    let sphere_scale = if dist == 1 { d as f64 * (d - 1) as f64 } else { ((d - 1) * (d - 1)) as f64 };
    Ok(BridgeRatioReport {
        d,
        dist,
        remaining,
        per_vertex_ratio: per_vertex,
        transition_ratio: (d - 1) as f64 * per_vertex,
        sphere_ratio: sphere_scale * per_vertex,
        printed_limit: rational_to_f64(&infinite_bridge_ratio(d, dist)?),
        per_vertex_limit: rational_to_f64(&per_vertex_bridge_limit(d, dist)),
    })
}
