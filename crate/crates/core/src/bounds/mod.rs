//! Closed-form and root-solved thresholds for the `(k, ℓ)`-rainbow index of
//! `K_n`.
//!
//! Rational quantities are exact ([`BigRational`]). Transcendental ones
//! (`ln`, the Chernoff root) are bracketed with [`precise`] intervals at 200+
//! bits, and every ceiling is taken only when both ends of the bracket agree.
//!
//! The logarithm in the `N₁` formula is `ln(1 - k!/k^k)`, a negative number.
//! It appears squared, so it is evaluated as `ln(1/(1 - p))`, which has the
//! same magnitude.

pub mod precise;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::colorings::{color_degrees, CompleteGraphColoring};
use crate::error::{domain, Error, Result};
use crate::trees::{combinations, rainbow_star_count, StarIndex, VertexSet};
use precise::{ln, to_f64, Interval, DEFAULT_PREC};

fn rat(a: impl Into<BigInt>, b: impl Into<BigInt>) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn int(a: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(a.into())
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `p = k!/k^k`, the probability that a star `T(u)` is rainbow under a
/// uniform `k`-coloring.
pub fn rainbow_star_prob(k: u64) -> Result<BigRational> {
    if k < 2 {
        return domain(format!("k must be at least 2, got {}", k));
    }
    let kk = BigUint::from(k).pow(k as u32);
    Ok(BigRational::new(factorial(k).into(), kk.into()))
}

/// `f(k) = 1/(1 - p)`.
pub fn star_failure_ratio(k: u64) -> Result<BigRational> {
    let p = rainbow_star_prob(k)?;
    Ok((BigRational::one() - p).recip())
}

fn check_k_ell(k: u64, ell: u64) -> Result<()> {
    if k < 3 {
        return domain(format!("k must be at least 3, got {}", k));
    }
    if ell < 1 {
        return domain("ell must be at least 1");
    }
    Ok(())
}

/// Ceiling of an interval-valued expression, refining precision until the
/// bracket is decisive.
fn decisive_ceil(mut eval: impl FnMut(u32) -> Interval) -> BigInt {
    let mut prec = DEFAULT_PREC;
    loop {
        if let Some(c) = eval(prec).ceil() {
            return c;
        }
        prec *= 2;
        assert!(prec <= 1 << 16, "ceiling undecided at {} bits", prec);
    }
}

/// `N₁ = 4 ⌈((k + ℓ - 1) / ln(1/(1 - p)))²⌉`.
pub fn n1_bound(k: u64, ell: u64) -> Result<BigUint> {
    check_k_ell(k, ell)?;
    let f = star_failure_ratio(k)?;
    let m2 = int((k + ell - 1) * (k + ell - 1));
    let c = decisive_ceil(|prec| {
        let l = ln(&f, prec);
        Interval {
            lo: &m2 / (&l.hi * &l.hi),
            hi: &m2 / (&l.lo * &l.lo),
        }
    });
    Ok(c.to_biguint().expect("positive") * 4u32)
}

/// `n^{k+ℓ-1} (1-p)^{n-(k+ℓ-1)}`, the union bound on the probability that
/// some `k`-set lacks `ℓ` rainbow stars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnionBound {
    pub log_value: f64,
    pub value: f64,
    /// Rigorous decision of `value <= 1`.
    pub certified: bool,
}

pub fn union_bound_failure(n: u64, k: u64, ell: u64) -> Result<UnionBound> {
    if k < 2 || ell < 1 {
        return domain(format!("need k >= 2 and ell >= 1, got k={} ell={}", k, ell));
    }
    if n < k + ell {
        return domain(format!(
            "union bound needs n >= k + ell = {}, got n={}",
            k + ell,
            n
        ));
    }
    let f = star_failure_ratio(k)?;
    let a = k + ell - 1;
    let b = n - a;
    // value <= 1  <=>  a ln n <= b ln f
    let mut prec = DEFAULT_PREC;
    let certified = loop {
        let ln_n = ln(&int(n), prec);
        let ln_f = ln(&f, prec);
        let lhs = Interval {
            lo: &ln_n.lo * int(a) - &ln_f.hi * int(b),
            hi: &ln_n.hi * int(a) - &ln_f.lo * int(b),
        };
        if lhs.hi <= BigRational::zero() {
            break true;
        }
        if lhs.lo > BigRational::zero() {
            break false;
        }
        prec *= 2;
        if prec > 1 << 14 {
            // exact equality would need n^a = f^b; resolve it exactly
            break int(n).pow(a as i32) <= f.pow(b as i32);
        }
    };
    let log_value = a as f64 * (n as f64).ln() - b as f64 * to_f64(&f).ln();
    Ok(UnionBound {
        log_value,
        value: log_value.exp(),
        certified,
    })
}

/// Exact `Pr[X <= ℓ - 1]` for `X ~ Binomial(trials, p)`.
pub fn binomial_lower_tail(trials: u64, p: &BigRational, ell: u64) -> BigRational {
    if ell == 0 {
        return BigRational::zero();
    }
    let q = BigRational::one() - p;
    let mut sum = BigRational::zero();
    for j in 0..ell.min(trials + 1) {
        let term = BigRational::from_integer(binomial(trials, j).into())
            * p.pow(j as i32)
            * q.pow((trials - j) as i32);
        sum += term;
    }
    sum
}

/// The chain `Pr[B_S] <= C(n-k, ℓ-1)(1-p)^{n-k-ℓ+1} <= n^{ℓ-1}(1-p)^{n-k-ℓ+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailChain {
    /// `Pr[X <= ℓ-1]`, `X ~ Binomial(n-k, p)`.
    pub exact: BigRational,
    /// `C(n-k, ℓ-1) (1-p)^{n-k-ℓ+1}`.
    pub middle: BigRational,
    /// `n^{ℓ-1} (1-p)^{n-k-ℓ+1}`.
    pub right: BigRational,
    /// Set when `exact > middle`; never observed, since the middle term is a
    /// union bound over `(ℓ-1)`-subsets that contain every success.
    pub anomaly: bool,
}

pub fn binomial_upper_vs_union(n: u64, k: u64, ell: u64) -> Result<TailChain> {
    if ell < 1 || n < k + ell {
        return domain(format!(
            "need n - k >= ell >= 1, got n={} k={} ell={}",
            n, k, ell
        ));
    }
    let p = rainbow_star_prob(k)?;
    let q = BigRational::one() - &p;
    let trials = n - k;
    let rest = q.pow((trials - (ell - 1)) as i32);
    let exact = binomial_lower_tail(trials, &p, ell);
    let middle = BigRational::from_integer(binomial(trials, ell - 1).into()) * &rest;
    let right = int(BigUint::from(n).pow((ell - 1) as u32)) * &rest;
    let middle_ok = if ell >= 2 {
        middle < right
    } else {
        middle <= right
    };
    if !(exact <= right && middle_ok) {
        return Err(Error::Invariant(format!(
            "tail chain broken at n={} k={} ell={}",
            n, k, ell
        )));
    }
    let anomaly = exact > middle;
    Ok(TailChain {
        exact,
        middle,
        right,
        anomaly,
    })
}

fn check_eps(eps: &BigRational) -> Result<()> {
    if !(eps.is_positive() && eps < &BigRational::one()) {
        return domain(format!("eps must lie in (0, 1), got {}", eps));
    }
    Ok(())
}

/// Parses `ε` exactly from a fraction such as `"1/2"`.
pub fn parse_eps(s: &str) -> Result<BigRational> {
    let eps: BigRational = s
        .trim()
        .parse()
        .map_err(|_| Error::Domain(format!("eps must be a rational like 1/2, got {:?}", s)))?;
    check_eps(&eps)?;
    Ok(eps)
}

/// Largest root of `g(x) = k ln x - (p ε²/2)(x - k)`.
#[derive(Debug, Clone)]
pub struct ThetaRoot {
    pub theta: f64,
    /// Rigorous bracket: `g(lo) > 0 > g(hi)`.
    pub lo: BigRational,
    pub hi: BigRational,
    /// `g(theta)` in f64.
    pub residual: f64,
}

/// Sign of `g(x)` decided with interval logarithms.
fn theta_g_sign(x: &BigRational, k: u64, slope: &BigRational) -> std::cmp::Ordering {
    let lin = slope * (x - int(k));
    let mut prec = DEFAULT_PREC;
    loop {
        let l = ln(x, prec);
        let (lo, hi) = (&l.lo * int(k) - &lin, &l.hi * int(k) - &lin);
        if lo.is_positive() {
            return std::cmp::Ordering::Greater;
        }
        if hi.is_negative() {
            return std::cmp::Ordering::Less;
        }
        prec *= 2;
        if prec > 1 << 12 {
            return std::cmp::Ordering::Equal;
        }
    }
}

/// Bisection for the largest root of `x^k exp(-(p ε²/2)(x - k)) = 1`.
///
/// The bracket starts at the maximizer `x* = 2k/(p ε²)`, where `g > 0`, and
/// doubles the right end until `g < 0`. Bisection stops when the bracket is
/// narrower than `tol` and `|g| <= tol` at its midpoint.
pub fn chernoff_root(eps: &BigRational, k: u64, tol: f64) -> Result<ThetaRoot> {
    check_eps(eps)?;
    if k < 3 {
        return domain(format!("k must be at least 3, got {}", k));
    }
    if tol.is_nan() || tol <= 0.0 {
        return domain("tol must be positive");
    }
    let p = rainbow_star_prob(k)?;
    let slope = &p * eps * eps / int(2);
    let slope_f = to_f64(&slope);
    let g = |x: f64| k as f64 * x.ln() - slope_f * (x - k as f64);
    let mut lo = int(2 * k) / (&p * eps * eps);
    let mut hi = &lo * int(2);
    while theta_g_sign(&hi, k, &slope) != std::cmp::Ordering::Less {
        lo = hi.clone();
        hi = &hi * int(2);
    }
    let tol_r = BigRational::from_float(tol).expect("finite tol");
    loop {
        let mid = (&lo + &hi) / int(2);
        let mid_f = to_f64(&mid);
        if &hi - &lo <= tol_r && g(mid_f).abs() <= tol {
            return Ok(ThetaRoot {
                theta: mid_f,
                lo,
                hi,
                residual: g(mid_f),
            });
        }
        match theta_g_sign(&mid, k, &slope) {
            std::cmp::Ordering::Greater => lo = mid,
            std::cmp::Ordering::Less => hi = mid,
            std::cmp::Ordering::Equal => {
                return Ok(ThetaRoot {
                    theta: mid_f,
                    lo: mid.clone(),
                    hi: mid,
                    residual: g(mid_f),
                })
            }
        }
        // keep the dyadic sizes in check
        lo = round_dyadic(&lo, 96, false);
        hi = round_dyadic(&hi, 96, true);
    }
}

fn round_dyadic(x: &BigRational, bits: u32, up: bool) -> BigRational {
    let scale = BigInt::one() << bits as usize;
    let scaled = x * BigRational::from_integer(scale.clone());
    let v = if up { scaled.ceil() } else { scaled.floor() };
    BigRational::new(v.to_integer(), scale)
}

/// `θ(ε, k)` with the default tolerance `1e-9`.
pub fn chernoff_theta(eps: &BigRational, k: u64) -> Result<f64> {
    Ok(chernoff_root(eps, k, 1e-9)?.theta)
}

/// `ℓ_min = ⌈p (θ - k)(1 - ε) + 1⌉`.
pub fn ell_min(eps: &BigRational, k: u64) -> Result<u64> {
    let p = rainbow_star_prob(k)?;
    let mut tol = 1e-9;
    loop {
        let root = chernoff_root(eps, k, tol)?;
        let f =
            |x: &BigRational| &p * (x - int(k)) * (BigRational::one() - eps) + BigRational::one();
        let bracket = Interval {
            lo: f(&root.lo),
            hi: f(&root.hi),
        };
        if let Some(c) = bracket.ceil() {
            return Ok(c.to_u64().expect("ell_min fits in u64"));
        }
        tol /= 1e3;
        if tol < 1e-60 {
            return domain("ell_min undecided: p(θ-k)(1-ε)+1 is numerically an integer");
        }
    }
}

/// `⌈(ℓ - 1)/(p (1 - ε)) + k⌉`, valid once `ℓ >= ℓ_min(ε, k)`.
pub fn n_threshold(eps: &BigRational, k: u64, ell: u64) -> Result<u64> {
    let min = ell_min(eps, k)?;
    if ell < min {
        return domain(format!(
            "ell={} is below ell_min={} for this eps and k",
            ell, min
        ));
    }
    n_threshold_formula(eps, k, ell)
}

/// The threshold formula without the `ℓ_min` guard.
pub fn n_threshold_formula(eps: &BigRational, k: u64, ell: u64) -> Result<u64> {
    check_eps(eps)?;
    let p = rainbow_star_prob(k)?;
    let v = int(ell.saturating_sub(1)) / (&p * (BigRational::one() - eps)) + int(k);
    Ok(v.ceil()
        .to_integer()
        .to_u64()
        .expect("threshold fits in u64"))
}

/// Arguments `t_1..t_r` of a multicolor Ramsey number `R(t_1, ..., t_r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamseyQuery(Vec<u64>);

impl RamseyQuery {
    pub fn new(args: Vec<u64>) -> Result<Self> {
        if args.is_empty() {
            return domain("Ramsey query needs at least one argument");
        }
        if let Some(&a) = args.iter().find(|&&a| a < 2) {
            return domain(format!("Ramsey arguments must be at least 2, got {}", a));
        }
        Ok(Self(args))
    }

    /// `R_r(t)`: `r` copies of `t`.
    pub fn diagonal(r: u64, t: u64) -> Result<Self> {
        Self::new(vec![t; r as usize])
    }

    pub fn args(&self) -> &[u64] {
        &self.0
    }
}

/// Multinomial upper bound `R(t_1+1, ..., t_r+1) <= (Σ t_i)! / Π t_i!`.
pub fn multicolor_ramsey_upper(query: &RamseyQuery) -> BigUint {
    let parts: Vec<u64> = query.0.iter().map(|a| a - 1).collect();
    let total: u64 = parts.iter().sum();
    let den = parts
        .iter()
        .fold(BigUint::one(), |acc, &t| acc * factorial(t));
    factorial(total) / den
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum N2Kind {
    /// `ℓ > ⌊k/2⌋`: `N₂ = k`.
    TrivialK,
    /// `ℓ <= ⌊k/2⌋`: multinomial upper bound on `R_{k-1}(k)`, not `N₂` itself.
    RamseyUpper,
}

pub fn n2_bound(k: u64, ell: u64) -> Result<(N2Kind, BigUint)> {
    check_k_ell(k, ell)?;
    if ell > k / 2 {
        Ok((N2Kind::TrivialK, BigUint::from(k)))
    } else {
        let q = RamseyQuery::diagonal(k - 1, k)?;
        Ok((N2Kind::RamseyUpper, multicolor_ramsey_upper(&q)))
    }
}

/// Which argument produced `combined_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NRoute {
    /// `max{N₁, N₂}`.
    UnionBound,
    /// `max{N₂, ⌈(ℓ-1)/(p(1-ε)) + k⌉}` (`max{6, ...}` at `k = 3`).
    Chernoff,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactValue {
    pub exact: String,
    pub approx: f64,
}

impl From<&BigRational> for ExactValue {
    fn from(r: &BigRational) -> Self {
        Self {
            exact: r.to_string(),
            approx: to_f64(r),
        }
    }
}

/// Every threshold for one `(k, ℓ, ε)`. Big integers are decimal strings.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub k: u64,
    pub ell: u64,
    pub p: ExactValue,
    pub f_k: ExactValue,
    #[serde(rename = "N1")]
    pub n1: String,
    #[serde(rename = "N2_kind")]
    pub n2_kind: N2Kind,
    #[serde(rename = "N2")]
    pub n2: String,
    #[serde(rename = "combined_N")]
    pub combined_n: String,
    pub route: NRoute,
    pub eps: Option<ExactValue>,
    pub theta: Option<f64>,
    pub ell_min: Option<u64>,
    pub n_threshold: Option<u64>,
    pub log_interpretation: &'static str,
}

pub const LOG_NOTE: &str = "ln(1-k!/k^k) read as ln(1/(1-k!/k^k)); equal magnitude, squared in N1";

/// Populates a [`BoundReport`]. With `ε` given and `ℓ >= ℓ_min(ε, k)` the
/// Chernoff route sets `combined_N`; otherwise it is `max{N₁, N₂}`.
pub fn combined_n(k: u64, ell: u64, eps: Option<&BigRational>) -> Result<BoundReport> {
    let p = rainbow_star_prob(k)?;
    let n1 = n1_bound(k, ell)?;
    let (n2_kind, n2) = n2_bound(k, ell)?;
    let mut report = BoundReport {
        k,
        ell,
        p: (&p).into(),
        f_k: (&star_failure_ratio(k)?).into(),
        n1: n1.to_string(),
        n2_kind,
        n2: n2.to_string(),
        combined_n: n1.clone().max(n2.clone()).to_string(),
        route: NRoute::UnionBound,
        eps: None,
        theta: None,
        ell_min: None,
        n_threshold: None,
        log_interpretation: LOG_NOTE,
    };
    if let Some(eps) = eps {
        report.eps = Some(eps.into());
        report.theta = Some(chernoff_theta(eps, k)?);
        let min = ell_min(eps, k)?;
        report.ell_min = Some(min);
        if ell >= min {
            let nt = n_threshold(eps, k, ell)?;
            report.n_threshold = Some(nt);
            let floor = if k == 3 { BigUint::from(6u32) } else { n2 };
            report.combined_n = floor.max(BigUint::from(nt)).to_string();
            report.route = NRoute::Chernoff;
        }
    }
    Ok(report)
}

/// `2(n-1)²/(9(n-2)) + 3`.
pub fn averaging_bound(n: u64) -> Result<BigRational> {
    if n < 3 {
        return domain(format!("averaging bound needs n >= 3, got {}", n));
    }
    Ok(rat(2 * (n - 1) * (n - 1), 9 * (n - 2)) + int(3))
}

/// Both sides of the star double count: `Σ_S X₂(S)` and `Σ_v d₁d₂d₃(v)`.
pub fn star_double_count(coloring: &CompleteGraphColoring) -> Result<(u128, u128)> {
    if coloring.palette() != 3 {
        return domain(format!(
            "double counting is for 3-colorings, got t={}",
            coloring.palette()
        ));
    }
    let n = coloring.n();
    let idx = StarIndex::new(coloring);
    let stars: u128 = combinations(n, 3)
        .map(|s| idx.count(&VertexSet::from_sorted_unchecked(s)) as u128)
        .sum();
    let degrees = color_degrees(coloring);
    let products: u128 = (0..n).map(|v| degrees.product(v)).sum();
    Ok((stars, products))
}

/// The averaging quantities of a 3-coloring.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragingCheck {
    /// `3 + Σ_v d₁(v)d₂(v)d₃(v) / C(n,3)`.
    pub upper: BigRational,
    /// `Σ_S X₂(S) / C(n,3)`.
    pub star_average: BigRational,
    /// `2(n-1)²/(9(n-2)) + 3`.
    pub bound: BigRational,
}

impl AveragingCheck {
    /// Double counting (`star_average + 3 == upper`) and AM-GM (`upper <= bound`).
    pub fn holds(&self) -> bool {
        &self.star_average + int(3) == self.upper && self.upper <= self.bound
    }

    /// Exact `value <= bound`.
    pub fn within_bound(&self, value: usize) -> bool {
        int(value as u64) <= self.bound
    }
}

pub fn expected_x_upper(coloring: &CompleteGraphColoring) -> Result<AveragingCheck> {
    let n = coloring.n() as u64;
    if n < 3 {
        return domain("need n >= 3");
    }
    let (stars, products) = star_double_count(coloring)?;
    let triples = BigRational::from_integer(binomial(n, 3).into());
    Ok(AveragingCheck {
        upper: int(3) + int(products) / &triples,
        star_average: int(stars) / &triples,
        bound: averaging_bound(n)?,
    })
}

/// Sum of star counts by direct scan, for cross-checking [`star_double_count`].
pub fn star_sum_scan(coloring: &CompleteGraphColoring, k: usize) -> u128 {
    combinations(coloring.n(), k)
        .map(|s| rainbow_star_count(&VertexSet::from_sorted_unchecked(s), coloring) as u128)
        .sum()
}
