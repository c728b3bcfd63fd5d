//! Galton–Watson processes in the exploration form
//! `B_t = B_{t-1} + W_t - 1`, with the offspring laws that dominate the
//! visits of percolated small-world graphs.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::rng::Seed;
use crate::scalar::Scalar;
use crate::stats::{wilson, Proportion};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OffspringLaw<T> {
    /// `Bin(n, p)`.
    Binomial { n: u64, p: T },
    /// Run length of retained ring edges on one side of a node, cut at `l`:
    /// `P(i) = p^i (1-p)` for `i < l` and `P(l) = p^l`.
    GeometricCutoff { p: T, l: u32 },
    /// `W = Y + sum_{j=1}^{2Y} L_j` with `Y ~ Bin(n, p c / n)` and `L_j`
    /// geometric with `P(L = i) = p^i (1-p)`.
    CompoundZeta { n: u64, p: T, c: T },
    /// Explicit `(value, probability)` pairs.
    Empirical { pmf: Vec<(u64, T)> },
}

fn probability<T: Scalar>(name: &str, p: T) -> Result<()> {
    check_probability(name, p.as_f64())
}

/// `ln C(a + b, b)` as a sum of logs; stays finite where the coefficient
/// itself would overflow.
fn ln_choose<T: Scalar>(a: u64, b: u64) -> T {
    (1..=b).fold(T::zero(), |acc, i| {
        acc + (T::from_u64(a + i).unwrap() / T::from_u64(i).unwrap()).ln()
    })
}

/// `Bin(m, q)` probability of `k`.
pub fn binomial_pmf<T: Scalar>(m: u64, q: T, k: u64) -> T {
    if k > m {
        return T::zero();
    }
    let one = T::one();
    if q <= T::zero() || q >= one {
        let at = if q <= T::zero() { 0 } else { m };
        return if k == at { one } else { T::zero() };
    }
    let j = k.min(m - k);
    let ln = ln_choose::<T>(m - j, j) + T::from_u64(k).unwrap() * q.ln() + T::from_u64(m - k).unwrap() * (one - q).ln();
    ln.exp()
}

/// Probability that `r` independent geometric runs (`P(L = i) = p^i (1-p)`)
/// sum to `s`: `C(s + r - 1, s) p^s (1-p)^r`.
pub fn negative_binomial_pmf<T: Scalar>(r: u64, p: T, s: u64) -> T {
    let one = T::one();
    if r == 0 || p <= T::zero() {
        return if s == 0 { one } else { T::zero() };
    }
    if p >= one {
        return T::zero();
    }
    let ln = ln_choose::<T>(r - 1, s) + T::from_u64(s).unwrap() * p.ln() + T::from_u64(r).unwrap() * (one - p).ln();
    ln.exp()
}

/// `P(sum_{j=1}^{r} L_j > x)`.
pub fn negative_binomial_tail<T: Scalar>(r: u64, p: T, x: u64) -> T {
    let head = (0..=x).fold(T::zero(), |acc, s| acc + negative_binomial_pmf(r, p, s));
    T::one() - head
}

/// `P(Bin(m, q) < k)`.
pub fn binomial_cdf_below<T: Scalar>(m: u64, q: T, k: u64) -> T {
    (0..k.min(m + 1)).fold(T::zero(), |acc, j| acc + binomial_pmf(m, q, j))
}

impl<T: Scalar> OffspringLaw<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            OffspringLaw::Binomial { p, .. } => probability("p", *p),
            OffspringLaw::GeometricCutoff { p, l } => {
                probability("p", *p)?;
                if *l == 0 {
                    return Err(Error::Parameter("cutoff must be >= 1".into()));
                }
                Ok(())
            }
            OffspringLaw::CompoundZeta { n, p, c } => {
                probability("p", *p)?;
                if *n == 0 || !(*c >= T::zero()) {
                    return Err(Error::Parameter("compound law needs n >= 1 and c >= 0".into()));
                }
                if *p * *c > T::from_u64(*n).unwrap() {
                    return Err(Error::Parameter("p c / n exceeds 1".into()));
                }
                Ok(())
            }
            OffspringLaw::Empirical { pmf } => {
                if pmf.is_empty() {
                    return Err(Error::Parameter("empty pmf".into()));
                }
                for &(_, q) in pmf {
                    probability("pmf entry", q)?;
                }
                let total = pmf.iter().fold(T::zero(), |a, &(_, q)| a + q);
                if (total - T::one()).abs() > T::identity_tolerance() {
                    return Err(Error::Parameter(format!("pmf sums to {total:?}")));
                }
                Ok(())
            }
        }
    }

    /// Constant offspring `k`.
    pub fn constant(k: u64) -> Self {
        OffspringLaw::Empirical {
            pmf: vec![(k, T::one())],
        }
    }

    /// Exact `E[W]`.
    pub fn mean(&self) -> Result<T> {
        self.validate()?;
        let one = T::one();
        Ok(match self {
            OffspringLaw::Binomial { n, p } => T::from_u64(*n).unwrap() * *p,
            OffspringLaw::GeometricCutoff { p, l } => {
                let mut m = T::from_u32(*l).unwrap() * p.powi(*l as i32);
                for i in 1..*l {
                    m = m + T::from_u32(i).unwrap() * p.powi(i as i32) * (one - *p);
                }
                m
            }
            OffspringLaw::CompoundZeta { p, c, .. } => {
                if *p >= one {
                    return Err(Error::Domain("compound law has infinite mean at p = 1".into()));
                }
                *p * *c * (one + *p) / (one - *p)
            }
            OffspringLaw::Empirical { pmf } => pmf
                .iter()
                .fold(T::zero(), |a, &(v, q)| a + T::from_u64(v).unwrap() * q),
        })
    }

    /// `P(W = k)`.
    pub fn pmf(&self, k: u64) -> T {
        let one = T::one();
        match self {
            OffspringLaw::Binomial { n, p } => binomial_pmf(*n, *p, k),
            OffspringLaw::GeometricCutoff { p, l } => {
                let l = u64::from(*l);
                if k < l {
                    p.powi(k as i32) * (one - *p)
                } else if k == l {
                    p.powi(l as i32)
                } else {
                    T::zero()
                }
            }
            OffspringLaw::CompoundZeta { n, p, c } => {
                let q = *p * *c / T::from_u64(*n).unwrap();
                (0..=k.min(*n)).fold(T::zero(), |acc, y| {
                    acc + binomial_pmf(*n, q, y) * negative_binomial_pmf(2 * y, *p, k - y)
                })
            }
            OffspringLaw::Empirical { pmf } => pmf
                .iter()
                .filter(|&&(v, _)| v == k)
                .fold(T::zero(), |a, &(_, q)| a + q),
        }
    }

    /// Probability generating function `E[s^W]` on `[0, 1]`.
    pub fn pgf(&self, s: T) -> T {
        let one = T::one();
        match self {
            OffspringLaw::Binomial { n, p } => (one - *p + *p * s).powi(*n as i32),
            OffspringLaw::GeometricCutoff { p, l } => {
                let mut g = (*p * s).powi(*l as i32);
                for i in 0..*l {
                    g = g + (*p * s).powi(i as i32) * (one - *p);
                }
                g
            }
            OffspringLaw::CompoundZeta { n, p, c } => {
                let q = *p * *c / T::from_u64(*n).unwrap();
                let runs = (one - *p) / (one - *p * s);
                (one - q + q * s * runs * runs).powf(T::from_u64(*n).unwrap())
            }
            OffspringLaw::Empirical { pmf } => pmf
                .iter()
                .fold(T::zero(), |a, &(v, q)| a + q * s.powi(v as i32)),
        }
    }

    /// Extinction probability of a single ancestor: the smallest root of
    /// `pgf(s) = s` in `[0, 1]`, by fixed-point iteration from 0.
    pub fn extinction_probability(&self) -> Result<T> {
        let mean = self.mean()?;
        let one = T::one();
        if self.pmf(1) >= one - T::identity_tolerance() {
            return Ok(T::zero());
        }
        if mean <= one {
            return Ok(one);
        }
        let tol = T::identity_tolerance();
        let mut z = T::zero();
        for _ in 0..10_000_000 {
            let next = self.pgf(z);
            if (next - z).abs() < tol {
                return Ok(next);
            }
            z = next;
        }
        Err(Error::Domain("extinction fixed point did not converge".into()))
    }

    pub fn sampler(&self) -> Result<OffspringSampler> {
        self.validate()?;
        let f = |x: T| x.as_f64();
        let table = |pairs: Vec<(u64, f64)>| {
            let mut acc = 0.0;
            let cdf = pairs
                .into_iter()
                .map(|(v, q)| {
                    acc += q;
                    (v, acc)
                })
                .collect();
            Sampler::Table(cdf)
        };
        let inner = match self {
            OffspringLaw::Binomial { n, p } => Sampler::Binomial(Binomial::new(*n, f(*p)).map_err(domain)?),
            OffspringLaw::GeometricCutoff { l, .. } => {
                table((0..=u64::from(*l)).map(|k| (k, f(self.pmf(k)))).collect())
            }
            OffspringLaw::CompoundZeta { n, p, c } => {
                if f(*p) >= 1.0 {
                    return Err(Error::Domain("compound law cannot be sampled at p = 1".into()));
                }
                Sampler::CompoundZeta {
                    y: Binomial::new(*n, f(*p) * f(*c) / *n as f64).map_err(domain)?,
                    run: Geometric::new(1.0 - f(*p)).map_err(domain)?,
                }
            }
            OffspringLaw::Empirical { pmf } => table(pmf.iter().map(|&(v, q)| (v, f(q))).collect()),
        };
        Ok(OffspringSampler { inner })
    }
}

fn domain<E: std::fmt::Display>(e: E) -> Error {
    Error::Parameter(e.to_string())
}

#[derive(Debug, Clone)]
enum Sampler {
    Binomial(Binomial),
    /// Inverse CDF over `(value, cumulative probability)`.
    Table(Vec<(u64, f64)>),
    CompoundZeta { y: Binomial, run: Geometric },
}

/// Draws offspring counts from a validated law.
#[derive(Debug, Clone)]
pub struct OffspringSampler {
    inner: Sampler,
}

impl OffspringSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.inner {
            Sampler::Binomial(b) => b.sample(rng),
            Sampler::Table(cdf) => {
                let u: f64 = rng.random();
                cdf.iter()
                    .find(|&&(_, acc)| u < acc)
                    .or(cdf.last())
                    .map(|&(v, _)| v)
                    .expect("nonempty table")
            }
            Sampler::CompoundZeta { y, run } => {
                let y = y.sample(rng);
                y + (0..2 * y).map(|_| run.sample(rng)).sum::<u64>()
            }
        }
    }
}

/// One realized trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GWProcess<T> {
    pub law: OffspringLaw<T>,
    pub b0: u64,
    /// `B_1, B_2, ...`; ends at extinction or after `max_steps` entries.
    pub trajectory: Vec<u64>,
    /// `W_1, W_2, ...`, aligned with `trajectory`.
    pub offspring: Vec<u64>,
    /// `min { t : B_t = 0 }` when reached.
    pub extinction_time: Option<usize>,
    /// `sum_t W_t` over the steps taken.
    pub total_population: u64,
}

impl<T> GWProcess<T> {
    /// `B_t`, with `B_0 = b0` and `B_t = 0` after extinction.
    pub fn population(&self, t: usize) -> u64 {
        match t {
            0 => self.b0,
            _ if t <= self.trajectory.len() => self.trajectory[t - 1],
            _ if self.extinction_time.is_some() => 0,
            _ => panic!("step {t} beyond the simulated horizon"),
        }
    }

    pub fn survived(&self) -> bool {
        self.extinction_time.is_none()
    }
}

/// Runs `B_t = B_{t-1} + W_t - 1` from `B_0 = b0` for at most `max_steps`
/// steps.
pub fn run_gw<T: Scalar, R: Rng + ?Sized>(
    law: &OffspringLaw<T>,
    b0: u64,
    max_steps: usize,
    rng: &mut R,
) -> Result<GWProcess<T>> {
    if b0 == 0 || max_steps == 0 {
        return Err(Error::Parameter("b0 and max_steps must be positive".into()));
    }
    let sampler = law.sampler()?;
    let mut b = b0;
    let mut trajectory = Vec::new();
    let mut offspring = Vec::new();
    let mut total = 0u64;
    let mut extinction_time = None;
    for t in 1..=max_steps {
        let w = sampler.sample(rng);
        b = b + w - 1;
        total += w;
        trajectory.push(b);
        offspring.push(w);
        if b == 0 {
            extinction_time = Some(t);
            break;
        }
    }
    Ok(GWProcess {
        law: law.clone(),
        b0,
        trajectory,
        offspring,
        extinction_time,
        total_population: total,
    })
}

/// Fraction of `trials` runs with `B_horizon > 0`, trial `i` using
/// `seed.derive(i)`.
pub fn survival_probability<T: Scalar>(
    law: &OffspringLaw<T>,
    b0: u64,
    horizon: usize,
    trials: u64,
    seed: Seed,
) -> Result<Proportion> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be positive".into()));
    }
    law.validate()?;
    let alive: Result<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|i| Ok(run_gw(law, b0, horizon, &mut seed.derive(i).rng())?.survived()))
        .collect();
    let survivors = alive?.into_iter().filter(|&a| a).count() as u64;
    Ok(wilson(survivors, trials))
}

/// `sum_{i<=t} W_i` for i.i.d. compound offspring with parameters
/// `(n, p, c)`: the total population of the process that dominates the
/// visit queue below the threshold.
pub fn gw_upper_population<R: Rng + ?Sized>(n: u64, p: f64, c: f64, t: usize, rng: &mut R) -> Result<u64> {
    let law = OffspringLaw::CompoundZeta { n, p, c };
    let sampler = law.sampler()?;
    Ok((0..t).map(|_| sampler.sample(rng)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;

    #[test]
    fn simple_means() {
        assert_eq!(OffspringLaw::Binomial { n: 10, p: 0.0 }.mean().unwrap(), 0.0);
        assert!((OffspringLaw::Binomial { n: 10, p: 0.12f64 }.mean().unwrap() - 1.2).abs() < 1e-12);
        let p = 2f64.sqrt() - 1.0;
        let m = OffspringLaw::CompoundZeta { n: 1000, p, c: 1.0 }.mean().unwrap();
        assert!((m - 1.0).abs() < 1e-12);
        let err = OffspringLaw::CompoundZeta { n: 1000, p: 1.0, c: 1.0 }.mean().unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn cutoff_mean_matches_summation() {
        for &(p, l) in &[(0.5f64, 60u32), (0.3, 5), (0.8, 12)] {
            let law = OffspringLaw::GeometricCutoff { p, l };
            let direct: f64 = (0..=u64::from(l)).map(|k| k as f64 * law.pmf(k)).sum();
            assert!((law.mean().unwrap() - direct).abs() < 1e-12);
        }
        let m = OffspringLaw::GeometricCutoff { p: 0.5f64, l: 60 }.mean().unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmfs_sum_to_one_and_match_pgf() {
        let laws: Vec<OffspringLaw<f64>> = vec![
            OffspringLaw::Binomial { n: 7, p: 0.3 },
            OffspringLaw::GeometricCutoff { p: 0.4, l: 6 },
            OffspringLaw::CompoundZeta { n: 50, p: 0.3, c: 1.0 },
            OffspringLaw::Empirical {
                pmf: vec![(0, 0.25), (2, 0.75)],
            },
        ];
        for law in &laws {
            let total: f64 = (0..400).map(|k| law.pmf(k)).sum();
            assert!((total - 1.0).abs() < 1e-10, "{law:?}");
            let s = 0.7f64;
            let series: f64 = (0..400).map(|k| law.pmf(k) * s.powi(k as i32)).sum();
            assert!((series - law.pgf(s)).abs() < 1e-10, "{law:?}");
            let mean: f64 = (0..400).map(|k| k as f64 * law.pmf(k)).sum();
            assert!((mean - law.mean().unwrap()).abs() < 1e-9, "{law:?}");
        }
    }

    #[test]
    fn empirical_must_normalize() {
        let bad = OffspringLaw::Empirical {
            pmf: vec![(0, 0.5), (1, 0.4)],
        };
        assert!(bad.validate().is_err());
        let neg = OffspringLaw::Binomial { n: 3, p: -0.1 };
        assert!(neg.validate().is_err());
    }

    #[test]
    fn extinction_probability_examples() {
        // pgf 1/4 + 3/4 s^2 has roots 1/3 and 1
        let law = OffspringLaw::Empirical {
            pmf: vec![(0, 0.25f64), (2, 0.75)],
        };
        assert!((law.extinction_probability().unwrap() - 1.0 / 3.0).abs() < 1e-11);
        assert_eq!(OffspringLaw::<f64>::Binomial { n: 2, p: 0.4 }.extinction_probability().unwrap(), 1.0);
        assert_eq!(OffspringLaw::<f64>::constant(1).extinction_probability().unwrap(), 0.0);
        let f32_law = OffspringLaw::Empirical {
            pmf: vec![(0, 0.25f32), (2, 0.75)],
        };
        assert!((f32_law.extinction_probability().unwrap() - 1.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn constant_laws() {
        let mut rng = Seed::new(1).rng();
        let zero = run_gw(&OffspringLaw::<f64>::constant(0), 4, 100, &mut rng).unwrap();
        assert_eq!(zero.population(1), 3);
        assert_eq!(zero.extinction_time, Some(4));
        assert_eq!(zero.population(50), 0);
        let one = run_gw(&OffspringLaw::<f64>::constant(1), 4, 100, &mut rng).unwrap();
        assert!(one.survived());
        assert!(one.trajectory.iter().all(|&b| b == 4));
        assert_eq!(one.trajectory.len(), 100);
    }

    #[test]
    fn trajectory_replays_recursion() {
        let law = OffspringLaw::Binomial { n: 3, p: 0.4 };
        for i in 0..200 {
            let gw = run_gw(&law, 2, 500, &mut Seed::new(9).derive(i).rng()).unwrap();
            let mut b = gw.b0;
            for (t, &w) in gw.offspring.iter().enumerate() {
                b = b + w - 1;
                assert_eq!(gw.trajectory[t], b);
            }
            assert_eq!(gw.total_population, gw.offspring.iter().sum::<u64>());
            if let Some(s) = gw.extinction_time {
                assert_eq!(gw.trajectory.len(), s);
                assert!(gw.trajectory[..s - 1].iter().all(|&b| b > 0));
            }
        }
    }

    #[test]
    fn negative_binomial_identity_small() {
        for &(y, x, p) in &[(3u64, 5u64, 0.4f64), (1, 0, 0.5), (2, 7, 0.9)] {
            let lhs = negative_binomial_tail(2 * y, p, x);
            let rhs = binomial_cdf_below(2 * y + x, 1.0 - p, 2 * y);
            assert!((lhs - rhs).abs() < 1e-12, "y={y} x={x} p={p}");
        }
    }

    #[test]
    fn sampler_mean_tracks_law() {
        let laws: Vec<OffspringLaw<f64>> = vec![
            OffspringLaw::GeometricCutoff { p: 0.4, l: 6 },
            OffspringLaw::CompoundZeta { n: 1000, p: 0.3, c: 1.0 },
            OffspringLaw::Binomial { n: 4, p: 0.3 },
        ];
        let mut rng = Seed::new(4).rng();
        for law in &laws {
            let s = law.sampler().unwrap();
            let m = 200_000;
            let xs: Vec<f64> = (0..m).map(|_| s.sample(&mut rng) as f64).collect();
            let mean = xs.iter().sum::<f64>() / m as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m as f64;
            let target = law.mean().unwrap();
            assert!((mean - target).abs() < 4.0 * (var / m as f64).sqrt(), "{law:?}: {mean} vs {target}");
        }
    }

    #[test]
    fn upper_population_zero_at_p_zero() {
        let mut rng = Seed::new(2).rng();
        assert_eq!(gw_upper_population(1000, 0.0, 1.0, 50, &mut rng).unwrap(), 0);
    }
}
