//! Model parameters: population size, failure target and exact category weights.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::count::CountVector;
use crate::error::{Error, Ratio2, Result};

/// Exact probability weight as a reduced fraction.
///
/// Weights stay rational end to end so the lattice condition (`N * p_i` a
/// positive integer) is checked structurally instead of through floating
/// comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Ratio {
    /// Reduced fraction `num/den`; requires `0 < num/den < 1` for weights.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidWeight("denominator is zero".to_string()));
        }
        if num == 0 {
            return Err(Error::InvalidWeight("weight must be positive".to_string()));
        }
        if num >= den {
            return Err(Error::InvalidWeight(format!("{num}/{den} is not below 1")));
        }
        let g = gcd(num, den);
        Ok(Ratio {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `N * self` if it is a positive integer.
    fn scaled_integer(&self, population: u64) -> Option<u64> {
        let prod = population as u128 * self.num as u128;
        if prod.is_multiple_of(self.den as u128) {
            let v = prod / self.den as u128;
            if v > 0 && v <= u64::MAX as u128 {
                return Some(v as u64);
            }
        }
        None
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Ratio {
    type Err = Error;

    /// Parses `"a/b"` or an exact decimal such as `"0.25"`.
    ///
    /// Decimals are converted digit by digit, never through `f64`, so
    /// `"0.3"` is exactly `3/10`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse::<u64>().map_err(|_| bad_weight(s))?;
            let den = b.trim().parse::<u64>().map_err(|_| bad_weight(s))?;
            return Ratio::new(num, den);
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let int_part = if int_part.is_empty() { "0" } else { int_part };
            let whole = int_part.parse::<u64>().map_err(|_| bad_weight(s))?;
            if frac_part.is_empty()
                || frac_part.len() > 18
                || !frac_part.bytes().all(|b| b.is_ascii_digit())
            {
                return Err(bad_weight(s));
            }
            let digits = frac_part.parse::<u64>().map_err(|_| bad_weight(s))?;
            let den = 10u64.pow(frac_part.len() as u32);
            let num = whole
                .checked_mul(den)
                .and_then(|w| w.checked_add(digits))
                .ok_or_else(|| bad_weight(s))?;
            return Ratio::new(num, den);
        }
        Err(bad_weight(s))
    }
}

fn bad_weight(s: &str) -> Error {
    Error::InvalidWeight(format!("cannot parse {s:?} as a fraction"))
}

/// Finite population size or the explicit infinite sentinel.
///
/// The sentinel exists so that requesting a finite-population law in the
/// infinite regime is a visible error rather than a silent fallback to the
/// approximating model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Population {
    Finite(u64),
    Infinite,
}

/// Validated parameter triple `(N, n, p)` with the derived failure weight
/// `q = 1 - sum(p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    population: Population,
    n: u64,
    weights: Vec<Ratio>,
    q: Ratio,
    /// `N * p_i` for finite populations.
    category_counts: Vec<u64>,
    /// `N * q` for finite populations.
    failure_objects: u64,
    half_bound: bool,
}

impl ModelParams {
    /// Finite-population parameters; every invariant violation is reported
    /// by name.
    pub fn finite(population: u64, n: u64, weights: &[Ratio]) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroFailureTarget);
        }
        if weights.is_empty() {
            return Err(Error::InvalidWeight(
                "at least one category weight required".to_string(),
            ));
        }
        let q = failure_weight(weights)?;
        let mut category_counts = Vec::with_capacity(weights.len());
        for (i, w) in weights.iter().enumerate() {
            match w.scaled_integer(population) {
                Some(c) => category_counts.push(c),
                None => {
                    return Err(Error::LatticeViolation {
                        index: i,
                        num: w.numer(),
                        den: w.denom(),
                        population,
                    })
                }
            }
        }
        let failure_objects = q
            .scaled_integer(population)
            .ok_or(Error::FailureLatticeViolation { population })?;
        let total: u64 = category_counts.iter().sum::<u64>() + failure_objects;
        debug_assert_eq!(total, population);
        if n > failure_objects {
            return Err(Error::FailureTargetTooLarge {
                n,
                failure_count: failure_objects,
            });
        }
        Ok(ModelParams {
            population: Population::Finite(population),
            n,
            weights: weights.to_vec(),
            q,
            half_bound: 2 * n <= failure_objects,
            category_counts,
            failure_objects,
        })
    }

    /// Parameters for the infinite-population model; no lattice condition.
    pub fn infinite(n: u64, weights: &[Ratio]) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroFailureTarget);
        }
        if weights.is_empty() {
            return Err(Error::InvalidWeight(
                "at least one category weight required".to_string(),
            ));
        }
        let q = failure_weight(weights)?;
        Ok(ModelParams {
            population: Population::Infinite,
            n,
            weights: weights.to_vec(),
            q,
            category_counts: Vec::new(),
            failure_objects: 0,
            half_bound: true,
        })
    }

    pub fn population(&self) -> Population {
        self.population
    }

    /// Finite population size, or an error for the infinite sentinel.
    pub fn finite_population(&self) -> Result<u64> {
        match self.population {
            Population::Finite(n) => Ok(n),
            Population::Infinite => Err(Error::InfinitePopulation),
        }
    }

    /// Number of non-failure categories `d`.
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Failure target `n`.
    pub fn failure_target(&self) -> u64 {
        self.n
    }

    pub fn weights(&self) -> &[Ratio] {
        &self.weights
    }

    pub fn weight_f64(&self, i: usize) -> f64 {
        self.weights[i].to_f64()
    }

    /// Failure weight `q = 1 - sum(p)`.
    pub fn failure_weight(&self) -> Ratio {
        self.q
    }

    pub fn failure_weight_f64(&self) -> f64 {
        self.q.to_f64()
    }

    /// Number of objects `N * p_i` in category `i` (finite populations).
    pub fn category_count(&self, i: usize) -> Result<u64> {
        self.finite_population()?;
        Ok(self.category_counts[i])
    }

    /// Number of failure objects `N * q` (finite populations).
    pub fn failure_count(&self) -> Result<u64> {
        self.finite_population()?;
        Ok(self.failure_objects)
    }

    /// Whether the stricter precondition `n <= (1/2) N q` holds; always true
    /// for the infinite sentinel.
    pub fn satisfies_half_bound(&self) -> bool {
        self.half_bound
    }

    pub(crate) fn require_half_bound(&self) -> Result<()> {
        if self.half_bound {
            Ok(())
        } else {
            Err(Error::HalfFailureBoundViolated {
                n: self.n,
                failure_count: self.failure_objects,
            })
        }
    }

    pub(crate) fn check_dim(&self, k: &CountVector) -> Result<()> {
        if k.dim() != self.dim() {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: k.dim(),
            })
        } else {
            Ok(())
        }
    }

    /// Total draws `k_+ = n + |k|_1` at the point `k`.
    pub fn total_draws(&self, k: &CountVector) -> u64 {
        self.n + k.norm1()
    }

    /// Whether `k` lies in the finite-population support (`k_i <= N p_i`).
    pub fn support_contains(&self, k: &CountVector) -> Result<bool> {
        self.finite_population()?;
        self.check_dim(k)?;
        Ok(k.iter()
            .zip(&self.category_counts)
            .all(|(&ki, &ci)| ki <= ci))
    }

    /// Mean `n p_i / q` of the infinite-population law, per coordinate.
    pub fn nm_mean(&self) -> Vec<f64> {
        let q = self.q.to_f64();
        self.weights
            .iter()
            .map(|p| self.n as f64 * p.to_f64() / q)
            .collect()
    }
}

fn failure_weight(weights: &[Ratio]) -> Result<Ratio> {
    // q = 1 - sum(p) in exact arithmetic over a common denominator.
    let mut den: u128 = 1;
    for w in weights {
        let g = gcd(den as u64, w.denom());
        den = den / g as u128 * w.denom() as u128;
        if den > u64::MAX as u128 {
            return Err(Error::InvalidWeight(
                "weight denominators overflow".to_string(),
            ));
        }
    }
    let mut num_sum: u128 = 0;
    for w in weights {
        num_sum += w.num as u128 * (den / w.den as u128);
    }
    if num_sum >= den {
        let g = gcd(num_sum as u64, den as u64);
        return Err(Error::NoFailureMass {
            weight_sum: Ratio2 {
                num: (num_sum / g as u128) as u64,
                den: (den / g as u128) as u64,
            },
        });
    }
    Ratio::new((den - num_sum) as u64, den as u64)
}
