//! Parsing of weights, parameter sets and law descriptors from the command
//! line.

use mih_core::{ModelParams, Ratio};

use crate::CliError;

/// Which side of a distance computation a descriptor names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawKind {
    Mih,
    Nm,
    NormalQ,
    NormalQbar,
    NormalQstar,
}

impl LawKind {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "mih" => Ok(LawKind::Mih),
            "nm" => Ok(LawKind::Nm),
            "normal-q" => Ok(LawKind::NormalQ),
            "normal-qbar" => Ok(LawKind::NormalQbar),
            "normal-qstar" => Ok(LawKind::NormalQstar),
            other => Err(CliError::Invalid(format!(
                "unknown law {other:?}; expected mih, nm, normal-q, normal-qbar or normal-qstar"
            ))),
        }
    }

    pub fn is_normal(&self) -> bool {
        matches!(
            self,
            LawKind::NormalQ | LawKind::NormalQbar | LawKind::NormalQstar
        )
    }

    pub fn family(&self) -> Option<mih_core::kernels::FamilyKind> {
        match self {
            LawKind::NormalQ => Some(mih_core::kernels::FamilyKind::NormalQ),
            LawKind::NormalQbar => Some(mih_core::kernels::FamilyKind::NormalQbar),
            LawKind::NormalQstar => Some(mih_core::kernels::FamilyKind::NormalQstar),
            _ => None,
        }
    }
}

/// Parses comma-separated weights.
///
/// The finite-population law only accepts exact fractions ("3/10"): a
/// decimal would hide the lattice check behind parsing. The
/// infinite-population law additionally accepts decimals, which are
/// converted digit-exactly.
pub fn parse_weights(spec: &str, allow_decimal: bool) -> Result<Vec<Ratio>, CliError> {
    spec.split(',')
        .map(|part| {
            let part = part.trim();
            if !allow_decimal && part.contains('.') {
                return Err(CliError::Invalid(format!(
                    "weight {part:?}: decimal weights are rejected for the finite-population law; write an exact fraction like 3/10"
                )));
            }
            part.parse::<Ratio>().map_err(CliError::from)
        })
        .collect()
}

/// Builds validated parameters from the population spec (`"inf"` for the
/// infinite sentinel), failure target and weight list.
pub fn build_params(population: &str, n: u64, weights: &str) -> Result<ModelParams, CliError> {
    if population == "inf" || population == "infinite" {
        let w = parse_weights(weights, true)?;
        return ModelParams::infinite(n, &w).map_err(CliError::from);
    }
    let pop: u64 = population.parse().map_err(|_| {
        CliError::Invalid(format!(
            "population {population:?} is not an integer or \"inf\""
        ))
    })?;
    let w = parse_weights(weights, false)?;
    ModelParams::finite(pop, n, &w).map_err(CliError::from)
}

/// Parses a comma-separated count vector.
pub fn parse_counts(spec: &str) -> Result<Vec<u64>, CliError> {
    spec.split(',')
        .map(|s| {
            s.trim().parse::<u64>().map_err(|_| {
                CliError::Invalid(format!("count {s:?} is not a non-negative integer"))
            })
        })
        .collect()
}

/// Smallest population at or above `target` compatible with the weights'
/// denominators.
pub fn lattice_round_up(target: u64, weights: &[Ratio]) -> u64 {
    let mut den = 1u64;
    for w in weights {
        den = lcm(den, w.denom());
    }
    target.div_ceil(den) * den
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_weights_rejected_for_finite_population() {
        assert!(parse_weights("0.5", false).is_err());
        assert!(parse_weights("1/2", false).is_ok());
        assert!(parse_weights("0.5", true).is_ok());
    }

    #[test]
    fn lattice_rounding() {
        let w = [Ratio::new(1, 5).unwrap(), Ratio::new(1, 2).unwrap()];
        assert_eq!(lattice_round_up(11, &w), 20);
        assert_eq!(lattice_round_up(20, &w), 20);
    }

    #[test]
    fn population_sentinel() {
        assert!(build_params("inf", 2, "0.3,0.2").is_ok());
        assert!(build_params("10", 2, "3/10,1/5").is_ok());
        assert!(build_params("x", 2, "1/2").is_err());
    }
}
