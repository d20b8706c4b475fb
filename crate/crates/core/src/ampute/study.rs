//! The study case matrix: every pattern x mechanism x rate combination.

use super::{AmputationSpec, AmputeError, MissingMechanism, MissingPattern};
use crate::seeded::derive_seed;

/// Rates used throughout the study grid.
pub const DEFAULT_RATES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Enumerate the full case grid in pattern-major order. With the default
/// rates this yields 4 * 3 * 5 = 60 specs. Each spec receives its own seed
/// derived from `seed` and its position, so cases are independent streams.
pub fn build_study_matrix(rates: &[f64], seed: u64) -> Result<Vec<AmputationSpec>, AmputeError> {
    build_filtered_matrix(&MissingPattern::ALL, &MissingMechanism::ALL, rates, seed)
}

/// Grid restricted to subsets of patterns and mechanisms; used by the study
/// runner when the configuration filters the factor space.
pub fn build_filtered_matrix(
    patterns: &[MissingPattern],
    mechanisms: &[MissingMechanism],
    rates: &[f64],
    seed: u64,
) -> Result<Vec<AmputationSpec>, AmputeError> {
    if rates.is_empty() {
        return Err(AmputeError::InvalidRate(f64::NAN));
    }
    for &r in rates {
        if !(0.0 < r && r < 1.0) {
            return Err(AmputeError::InvalidRate(r));
        }
    }
    let mut specs = Vec::with_capacity(patterns.len() * mechanisms.len() * rates.len());
    for &pattern in patterns {
        for &mechanism in mechanisms {
            for &rate in rates {
                let case_seed = derive_seed(seed, specs.len() as u64);
                specs.push(AmputationSpec::new(pattern, mechanism, rate, case_seed));
            }
        }
    }
    Ok(specs)
}
