//! Grid-parallel evaluation. Results always come back in input order, so
//! output does not depend on the thread count.

use optomech_core::bath_spectrum::{effective_occupation, OccupationSpectrum};
use optomech_core::energy_cooling::{cooling_map_point, CoolingMapRow};
use optomech_core::params::SystemParams;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "OPTOMECH_THREADS";

/// Worker count requested through [`THREADS_ENV`], if any.
pub fn requested_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::config(format!("{THREADS_ENV}: {e}"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Maps `f` over `items` on a pool sized by [`THREADS_ENV`] (all cores when
/// unset).
pub fn par_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = requested_threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

/// Parallel cooling map over `Δ × γ_c`, rows `Δ`-major.
pub fn cooling_map(params: &SystemParams, spec: &OccupationSpectrum, deltas: &[f64], gammas: &[f64]) -> Result<Vec<CoolingMapRow>> {
    let n_eff = match spec.as_flat() {
        Some(n) => n,
        None => effective_occupation(&params.mech, spec)?,
    };
    let points: Vec<(f64, f64)> = deltas.iter().flat_map(|&d| gammas.iter().map(move |&g| (d, g))).collect();
    par_map(&points, |&(d, g)| cooling_map_point(params, n_eff, d, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_matches_serial() {
        let p = SystemParams::preset_p0();
        let spec = OccupationSpectrum::flat(p.thermal_occupation()).unwrap();
        let deltas = [1e7, 6e7, 2e8];
        let gammas = [5e7, 3e8];
        let par = cooling_map(&p, &spec, &deltas, &gammas).unwrap();
        let ser = optomech_core::energy_cooling::cooling_map(&p, &spec, &deltas, &gammas).unwrap();
        assert_eq!(par.len(), ser.len());
        for (a, b) in par.iter().zip(&ser) {
            assert_eq!(a.delta, b.delta);
            assert_eq!(a.gamma_c, b.gamma_c);
            assert!(a.cooling_factor.to_bits() == b.cooling_factor.to_bits());
        }
    }
}
