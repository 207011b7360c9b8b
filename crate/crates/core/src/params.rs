use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonlinearity `epsilon`, celerity `c` and amplitude parameter `alpha`.
///
/// The three are tied by `c^2 (1 - alpha epsilon) = 1`, so a value built
/// from either the celerity or the amplitude carries the other one too.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    epsilon: f64,
    celerity: f64,
    alpha: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Parameter(format!("epsilon = {epsilon} must lie in (0, 1]")));
    }
    Ok(())
}

impl ModelParams {
    /// Parameters for a wave traveling at speed `celerity > 1`.
    pub fn traveling(epsilon: f64, celerity: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(celerity > 1.0) || !celerity.is_finite() {
            return Err(Error::Parameter(format!(
                "celerity c = {celerity} must exceed 1 for a solitary wave"
            )));
        }
        let c2 = celerity * celerity;
        Ok(Self {
            epsilon,
            celerity,
            alpha: (c2 - 1.0) / (epsilon * c2),
        })
    }

    /// Parameters of the standard Boussinesq solitary wave with amplitude `alpha`.
    pub fn from_alpha(epsilon: f64, alpha: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::Parameter(format!("alpha = {alpha} must be non-negative")));
        }
        if alpha * epsilon >= 1.0 {
            return Err(Error::Parameter(format!(
                "alpha * epsilon = {} must be below 1",
                alpha * epsilon
            )));
        }
        Ok(Self {
            epsilon,
            celerity: (1.0 / (1.0 - alpha * epsilon)).sqrt(),
            alpha,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn celerity(&self) -> f64 {
        self.celerity
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Wavenumber `k = sqrt(3 alpha / 4)` of the standard Boussinesq wave.
    pub fn k(&self) -> f64 {
        (0.75 * self.alpha).sqrt()
    }

    /// Crest elevation `(c^2 - 1)/epsilon` of the Green-Naghdi wave.
    pub fn gn_amplitude(&self) -> f64 {
        (self.celerity * self.celerity - 1.0) / self.epsilon
    }

    /// Argument scale `sqrt(3 (c^2 - 1) / (4 c^2 epsilon))` of the Green-Naghdi wave.
    pub fn gn_wavenumber(&self) -> f64 {
        let c2 = self.celerity * self.celerity;
        (3.0 * (c2 - 1.0) / (4.0 * c2 * self.epsilon)).sqrt()
    }

    /// Spatial decay rate `kappa` of the extended traveling-wave ODE.
    ///
    /// Positive root in `kappa^2` of
    /// `(eps^2 c^2 / 90) kappa^4 + (eps c^2 / 6) kappa^2 + (1 - c^2)/2 = 0`.
    pub fn decay_rate(&self) -> f64 {
        let c2 = self.celerity * self.celerity;
        let a = self.epsilon * self.epsilon * c2 / 90.0;
        let b = self.epsilon * c2 / 6.0;
        let c = 0.5 * (1.0 - c2);
        // -2c / (b + sqrt(b^2 - 4ac)) avoids cancellation as c -> 1
        let kappa2 = -2.0 * c / (b + (b * b - 4.0 * a * c).sqrt());
        kappa2.sqrt()
    }

    /// Decay rate of the Green-Naghdi wave, `2 * gn_wavenumber()`.
    pub fn gn_decay_rate(&self) -> f64 {
        2.0 * self.gn_wavenumber()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_and_celerity_are_consistent() {
        for &(eps, alpha) in &[(0.1, 1.0), (1e-3, 1.0), (0.5, 1.5), (1.0, 0.3)] {
            let p = ModelParams::from_alpha(eps, alpha).unwrap();
            let c2 = p.celerity() * p.celerity();
            assert!((c2 * (1.0 - alpha * eps) - 1.0).abs() < 1e-15);
            let q = ModelParams::traveling(eps, p.celerity()).unwrap();
            assert!((q.alpha() - alpha).abs() < 1e-12 * alpha.max(1.0));
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(ModelParams::traveling(1.0, 1.0).is_err());
        assert!(ModelParams::traveling(0.0, 1.1).is_err());
        assert!(ModelParams::traveling(1.5, 1.1).is_err());
        assert!(ModelParams::from_alpha(0.5, 2.0).is_err());
        assert!(ModelParams::from_alpha(0.5, -1.0).is_err());
    }

    #[test]
    fn decay_rate_solves_quartic() {
        let p = ModelParams::traveling(1.0, 1.01).unwrap();
        let (e, c2) = (p.epsilon(), p.celerity().powi(2));
        let k2 = p.decay_rate().powi(2);
        let q = e * e * c2 / 90.0 * k2 * k2 + e * c2 / 6.0 * k2 + 0.5 * (1.0 - c2);
        assert!(q.abs() < 1e-16);
        // GN limit of the quartic
        assert!((p.decay_rate() / p.gn_decay_rate() - 1.0).abs() < 1e-2);
    }
}
