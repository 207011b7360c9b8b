//! Closed-form solitary waves: Green-Naghdi (Serre), KdV and standard
//! Boussinesq, plus the rescaling used to compare them across speeds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::params::ModelParams;

/// `sech^2(x)`, exactly zero once `|x| > 350`.
pub fn sech2(x: f64) -> f64 {
    if x.abs() > 350.0 {
        0.0
    } else {
        let c = x.cosh();
        1.0 / (c * c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReferenceKind {
    GreenNaghdi,
    KdV,
    StandardBoussinesq,
}

impl ReferenceKind {
    pub const ALL: [ReferenceKind; 3] = [Self::GreenNaghdi, Self::KdV, Self::StandardBoussinesq];

    pub fn label(&self) -> &'static str {
        match self {
            Self::GreenNaghdi => "GN",
            Self::KdV => "KdV",
            Self::StandardBoussinesq => "Boussinesq",
        }
    }

    /// Crest elevation of this reference wave at the given speed.
    pub fn amplitude(&self, params: &ModelParams) -> f64 {
        let c2 = params.celerity().powi(2);
        match self {
            Self::GreenNaghdi => params.gn_amplitude(),
            Self::KdV | Self::StandardBoussinesq => params.gn_amplitude() / c2,
        }
    }
}

fn require_wave(params: &ModelParams) -> Result<()> {
    if params.celerity() <= 1.0 {
        return Err(Error::Parameter(format!(
            "celerity c = {} admits no solitary wave",
            params.celerity()
        )));
    }
    Ok(())
}

/// Green-Naghdi solitary wave `(c^2-1)/eps * sech^2(sqrt(3(c^2-1)/(4 c^2 eps)) x)`.
pub fn gn_profile(params: &ModelParams, x: f64) -> Result<f64> {
    require_wave(params)?;
    Ok(params.gn_amplitude() * sech2(params.gn_wavenumber() * x))
}

/// Reference profile of the given kind at position `x` (crest at the origin).
/// KdV and standard Boussinesq share the profile `zeta_GN / c^2`.
pub fn reference_profile(kind: ReferenceKind, params: &ModelParams, x: f64) -> Result<f64> {
    require_wave(params)?;
    Ok(kind.amplitude(params) * sech2(params.gn_wavenumber() * x))
}

/// Standard Boussinesq solitary wave `(zeta_1, v_1)` at `(t, x)`.
pub fn boussinesq_solitary(params: &ModelParams, t: f64, x: f64) -> (f64, f64) {
    let c = params.celerity();
    let zeta = params.alpha() * sech2(params.k() * (x - c * t));
    (zeta, c * zeta / (1.0 + params.epsilon() * zeta))
}

/// Maps a profile to `(X, Z)` with `X = x sqrt(3(c^2-1)/(4 c^2 eps))` and
/// `Z = eps zeta / (c^2 - 1)`, under which the GN wave is `sech^2(X)`.
pub fn rescale_profile(zeta: &[f64], params: &ModelParams, grid: &Grid1D) -> Result<(Vec<f64>, Vec<f64>)> {
    require_wave(params)?;
    if zeta.len() != grid.len() {
        return Err(Error::Length {
            expected: grid.len(),
            got: zeta.len(),
        });
    }
    let scale = params.gn_wavenumber();
    let amp = params.gn_amplitude();
    let xs = grid.points().into_iter().map(|x| x * scale).collect();
    let zs = zeta.iter().map(|z| z / amp).collect();
    Ok((xs, zs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gn_crest_and_tail() {
        let p = ModelParams::traveling(1.0, 1.025).unwrap();
        assert!((gn_profile(&p, 0.0).unwrap() - 0.050625).abs() < 1e-15);
        // decay rate 2k ~ 0.38: 2.5e-11 at |x| = 60, below 1e-15 past |x| ~ 88
        assert!(gn_profile(&p, 60.0).unwrap() < 3e-11);
        for x in [90.0, -90.0, 100.0, 1e4] {
            assert!(gn_profile(&p, x).unwrap() < 1e-15);
        }
    }

    #[test]
    fn gn_matches_arbitrary_precision() {
        // mpmath, 40 digits
        let p = ModelParams::traveling(1.0, 1.01).unwrap();
        let z = gn_profile(&p, 1.0).unwrap();
        assert!((z - 0.019_805_865_027_640_025).abs() < 1e-14);
    }

    #[test]
    fn gn_even_and_decreasing() {
        let p = ModelParams::traveling(0.3, 1.05).unwrap();
        let mut prev = gn_profile(&p, 0.0).unwrap();
        for i in 1..200 {
            let x = 0.1 * i as f64;
            let z = gn_profile(&p, x).unwrap();
            assert_eq!(z, gn_profile(&p, -x).unwrap());
            assert!(z < prev);
            prev = z;
        }
    }

    #[test]
    fn boussinesq_wave_values() {
        let p = ModelParams::from_alpha(0.1, 1.0).unwrap();
        let (z, v) = boussinesq_solitary(&p, 0.0, 0.0);
        assert_eq!(z, 1.0);
        assert!((p.celerity() - 1.054092553389459).abs() < 1e-14);
        assert!((v - p.celerity() / 1.1).abs() < 1e-15);

        // mpmath, 40 digits
        let p = ModelParams::from_alpha(0.01, 1.0).unwrap();
        let (z, v) = boussinesq_solitary(&p, 1.0, 2.0);
        assert!((z - 0.514_033_105_772_185).abs() < 1e-14);
        assert!((v - 0.513_980_678_750_136).abs() < 1e-14);
    }

    #[test]
    fn boussinesq_travels_and_satisfies_mass_flux() {
        let p = ModelParams::from_alpha(0.2, 1.3).unwrap();
        let c = p.celerity();
        for &(t, x, d) in &[(0.0, 0.3, 1.0), (1.5, -2.0, 0.25), (3.0, 4.0, -2.0)] {
            let (z0, v0) = boussinesq_solitary(&p, t, x);
            let (z1, v1) = boussinesq_solitary(&p, t + d, x + c * d);
            assert!((z0 - z1).abs() < 1e-14 && (v0 - v1).abs() < 1e-14);
            assert!((v0 * (1.0 + p.epsilon() * z0) - c * z0).abs() < 1e-14);
        }
    }

    #[test]
    fn rescaled_gn_is_sech2() {
        let p = ModelParams::traveling(1.0, 1.01).unwrap();
        let g = Grid1D::symmetric(80.0, 801, false).unwrap();
        let zeta = g.sample(|x| gn_profile(&p, x).unwrap());
        let (xs, zs) = rescale_profile(&zeta, &p, &g).unwrap();
        for (x, z) in xs.iter().zip(&zs) {
            assert!((z - sech2(*x)).abs() < 1e-12);
        }
        let (_, zero) = rescale_profile(&vec![0.0; 801], &p, &g).unwrap();
        assert!(zero.iter().all(|z| *z == 0.0));
    }

    #[test]
    fn kdv_identity_chain() {
        // eps zeta_GN = eps c^2 zeta_KdV = eps c^2 zeta_B
        let p = ModelParams::traveling(0.5, 1.02).unwrap();
        let c2 = p.celerity().powi(2);
        for x in [-3.0, 0.0, 0.4, 7.0] {
            let gn = reference_profile(ReferenceKind::GreenNaghdi, &p, x).unwrap();
            let kdv = reference_profile(ReferenceKind::KdV, &p, x).unwrap();
            let b = reference_profile(ReferenceKind::StandardBoussinesq, &p, x).unwrap();
            assert!((gn - c2 * kdv).abs() < 1e-14);
            assert_eq!(kdv, b);
            // the Boussinesq wave with the matching alpha is the same curve
            let (z1, _) = boussinesq_solitary(&p, 0.0, x);
            assert!((z1 - b).abs() < 1e-14);
        }
    }
}
