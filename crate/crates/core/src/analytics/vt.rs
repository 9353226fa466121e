//! Limit variance clocks V_t of the functional central limit theorems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitTheorem {
    /// t^{2gamma-1} n^{gamma-1/2} (Z_{nt} - Z), rho = 1.
    FluctZ,
    /// Synchronization of walker i with the mean, rho = 1.
    SyncRho1,
    /// Z_m - q, rho < 1.
    FluctQ,
    /// Synchronization of walker i with the mean, rho < 1.
    SyncQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    GammaLt1,
    GammaEq1,
}

impl Regime {
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if gamma > 0.5 && gamma < 1.0 {
            Ok(Regime::GammaLt1)
        } else if gamma == 1.0 {
            Ok(Regime::GammaEq1)
        } else {
            Err(Error::Inadmissible(format!(
                "fluctuation limits need 1/2 < gamma <= 1, got {gamma}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VtSpec {
    pub theorem: LimitTheorem,
    pub regime: Regime,
    pub c: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub rho: f64,
    pub q: f64,
    pub n_walkers: usize,
    /// Plug-in value of the limit Z; ignored by the q theorems.
    pub z_limit: f64,
}

impl VtSpec {
    /// Builds a spec with the regime read off gamma and checks admissibility.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        theorem: LimitTheorem,
        c: f64,
        gamma: f64,
        alpha: f64,
        rho: f64,
        q: f64,
        n_walkers: usize,
        z_limit: f64,
    ) -> Result<Self> {
        let spec = Self {
            theorem,
            regime: Regime::from_gamma(gamma)?,
            c,
            gamma,
            alpha,
            rho,
            q,
            n_walkers,
            z_limit,
        };
        spec.check_admissible()?;
        Ok(spec)
    }

    pub fn with_z(mut self, z: f64) -> Self {
        self.z_limit = z;
        self
    }

    /// Contraction rate a in exp(c a t) or (1 + t)^{c a}: alpha, 1 - rho or
    /// 1 - rho (1 - alpha). Zero for the fluctuation theorem, which has none.
    pub fn rate(&self) -> f64 {
        match self.theorem {
            LimitTheorem::FluctZ => 0.0,
            LimitTheorem::SyncRho1 => self.alpha,
            LimitTheorem::FluctQ => 1.0 - self.rho,
            LimitTheorem::SyncQ => 1.0 - self.rho * (1.0 - self.alpha),
        }
    }

    pub fn check_admissible(&self) -> Result<()> {
        if Regime::from_gamma(self.gamma)? != self.regime {
            return Err(Error::Inadmissible(format!(
                "regime {:?} does not match gamma = {}",
                self.regime, self.gamma
            )));
        }
        if !(self.c > 0.0) || self.n_walkers == 0 {
            return Err(Error::Inadmissible("need c > 0 and N >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.z_limit) {
            return Err(Error::Inadmissible(format!("z_limit = {} outside [0, 1]", self.z_limit)));
        }
        match self.theorem {
            LimitTheorem::FluctZ | LimitTheorem::SyncRho1 => {
                if self.rho != 1.0 {
                    return Err(Error::Inadmissible("this limit requires rho = 1".into()));
                }
                if !(self.alpha > 0.0) {
                    return Err(Error::Inadmissible(
                        "rho = 1 limits require alpha > 0 (rho (1 - alpha) < 1)".into(),
                    ));
                }
            }
            LimitTheorem::FluctQ | LimitTheorem::SyncQ => {
                if !(self.rho < 1.0) {
                    return Err(Error::Inadmissible("this limit requires rho < 1".into()));
                }
                if !(self.q > 0.0 && self.q < 1.0) {
                    return Err(Error::Inadmissible("this limit requires q in (0, 1)".into()));
                }
            }
        }
        if self.regime == Regime::GammaEq1 && self.theorem != LimitTheorem::FluctZ {
            let ca2 = 2.0 * self.c * self.rate();
            if !(ca2 > 1.0) {
                let condition = match self.theorem {
                    LimitTheorem::SyncRho1 => "2 c alpha > 1",
                    LimitTheorem::FluctQ => "2 c (1 - rho) > 1",
                    _ => "2 c (1 - rho (1 - alpha)) > 1",
                };
                return Err(Error::Inadmissible(format!(
                    "gamma = 1 requires {condition}, got {ca2}"
                )));
            }
        }
        Ok(())
    }

    /// Z(1 - Z) for the rho = 1 limits, q(1 - q) otherwise.
    pub fn bernoulli_variance(&self) -> f64 {
        match self.theorem {
            LimitTheorem::FluctZ | LimitTheorem::SyncRho1 => self.z_limit * (1.0 - self.z_limit),
            LimitTheorem::FluctQ | LimitTheorem::SyncQ => self.q * (1.0 - self.q),
        }
    }

    /// Deterministic scale on the process: t^{2gamma-1} n^{gamma-1/2} for the
    /// fluctuation limit, n^{gamma/2} e^{c a t} or n^{1/2} (1 + t)^{c a} otherwise.
    pub fn process_scale(&self, n: u64, t: f64) -> f64 {
        let nf = n as f64;
        match (self.theorem, self.regime) {
            (LimitTheorem::FluctZ, _) => {
                t.powf(2.0 * self.gamma - 1.0) * nf.powf(self.gamma - 0.5)
            }
            (_, Regime::GammaLt1) => nf.powf(self.gamma / 2.0) * (self.c * self.rate() * t).exp(),
            (_, Regime::GammaEq1) => nf.sqrt() * (1.0 + t).powf(self.c * self.rate()),
        }
    }
}

/// V_t for the selected limit.
///
/// For the q limits with gamma = 1 the factor rho^2 multiplies the noise
/// variance exactly as in the gamma < 1 case.
pub fn v_t(spec: &VtSpec, t: f64) -> Result<f64> {
    spec.check_admissible()?;
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("t must be >= 0, got {t}")));
    }
    let n = spec.n_walkers as f64;
    let c = spec.c;
    let b = spec.bernoulli_variance();
    let a = spec.rate();
    let spread = 1.0 - 1.0 / n;
    let rho2 = spec.rho * spec.rho;
    let v = match (spec.theorem, spec.regime) {
        (LimitTheorem::FluctZ, _) => {
            let e = 2.0 * spec.gamma - 1.0;
            c * c / (n * e) * b * t.powf(e)
        }
        (LimitTheorem::SyncRho1, Regime::GammaLt1) => {
            spread * c * b / (2.0 * a) * (2.0 * c * a * t).exp()
        }
        (LimitTheorem::FluctQ, Regime::GammaLt1) => {
            c * b * rho2 / (2.0 * n * a) * (2.0 * c * a * t).exp()
        }
        (LimitTheorem::SyncQ, Regime::GammaLt1) => {
            spread * c * rho2 * b / (2.0 * a) * (2.0 * c * a * t).exp()
        }
        (LimitTheorem::SyncRho1, Regime::GammaEq1) => {
            let e = 2.0 * c * a - 1.0;
            spread * c * c * b / e * (1.0 + t).powf(e)
        }
        (LimitTheorem::FluctQ, Regime::GammaEq1) => {
            let e = 2.0 * c * a - 1.0;
            c * c * b * rho2 / (n * e) * (1.0 + t).powf(e)
        }
        (LimitTheorem::SyncQ, Regime::GammaEq1) => {
            let e = 2.0 * c * a - 1.0;
            spread * c * c * rho2 * b / e * (1.0 + t).powf(e)
        }
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(theorem: LimitTheorem, gamma: f64, rho: f64, n: usize) -> VtSpec {
        VtSpec::new(theorem, 1.0, gamma, 0.5, rho, 0.5, n, 0.5).unwrap()
    }

    #[test]
    fn reference_values() {
        let s = spec(LimitTheorem::FluctZ, 0.75, 1.0, 2);
        assert_relative_eq!(v_t(&s, 1.0).unwrap(), 0.25);
        let s = spec(LimitTheorem::SyncRho1, 0.75, 1.0, 2);
        assert_relative_eq!(v_t(&s, 0.0).unwrap(), 0.125);
    }

    #[test]
    fn degenerate_limit_gives_zero() {
        for th in [LimitTheorem::FluctZ, LimitTheorem::SyncRho1] {
            let s = spec(th, 0.75, 1.0, 3).with_z(0.0);
            for t in [0.0, 0.5, 3.0] {
                assert_eq!(v_t(&s, t).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn admissibility() {
        assert!(VtSpec::new(LimitTheorem::SyncRho1, 1.0, 1.0, 0.5, 1.0, 0.5, 2, 0.5).is_err());
        assert!(VtSpec::new(LimitTheorem::SyncRho1, 2.0, 1.0, 0.5, 1.0, 0.5, 2, 0.5).is_ok());
        assert!(VtSpec::new(LimitTheorem::FluctQ, 1.0, 1.0, 0.5, 0.5, 0.5, 2, 0.5).is_err());
        assert!(VtSpec::new(LimitTheorem::FluctQ, 2.0, 1.0, 0.5, 0.5, 0.5, 2, 0.5).is_ok());
        assert!(VtSpec::new(LimitTheorem::SyncQ, 1.0, 1.0, 0.5, 0.5, 0.5, 2, 0.5).is_ok());
        assert!(VtSpec::new(LimitTheorem::FluctZ, 1.0, 0.75, 0.5, 0.5, 0.5, 2, 0.5).is_err());
        assert!(VtSpec::new(LimitTheorem::FluctQ, 1.0, 0.75, 0.5, 0.5, 1.0, 2, 0.5).is_err());
        assert!(VtSpec::new(LimitTheorem::FluctZ, 1.0, 0.5, 0.5, 1.0, 0.5, 2, 0.5).is_err());
        let err = VtSpec::new(LimitTheorem::SyncRho1, 0.5, 1.0, 0.5, 1.0, 0.5, 2, 0.5).unwrap_err();
        assert!(err.to_string().contains("2 c alpha > 1"));
    }

    #[test]
    fn walker_count_scaling() {
        let v2 = v_t(&spec(LimitTheorem::FluctZ, 0.75, 1.0, 2), 1.0).unwrap();
        let v4 = v_t(&spec(LimitTheorem::FluctZ, 0.75, 1.0, 4), 1.0).unwrap();
        assert_relative_eq!(v2 / v4, 2.0);
        let s2 = v_t(&spec(LimitTheorem::SyncRho1, 0.75, 1.0, 2), 1.0).unwrap();
        let s4 = v_t(&spec(LimitTheorem::SyncRho1, 0.75, 1.0, 4), 1.0).unwrap();
        assert_relative_eq!(s4 / s2, 0.75 / 0.5);
    }
}
