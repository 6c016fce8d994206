//! Dimension-checked quantities in natural units (ħ = c = 1).
//!
//! Every quantity carries a single integer mass dimension: energy and mass
//! are `+1`, length and time are `-1`, energy density is `+4`. Conversions
//! to CGS lengths and seconds live here and are only used at I/O boundaries.

use std::fmt;
use std::ops::{Div, Mul, Neg};

use crate::error::{Error, Result};

/// One inverse GeV expressed in centimetres.
pub const GEV_INV_IN_CM: f64 = 1.973e-14;

/// ħ in GeV·s; one inverse GeV of time expressed in seconds.
pub const GEV_INV_IN_SECONDS: f64 = 6.582e-25;

/// Planck mass in GeV.
pub const PLANCK_MASS_GEV: f64 = 1.22e19;

/// Present Hubble rate in GeV, the canonical value used for every number
/// this crate reports.
pub const HUBBLE_NOW_GEV: f64 = 0.769e-42;

/// Present Hubble rate as an inverse length, cm⁻¹. Informational only: it
/// does not convert to [`HUBBLE_NOW_GEV`] with [`GEV_INV_IN_CM`].
pub const HUBBLE_NOW_CM_INV: f64 = 1.0 / 1.3e28;

pub const PROTON_MASS_GEV: f64 = 0.938;
pub const ELECTRON_MASS_GEV: f64 = 0.511e-3;

/// A finite real value with a mass dimension.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Quantity {
    value: f64,
    dim: i32,
}

impl Quantity {
    pub fn new(value: f64, dim: i32) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite { dim });
        }
        Ok(Self { value, dim })
    }

    pub fn dimensionless(value: f64) -> Result<Self> {
        Self::new(value, 0)
    }

    /// Energy (or mass) in GeV.
    pub fn gev(value: f64) -> Result<Self> {
        Self::new(value, 1)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dim(&self) -> i32 {
        self.dim
    }

    pub fn expect_dim(&self, expected: i32) -> Result<()> {
        if self.dim == expected {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected,
                actual: self.dim,
            })
        }
    }

    fn checked(value: f64, dim: i32) -> Result<Self> {
        if value.is_finite() {
            Ok(Self { value, dim })
        } else {
            Err(Error::NonFinite { dim })
        }
    }

    pub fn try_add(self, rhs: Self) -> Result<Self> {
        rhs.expect_dim(self.dim)?;
        Self::checked(self.value + rhs.value, self.dim)
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self> {
        rhs.expect_dim(self.dim)?;
        Self::checked(self.value - rhs.value, self.dim)
    }

    pub fn try_mul(self, rhs: Self) -> Result<Self> {
        Self::checked(self.value * rhs.value, self.dim + rhs.dim)
    }

    pub fn try_div(self, rhs: Self) -> Result<Self> {
        Self::checked(self.value / rhs.value, self.dim - rhs.dim)
    }

    pub fn scale(self, factor: f64) -> Result<Self> {
        Self::checked(self.value * factor, self.dim)
    }

    pub fn powi(self, p: i32) -> Result<Self> {
        Self::checked(self.value.powi(p), self.dim * p)
    }

    /// Rational power `p/q`. Admitted only when `dim * p` is divisible by `q`.
    pub fn pow_ratio(self, p: i32, q: i32) -> Result<Self> {
        if q <= 0 {
            return Err(Error::Domain(format!("power denominator must be positive, got {q}")));
        }
        let scaled = self.dim * p;
        if scaled % q != 0 {
            return Err(Error::FractionalDimension {
                dim: self.dim,
                num: p,
                den: q,
            });
        }
        let value = match (p, q) {
            (1, 2) => self.value.sqrt(),
            (1, 3) => self.value.cbrt(),
            _ => self.value.powf(p as f64 / q as f64),
        };
        Self::checked(value, scaled / q)
    }

    pub fn sqrt(self) -> Result<Self> {
        self.pow_ratio(1, 2)
    }

    pub fn cbrt(self) -> Result<Self> {
        self.pow_ratio(1, 3)
    }
}

// Products and quotients of finite values can only leave the finite range by
// overflow; the infallible operators are for code paths where magnitudes are
// known. Use the `try_` forms otherwise.
impl Mul for Quantity {
    type Output = Quantity;

    fn mul(self, rhs: Quantity) -> Quantity {
        Quantity {
            value: self.value * rhs.value,
            dim: self.dim + rhs.dim,
        }
    }
}

impl Div for Quantity {
    type Output = Quantity;

    fn div(self, rhs: Quantity) -> Quantity {
        Quantity {
            value: self.value / rhs.value,
            dim: self.dim - rhs.dim,
        }
    }
}

impl Mul<f64> for Quantity {
    type Output = Quantity;

    fn mul(self, rhs: f64) -> Quantity {
        Quantity {
            value: self.value * rhs,
            dim: self.dim,
        }
    }
}

impl Neg for Quantity {
    type Output = Quantity;

    fn neg(self) -> Quantity {
        Quantity {
            value: -self.value,
            dim: self.dim,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} GeV^{}", self.value, self.dim)
    }
}

/// Physical constants in natural units.
#[derive(Debug, Clone, Copy)]
pub struct Constants {
    pub planck_mass: Quantity,
    pub newton_g: Quantity,
    pub hubble_now: Quantity,
    pub gev_inv_in_cm: f64,
    pub proton_mass: Quantity,
}

impl Constants {
    pub fn standard() -> Self {
        let planck_mass = Quantity {
            value: PLANCK_MASS_GEV,
            dim: 1,
        };
        Self {
            planck_mass,
            newton_g: Quantity {
                value: 1.0 / (PLANCK_MASS_GEV * PLANCK_MASS_GEV),
                dim: -2,
            },
            hubble_now: Quantity {
                value: HUBBLE_NOW_GEV,
                dim: 1,
            },
            gev_inv_in_cm: GEV_INV_IN_CM,
            proton_mass: Quantity {
                value: PROTON_MASS_GEV,
                dim: 1,
            },
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::standard()
    }
}

/// Newton's constant `G = 1/M_Pl²`, dimension −2.
pub fn newton_g() -> Quantity {
    Constants::standard().newton_g
}

pub fn length_to_cm(q: Quantity) -> Result<f64> {
    q.expect_dim(-1)?;
    Ok(q.value * GEV_INV_IN_CM)
}

pub fn cm_to_length(cm: f64) -> Result<Quantity> {
    Quantity::new(cm / GEV_INV_IN_CM, -1)
}

/// Converts an inverse length in cm⁻¹ to an energy in GeV.
pub fn hubble_from_cm_inverse(h: f64) -> Result<Quantity> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!(
            "inverse length must be positive and finite, got {h}"
        )));
    }
    Quantity::new(h * GEV_INV_IN_CM, 1)
}

pub fn time_to_seconds(q: Quantity) -> Result<f64> {
    q.expect_dim(-1)?;
    Ok(q.value * GEV_INV_IN_SECONDS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn length_conversion_examples() {
        assert_eq!(length_to_cm(Quantity::new(1.0, -1).unwrap()).unwrap(), 1.973e-14);
        assert_eq!(length_to_cm(Quantity::new(0.0, -1).unwrap()).unwrap(), 0.0);
        let rc = length_to_cm(Quantity::new(5.373e8, -1).unwrap()).unwrap();
        assert!(rel(rc, 1.06e-5) < 1e-3, "{rc}");
    }

    #[test]
    fn length_conversion_rejects_wrong_dimension() {
        let err = length_to_cm(Quantity::new(1.0, 1).unwrap()).unwrap_err();
        assert_eq!(
            err,
            Error::Dimension {
                expected: -1,
                actual: 1
            }
        );
        assert!(time_to_seconds(Quantity::new(1.0, 4).unwrap()).is_err());
    }

    #[test]
    fn hubble_conversion() {
        let unit = hubble_from_cm_inverse(1.0 / 1.973e-14).unwrap();
        assert_eq!(unit.dim(), 1);
        assert!(rel(unit.value(), 1.0) < 1e-15);

        let h1 = hubble_from_cm_inverse(HUBBLE_NOW_CM_INV).unwrap();
        let h2 = hubble_from_cm_inverse(2.0 * HUBBLE_NOW_CM_INV).unwrap();
        assert_eq!(h2.value(), 2.0 * h1.value());

        // The cm⁻¹ form of the present Hubble rate converts to 1.518e-42 GeV;
        // the canonical 0.769e-42 GeV differs from it by exactly the
        // conversion factor (0.769 = 1/1.3).
        assert!(rel(h1.value(), 1.5176923076923077e-42) < 1e-15);
        assert!(rel(h1.value() / HUBBLE_NOW_GEV, 1.973) < 1e-3);

        assert!(hubble_from_cm_inverse(0.0).is_err());
        assert!(hubble_from_cm_inverse(-1.0).is_err());
    }

    #[test]
    fn time_conversion_examples() {
        assert_eq!(time_to_seconds(Quantity::new(1.0, -1).unwrap()).unwrap(), 6.582e-25);
        assert_eq!(time_to_seconds(Quantity::new(0.0, -1).unwrap()).unwrap(), 0.0);
        let s = time_to_seconds(Quantity::new(9.09e46, -1).unwrap()).unwrap();
        assert!(rel(s, 5.98e22) < 1e-3, "{s}");
    }

    #[test]
    fn constants_are_consistent() {
        let c = Constants::standard();
        let unity = c.newton_g * c.planck_mass * c.planck_mass;
        assert_eq!(unity.dim(), 0);
        assert!((unity.value() - 1.0).abs() <= 2.0 * f64::EPSILON);
        assert_eq!(c.hubble_now.value(), 0.769e-42);
        assert_eq!(c.proton_mass.value(), 0.938);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Quantity::new(f64::NAN, 0).is_err());
        assert!(Quantity::new(f64::INFINITY, 1).is_err());
        assert!(Quantity::new(f64::NEG_INFINITY, -1).is_err());
        let big = Quantity::new(1e200, 1).unwrap();
        assert!(big.try_mul(big).is_err());
    }

    #[test]
    fn dimension_algebra() {
        let a = Quantity::new(3.0, 2).unwrap();
        let b = Quantity::new(2.0, -1).unwrap();
        assert_eq!((a * b).dim(), 1);
        assert_eq!((a / b).dim(), 3);
        assert_eq!(a.powi(3).unwrap().dim(), 6);
        assert!(a.try_add(b).is_err());
        assert_eq!(a.try_sub(a).unwrap().value(), 0.0);

        let v = Quantity::new(8.0, -6).unwrap();
        assert_eq!(v.sqrt().unwrap().dim(), -3);
        assert_eq!(v.cbrt().unwrap(), Quantity::new(2.0, -2).unwrap());
        assert_eq!(
            Quantity::new(4.0, 1).unwrap().sqrt().unwrap_err(),
            Error::FractionalDimension { dim: 1, num: 1, den: 2 }
        );
        assert_eq!(Quantity::new(16.0, 4).unwrap().pow_ratio(3, 4).unwrap().dim(), 3);
    }
}
