//! Physical-quantity newtypes.
//!
//! Every quantity serializes as a bare number so catalog and API payloads stay
//! plain JSON; the wrapper only exists on the Rust side to keep watts from
//! being added to kilograms.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

/// Hours in a non-leap year.
pub const HOURS_PER_YEAR: f64 = 8760.0;
/// Seconds in a non-leap year.
pub const SECONDS_PER_YEAR: f64 = 31_536_000.0;

macro_rules! quantity {
    ($(#[$meta:meta])* $name:ident, $unit:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub f64);

        impl $name {
            pub const ZERO: Self = Self(0.0);

            #[inline]
            pub fn value(self) -> f64 {
                self.0
            }
        }

        impl Add for $name {
            type Output = Self;
            #[inline]
            fn add(self, rhs: Self) -> Self {
                Self(self.0 + rhs.0)
            }
        }

        impl Sub for $name {
            type Output = Self;
            #[inline]
            fn sub(self, rhs: Self) -> Self {
                Self(self.0 - rhs.0)
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            #[inline]
            fn mul(self, rhs: f64) -> Self {
                Self(self.0 * rhs)
            }
        }

        impl Div<f64> for $name {
            type Output = Self;
            #[inline]
            fn div(self, rhs: f64) -> Self {
                Self(self.0 / rhs)
            }
        }

        impl std::iter::Sum for $name {
            fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
                Self(iter.map(|q| q.0).sum())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)?;
                f.write_str(concat!(" ", $unit))
            }
        }
    };
}

quantity!(
    /// Electrical power.
    Watts,
    "W"
);
quantity!(
    /// Grid carbon intensity.
    GramsPerKwh,
    "gCO2e/kWh"
);
quantity!(
    /// A mass of CO2-equivalent emissions.
    KgCo2e,
    "kgCO2e"
);
quantity!(
    /// An emission rate.
    KgCo2ePerYear,
    "kgCO2e/yr"
);
quantity!(
    /// A span of service time.
    Years,
    "yr"
);
quantity!(
    /// Time per unit of work.
    Nanoseconds,
    "ns"
);

impl Watts {
    /// Energy drawn over one year of continuous operation.
    pub fn annual_energy_kwh(self) -> f64 {
        self.0 / 1000.0 * HOURS_PER_YEAR
    }
}

impl Div<Years> for KgCo2e {
    type Output = KgCo2ePerYear;
    #[inline]
    fn div(self, rhs: Years) -> KgCo2ePerYear {
        KgCo2ePerYear(self.0 / rhs.0)
    }
}

impl Mul<Years> for KgCo2ePerYear {
    type Output = KgCo2e;
    #[inline]
    fn mul(self, rhs: Years) -> KgCo2e {
        KgCo2e(self.0 * rhs.0)
    }
}

impl Div<KgCo2ePerYear> for KgCo2e {
    type Output = Years;
    #[inline]
    fn div(self, rhs: KgCo2ePerYear) -> Years {
        Years(self.0 / rhs.0)
    }
}

impl Nanoseconds {
    pub fn as_seconds(self) -> f64 {
        self.0 * 1e-9
    }
}
