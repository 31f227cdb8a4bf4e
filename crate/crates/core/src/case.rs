//! The three two-function cases and their roots of unity.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "4a")]
    A4,
    #[serde(rename = "5a")]
    A5,
    #[serde(rename = "6a")]
    A6,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::A4, Case::A5, Case::A6];

    /// Matrix size n + 1.
    pub fn dim(self) -> usize {
        match self {
            Case::A4 => 4,
            Case::A5 => 5,
            Case::A6 => 6,
        }
    }

    pub fn omega(self) -> Complex64 {
        self.omega_pow(1.0)
    }

    /// `ω^p` for real `p`, taken on the principal branch `e^{2πip/N}`.
    pub fn omega_pow(self, p: f64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * p / self.dim() as f64)
    }

    /// Converts `k` to its numerator over `N`, rejecting off-lattice values.
    pub fn step_of(self, k: f64) -> Result<i64> {
        let n = self.dim() as f64;
        let m = (k * n).round();
        if !k.is_finite() || (k * n - m).abs() > 1e-9 {
            return Err(Error::OffLattice { num: k, den: self.dim(), case: self });
        }
        Ok(m as i64)
    }

    /// Exponents `(a, b)` of the radial system.
    pub fn exponents(self) -> (i32, i32) {
        match self {
            Case::A4 => (2, 2),
            Case::A5 => (2, 1),
            Case::A6 => (1, 1),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::A4 => "4a",
            Case::A5 => "5a",
            Case::A6 => "6a",
        })
    }
}

impl FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "4a" => Ok(Case::A4),
            "5a" => Ok(Case::A5),
            "6a" => Ok(Case::A6),
            other => Err(Error::UnknownCase(other.to_string())),
        }
    }
}
