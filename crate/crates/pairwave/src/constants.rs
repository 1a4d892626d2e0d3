//! Physical constants and the built-in atomic mass table (SI).

/// Reduced Planck constant [J s] (CODATA 2018 exact definition era).
pub const HBAR: f64 = 1.054571817e-34;

/// Atomic mass unit [kg].
pub const AMU: f64 = 1.66053906660e-27;

/// Riemann zeta at 1/2, the constant entering the quasi-1D reduction of the
/// contact interaction. Stored — computing zeta for one argument is not
/// worth an implementation.
pub const ZETA_HALF: f64 = -1.4603545088;

/// Species with built-in masses. Anything else goes through an explicit
/// mass in amu.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    K40,
    Li6,
}

impl Species {
    /// Isotope mass [kg].
    pub fn mass(self) -> f64 {
        self.mass_amu() * AMU
    }

    /// Isotope mass [amu] (AME 2020 values).
    pub fn mass_amu(self) -> f64 {
        match self {
            Species::K40 => 39.96399848,
            Species::Li6 => 6.0151228874,
        }
    }

    pub fn parse(name: &str) -> Option<Species> {
        match name.trim().to_ascii_lowercase().as_str() {
            "k40" | "40k" | "potassium40" => Some(Species::K40),
            "li6" | "6li" | "lithium6" => Some(Species::Li6),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Species::K40 => "k40",
            Species::Li6 => "li6",
        }
    }
}
