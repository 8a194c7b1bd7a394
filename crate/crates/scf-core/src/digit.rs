use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScfError};

/// Parity tag of an SCF digit: `e` for branches of the even continued
/// fraction part on `(0, 1/2]`, `o` for the odd-odd part on `(1/2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    #[serde(rename = "e")]
    E,
    #[serde(rename = "o")]
    O,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::E => write!(f, "e"),
            Parity::O => write!(f, "o"),
        }
    }
}

/// One SCF symbol `(a, eps)_s` from the alphabet
/// `{(k, ±1)_{e,o} : k >= 2} ∪ {(1, +1)_e}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Digit {
    a: u64,
    eps: i8,
    parity: Parity,
}

impl Digit {
    /// Build a digit, rejecting symbols outside the alphabet.
    pub fn new(a: u64, eps: i8, parity: Parity) -> Result<Digit> {
        if eps != 1 && eps != -1 {
            return Err(ScfError::InvalidParameter(format!(
                "digit sign must be ±1, got {eps}"
            )));
        }
        let ok = a >= 2 || (a == 1 && eps == 1 && parity == Parity::E);
        if !ok {
            return Err(ScfError::InvalidParameter(format!(
                "({a},{eps})_{parity} is not in the digit alphabet"
            )));
        }
        Ok(Digit { a, eps, parity })
    }

    /// The unit digit `(1, +1)_e`.
    pub const fn unit() -> Digit {
        Digit {
            a: 1,
            eps: 1,
            parity: Parity::E,
        }
    }

    pub const fn a(self) -> u64 {
        self.a
    }

    pub const fn eps(self) -> i8 {
        self.eps
    }

    pub const fn parity(self) -> Parity {
        self.parity
    }

    /// `max(0, eps)`, the quantity written `ε̄` in the branch formulas.
    pub const fn eps_bar(self) -> u64 {
        if self.eps > 0 {
            1
        } else {
            0
        }
    }

    /// The substitution induced by the involution `ι(x) = (1-x)/(1+x)`:
    /// swaps the parity tag except on the fixed digit `(1, +1)_e`.
    pub fn substitute(self) -> Digit {
        if self.a == 1 {
            return self;
        }
        let parity = match self.parity {
            Parity::E => Parity::O,
            Parity::O => Parity::E,
        };
        Digit { parity, ..self }
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{:+})_{}", self.a, self.eps, self.parity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_validation() {
        assert!(Digit::new(1, 1, Parity::E).is_ok());
        assert!(Digit::new(1, 1, Parity::O).is_err());
        assert!(Digit::new(1, -1, Parity::E).is_err());
        assert!(Digit::new(2, -1, Parity::O).is_ok());
        assert!(Digit::new(0, 1, Parity::E).is_err());
        assert!(Digit::new(3, 2, Parity::E).is_err());
    }

    #[test]
    fn substitution_swaps_parity_and_fixes_unit() {
        let d = Digit::new(2, -1, Parity::E).unwrap();
        assert_eq!(d.substitute(), Digit::new(2, -1, Parity::O).unwrap());
        assert_eq!(d.substitute().substitute(), d);
        assert_eq!(Digit::unit().substitute(), Digit::unit());
    }

    #[test]
    fn display_format() {
        assert_eq!(Digit::new(3, 1, Parity::O).unwrap().to_string(), "(3,+1)_o");
        assert_eq!(Digit::unit().to_string(), "(1,+1)_e");
    }
}
