//! Validation reports for law-checked structures.

use std::fmt;

use crate::category::MorId;
use crate::error::Error;

/// The law a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Law {
    IdentityTyping,
    CompositeTyping,
    LeftIdentity,
    RightIdentity,
    Associativity,
    FunctorTyping,
    FunctorIdentity,
    FunctorComposition,
    RestrictionIdentity,
    RestrictionComposition,
    RestrictionRange,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Law::IdentityTyping => "identity-typing",
            Law::CompositeTyping => "composite-typing",
            Law::LeftIdentity => "left-identity",
            Law::RightIdentity => "right-identity",
            Law::Associativity => "associativity",
            Law::FunctorTyping => "functor-typing",
            Law::FunctorIdentity => "functor-identity",
            Law::FunctorComposition => "functor-composition",
            Law::RestrictionIdentity => "restriction-identity",
            Law::RestrictionComposition => "restriction-composition",
            Law::RestrictionRange => "restriction-range",
        };
        f.write_str(s)
    }
}

/// One violated instance of a law, identified by the morphisms involved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub law: Law,
    pub morphisms: Vec<MorId>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.law)?;
        for (i, m) in self.morphisms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str(")")
    }
}

/// Every violated law instance found, in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, law: Law, morphisms: impl Into<Vec<MorId>>) {
        self.violations.push(Violation {
            law,
            morphisms: morphisms.into(),
        });
    }

    pub fn has(&self, law: Law) -> bool {
        self.violations.iter().any(|v| v.law == law)
    }

    pub fn into_result(self) -> Result<(), Error> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::AxiomViolation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
