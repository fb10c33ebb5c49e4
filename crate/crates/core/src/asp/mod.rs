//! Answer-set repair programs in DLV syntax, a normalizing comparison for
//! such programs, and a reader for solver output.

mod compare;
mod emit;
mod models;

pub use compare::{compare_programs, programs_equivalent, ProgramDiff};
pub use emit::{emit_null_repair_program, emit_tuple_repair_program, emit_tuple_repair_program_with_ids};
pub use models::{
    parse_models, verify_model_correspondence, CorrespondenceReport, ModelAtom, ModelParseError, ModelTerm,
    StableModel, VerifyError,
};

use alloc::collections::BTreeSet;
use alloc::string::String;
use core::fmt;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    Disjunctive,
    #[default]
    NonDisjunctive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extension {
    Causes,
    CauCont,
    ContingencySets,
    PreRho,
    WeakConstraints,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Semantics {
    #[default]
    Tuple,
    Null,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    CoreAsp,
    SetExtendedAsp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmitOptions {
    pub flavor: Flavor,
    pub include: BTreeSet<Extension>,
    pub maxint: u64,
    pub semantics: Semantics,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions {
            flavor: Flavor::NonDisjunctive,
            include: BTreeSet::new(),
            maxint: 100,
            semantics: Semantics::Tuple,
        }
    }
}

impl EmitOptions {
    pub fn with(mut self, extensions: &[Extension]) -> Self {
        self.include.extend(extensions.iter().copied());
        self
    }

    pub fn has(&self, e: Extension) -> bool {
        self.include.contains(&e)
    }

    /// Checks the option combination against an instance with `tuples`
    /// tuples whose largest tid is `max_tid`.
    pub fn validate(&self, tuples: usize, max_tid: u64) -> Result<(), EmitError> {
        use Extension::*;
        if self.semantics == Semantics::Null {
            if let Some(e) = [CauCont, ContingencySets, PreRho, WeakConstraints]
                .into_iter()
                .find(|e| self.has(*e))
            {
                return Err(EmitError::UnsupportedForNull(e));
            }
        }
        for extension in [ContingencySets, PreRho] {
            if !self.has(extension) {
                continue;
            }
            if let Some(needs) = [CauCont, Causes].into_iter().find(|e| !self.has(*e)) {
                return Err(EmitError::Requires { extension, needs });
            }
        }
        if self.has(PreRho) {
            let needed = (tuples as u64 + 1).max(max_tid);
            if self.maxint < needed {
                return Err(EmitError::MaxintTooSmall {
                    maxint: self.maxint,
                    needed,
                });
            }
        }
        Ok(())
    }

    pub fn dialect(&self) -> Dialect {
        if self.has(Extension::ContingencySets) || self.has(Extension::PreRho) {
            Dialect::SetExtendedAsp
        } else {
            Dialect::CoreAsp
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmitError {
    Requires {
        extension: Extension,
        needs: Extension,
    },
    MaxintTooSmall {
        maxint: u64,
        needed: u64,
    },
    UnsupportedForNull(Extension),
    /// A constraint with neither joins, constants nor built-ins cannot be
    /// repaired by nulls.
    NotNullRepairable(usize),
}

impl fmt::Display for EmitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmitError::Requires { extension, needs } => {
                write!(f, "{extension:?} requires {needs:?} to be included")
            }
            EmitError::MaxintTooSmall { maxint, needed } => {
                write!(f, "maxint {maxint} is too small; at least {needed} is needed")
            }
            EmitError::UnsupportedForNull(e) => {
                write!(f, "{e:?} is not available for null-based repair programs")
            }
            EmitError::NotNullRepairable(i) => write!(
                f,
                "constraint #{} has no join, constant or comparison, so nulls cannot repair it",
                i + 1
            ),
        }
    }
}

impl core::error::Error for EmitError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramText {
    pub text: String,
    pub dialect: Dialect,
}
