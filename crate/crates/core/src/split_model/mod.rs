//! Functional split options, their cost table, and the per-EC compute and
//! midhaul accounting that follows from a group assignment.

mod ledger;
mod table;

pub use ledger::{
    check_constraints, gops_for_group, gops_total, midhaul_for_group, midhaul_total, GroupCounts,
    ResourceLedger, ViolationReport,
};
pub use table::{validate_fs_table, FsConfigTable, FsCostRow, TableViolation};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const N_FS_OPTIONS: usize = 7;
/// FS 1-4 keep the MC-coordination functions at the central cloud.
pub const N_MC_CAPABLE: usize = 4;

/// A functional split index, 1 (most centralized) to 7 (most distributed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct FsOption(u8);

impl FsOption {
    pub fn new(index: u8) -> Result<Self> {
        if (1..=N_FS_OPTIONS as u8).contains(&index) {
            Ok(Self(index))
        } else {
            Err(Error::Action(format!("FS index {index} outside 1..=7")))
        }
    }

    /// Only for a transitional group: rejects anything that cannot carry
    /// multi-connectivity across CCAs.
    pub fn transitional(index: u8) -> Result<Self> {
        let fs = Self::new(index)?;
        if fs.mc_capable_for_transitional() {
            Ok(fs)
        } else {
            Err(Error::Action(format!(
                "FS {index} cannot serve transitional users (only 1..=4)"
            )))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Zero-based row in cost tables and action heads.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_slot(slot: usize) -> Result<Self> {
        Self::new(u8::try_from(slot + 1).unwrap_or(u8::MAX))
    }

    pub fn mc_capable_for_transitional(self) -> bool {
        self.0 as usize <= N_MC_CAPABLE
    }

    pub fn all() -> impl Iterator<Item = FsOption> {
        (1..=N_FS_OPTIONS as u8).map(FsOption)
    }
}

impl TryFrom<u8> for FsOption {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FsOption> for u8 {
    fn from(f: FsOption) -> u8 {
        f.0
    }
}

impl fmt::Display for FsOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FS{}", self.0)
    }
}

/// F_t for the whole network plus one F_nt per EC (indexed by EC id).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupAssignment {
    pub fs_transitional: FsOption,
    pub fs_non_transitional: Vec<FsOption>,
}

impl GroupAssignment {
    pub fn new(fs_transitional: FsOption, fs_non_transitional: Vec<FsOption>) -> Result<Self> {
        if !fs_transitional.mc_capable_for_transitional() {
            return Err(Error::Action(format!(
                "{fs_transitional} cannot serve transitional users"
            )));
        }
        Ok(Self {
            fs_transitional,
            fs_non_transitional,
        })
    }

    /// The same split everywhere; `fs` must be MC-capable.
    pub fn uniform(fs: FsOption, n_ecs: usize) -> Result<Self> {
        Self::new(fs, vec![fs; n_ecs])
    }

    pub fn fs_nt(&self, ec: usize) -> FsOption {
        self.fs_non_transitional[ec]
    }
}

impl fmt::Display for GroupAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ft={} Fnt=[", self.fs_transitional.index())?;
        for (i, fs) in self.fs_non_transitional.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", fs.index())?;
        }
        write!(f, "]")
    }
}
