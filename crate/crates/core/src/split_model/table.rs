use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FsOption, N_FS_OPTIONS};
use crate::error::{Error, Result};

/// Cost of deploying one FS option.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FsCostRow {
    /// FS index, 1..=7.
    pub fs: u8,
    /// G_b: cell-PF GOPS per AP.
    pub cell_gops_per_ap: f64,
    /// G_u: user-PF GOPS per user.
    pub user_gops_per_user: f64,
    /// M: midhaul rate per AP, Mbps.
    pub midhaul_per_ap: f64,
    /// Processing delay of the PFs hosted at the EC, ms.
    pub proc_delay_ec: f64,
    /// Processing delay of the PFs hosted at the CC, ms.
    pub proc_delay_cc: f64,
    /// Midhaul transmission delay, ms.
    pub tx_delay_midhaul: f64,
}

impl FsCostRow {
    pub fn gops_sum(&self) -> f64 {
        self.cell_gops_per_ap + self.user_gops_per_user
    }

    pub fn delay_sum(&self) -> f64 {
        self.proc_delay_ec + self.proc_delay_cc + self.tx_delay_midhaul
    }

    fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("cell_gops_per_ap", self.cell_gops_per_ap),
            ("user_gops_per_user", self.user_gops_per_user),
            ("midhaul_per_ap", self.midhaul_per_ap),
            ("proc_delay_ec", self.proc_delay_ec),
            ("proc_delay_cc", self.proc_delay_cc),
            ("tx_delay_midhaul", self.tx_delay_midhaul),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TableViolation {
    Negative { fs: u8, field: &'static str, value: f64 },
    GopsDecreasing { lower: u8, higher: u8 },
    MidhaulIncreasing { lower: u8, higher: u8 },
    DelayIncreasing { lower: u8, higher: u8 },
}

impl fmt::Display for TableViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableViolation::Negative { fs, field, value } => {
                write!(f, "FS {fs}: {field} = {value} must be non-negative")
            }
            TableViolation::GopsDecreasing { lower, higher } => write!(
                f,
                "GOPS (cell + user) must be non-decreasing but FS {higher} < FS {lower}"
            ),
            TableViolation::MidhaulIncreasing { lower, higher } => write!(
                f,
                "midhaul must be non-increasing but FS {higher} > FS {lower}"
            ),
            TableViolation::DelayIncreasing { lower, higher } => write!(
                f,
                "total delay must be non-increasing but FS {higher} > FS {lower}"
            ),
        }
    }
}

/// Checks that `rows` cover FS 1..=7 exactly once and returns every broken
/// shape invariant. An empty list means the table is usable.
pub fn validate_fs_table(rows: &[FsCostRow]) -> Result<Vec<TableViolation>> {
    let ordered = order_rows(rows)?;
    let mut out = Vec::new();
    for r in &ordered {
        for (field, value) in r.fields() {
            if !(value >= 0.0) || !value.is_finite() {
                out.push(TableViolation::Negative { fs: r.fs, field, value });
            }
        }
    }
    for pair in ordered.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        if hi.gops_sum() < lo.gops_sum() {
            out.push(TableViolation::GopsDecreasing { lower: lo.fs, higher: hi.fs });
        }
        if hi.midhaul_per_ap > lo.midhaul_per_ap {
            out.push(TableViolation::MidhaulIncreasing { lower: lo.fs, higher: hi.fs });
        }
        if hi.delay_sum() > lo.delay_sum() {
            out.push(TableViolation::DelayIncreasing { lower: lo.fs, higher: hi.fs });
        }
    }
    Ok(out)
}

fn order_rows(rows: &[FsCostRow]) -> Result<[FsCostRow; N_FS_OPTIONS]> {
    let mut slots: [Option<FsCostRow>; N_FS_OPTIONS] = [None; N_FS_OPTIONS];
    for r in rows {
        let fs = FsOption::new(r.fs).map_err(|_| Error::Schema(format!("row for unknown FS {}", r.fs)))?;
        if slots[fs.slot()].replace(*r).is_some() {
            return Err(Error::Schema(format!("duplicate row for FS {}", r.fs)));
        }
    }
    let mut out = DEFAULT_ROWS;
    for (i, slot) in slots.iter().enumerate() {
        out[i] = slot.ok_or_else(|| Error::Schema(format!("missing row for FS {}", i + 1)))?;
    }
    Ok(out)
}

/// Shipped defaults. Moving from FS 1 to FS 7 hosts more PFs at the EC: EC
/// compute rises, midhaul load and end-to-end delay fall. FS 1 and 2 exceed
/// a 12 ms budget even unloaded.
const DEFAULT_ROWS: [FsCostRow; N_FS_OPTIONS] = [
    row(1, 150.0, 10.0, 6000.0, 0.5, 8.5, 3.0),
    row(2, 400.0, 40.0, 4500.0, 1.5, 6.9, 2.8),
    row(3, 600.0, 320.0, 2500.0, 2.5, 4.0, 2.5),
    row(4, 620.0, 335.0, 2000.0, 3.0, 2.0, 1.6),
    row(5, 700.0, 400.0, 800.0, 3.4, 0.8, 1.0),
    row(6, 750.0, 440.0, 300.0, 3.5, 0.3, 0.6),
    row(7, 800.0, 470.0, 100.0, 3.5, 0.0, 0.3),
];

const fn row(fs: u8, gb: f64, gu: f64, m: f64, ec: f64, cc: f64, tx: f64) -> FsCostRow {
    FsCostRow {
        fs,
        cell_gops_per_ap: gb,
        user_gops_per_user: gu,
        midhaul_per_ap: m,
        proc_delay_ec: ec,
        proc_delay_cc: cc,
        tx_delay_midhaul: tx,
    }
}

/// A validated cost table indexed by [`FsOption`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FsCostRow>", into = "Vec<FsCostRow>")]
pub struct FsConfigTable {
    rows: [FsCostRow; N_FS_OPTIONS],
}

impl FsConfigTable {
    /// Orders and validates `rows`; any invariant breach is a schema error.
    pub fn new(rows: &[FsCostRow]) -> Result<Self> {
        let violations = validate_fs_table(rows)?;
        if !violations.is_empty() {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::Schema(msg.join("; ")));
        }
        Ok(Self { rows: order_rows(rows)? })
    }

    pub fn row(&self, fs: FsOption) -> &FsCostRow {
        &self.rows[fs.slot()]
    }

    pub fn rows(&self) -> &[FsCostRow] {
        &self.rows
    }

    pub fn g_b(&self, fs: FsOption) -> f64 {
        self.row(fs).cell_gops_per_ap
    }

    pub fn g_u(&self, fs: FsOption) -> f64 {
        self.row(fs).user_gops_per_user
    }

    pub fn midhaul(&self, fs: FsOption) -> f64 {
        self.row(fs).midhaul_per_ap
    }
}

impl Default for FsConfigTable {
    fn default() -> Self {
        Self { rows: DEFAULT_ROWS }
    }
}

impl TryFrom<Vec<FsCostRow>> for FsConfigTable {
    type Error = Error;
    fn try_from(rows: Vec<FsCostRow>) -> Result<Self> {
        Self::new(&rows)
    }
}

impl From<FsConfigTable> for Vec<FsCostRow> {
    fn from(t: FsConfigTable) -> Self {
        t.rows.to_vec()
    }
}
