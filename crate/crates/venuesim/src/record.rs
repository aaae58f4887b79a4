//! The dataset's atomic row: one cell-entry event.

use crate::model::{sid_of_cell, CellRef};

/// A person entered a cell at time `t` (absolute seconds from day-1 00:00).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryRecord {
    pub t: i64,
    pub pid: u32,
    pub floor: u8,
    pub x: u8,
    pub y: u8,
}

impl TrajectoryRecord {
    pub fn new(t: i64, pid: u32, cell: CellRef) -> Self {
        TrajectoryRecord {
            t,
            pid,
            floor: cell.floor,
            x: cell.x,
            y: cell.y,
        }
    }

    #[inline]
    pub fn cell(&self) -> CellRef {
        CellRef::new(self.floor, self.x, self.y)
    }

    #[inline]
    pub fn sid(&self) -> u32 {
        sid_of_cell(self.cell())
    }

    /// Canonical dataset ordering.
    #[inline]
    pub fn sort_key(&self) -> (i64, u32, u8, u8, u8) {
        (self.t, self.pid, self.floor, self.y, self.x)
    }
}

/// Sort a stream into canonical `(t, pid)` order.
pub fn sort_stream(records: &mut [TrajectoryRecord]) {
    records.sort_unstable_by_key(|r| r.sort_key());
}
