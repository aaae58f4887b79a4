//! Venue space model: a two-floor grid of 8x8 m cells grouped into functional
//! zones, with per-cell capacity and speed limits, stair links and entrances.

use std::collections::BTreeMap;

use crate::error::{Result, SimError};
use crate::model::person::PersonType;

pub const GRID_W: u8 = 31; // x in [0, 30]
pub const GRID_H: u8 = 17; // y in [0, 16]
pub const FLOORS: u8 = 2;
pub const CELLS_PER_FLOOR: usize = GRID_W as usize * GRID_H as usize;
pub const CELL_COUNT: usize = CELLS_PER_FLOOR * FLOORS as usize;
/// Edge length of one grid cell in metres.
pub const CELL_SIZE_M: f64 = 8.0;

/// A cell address: floor 1 or 2, x in [0,30], y in [0,16].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct CellRef {
    pub floor: u8,
    pub x: u8,
    pub y: u8,
}

impl CellRef {
    pub fn new(floor: u8, x: u8, y: u8) -> Self {
        Self { floor, x, y }
    }

    #[inline]
    pub fn index(&self) -> usize {
        (self.floor as usize - 1) * CELLS_PER_FLOOR + self.y as usize * GRID_W as usize + self.x as usize
    }

    #[inline]
    pub fn from_index(idx: usize) -> Self {
        let floor = (idx / CELLS_PER_FLOOR) as u8 + 1;
        let rem = idx % CELLS_PER_FLOOR;
        CellRef {
            floor,
            x: (rem % GRID_W as usize) as u8,
            y: (rem / GRID_W as usize) as u8,
        }
    }

    pub fn valid(floor: i32, x: i32, y: i32) -> bool {
        (1..=FLOORS as i32).contains(&floor)
            && (0..GRID_W as i32).contains(&x)
            && (0..GRID_H as i32).contains(&y)
    }
}

impl std::fmt::Display for CellRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "f{}({},{})", self.floor, self.x, self.y)
    }
}

/// Sensor id of a cell: `floor * 10000 + y * 100 + x`. Injective over the grid.
pub fn sid_of(floor: i32, x: i32, y: i32) -> Result<u32> {
    if !CellRef::valid(floor, x, y) {
        return Err(SimError::InvalidCoordinate {
            floor: floor as u8,
            x,
            y,
        });
    }
    Ok(floor as u32 * 10_000 + y as u32 * 100 + x as u32)
}

pub fn sid_of_cell(cell: CellRef) -> u32 {
    cell.floor as u32 * 10_000 + cell.y as u32 * 100 + cell.x as u32
}

/// Inverse of [`sid_of`]; rejects sids that decode outside the grid.
pub fn cell_of_sid(sid: u32) -> Result<CellRef> {
    let floor = (sid / 10_000) as i32;
    let y = ((sid % 10_000) / 100) as i32;
    let x = (sid % 100) as i32;
    if !CellRef::valid(floor, x, y) {
        return Err(SimError::InvalidCoordinate {
            floor: floor as u8,
            x,
            y,
        });
    }
    Ok(CellRef::new(floor as u8, x as u8, y as u8))
}

#[derive(Debug, Clone)]
pub struct Zone {
    pub name: String,
    /// Empty means unrestricted.
    pub restricted_to: Vec<PersonType>,
    pub cells: Vec<CellRef>,
    pub capacity_per_cell: u16,
    pub max_speed: f64,
}

impl Zone {
    pub fn allows(&self, ptype: PersonType) -> bool {
        self.restricted_to.is_empty() || self.restricted_to.contains(&ptype)
    }

    pub fn total_capacity(&self) -> u32 {
        self.cells.len() as u32 * self.capacity_per_cell as u32
    }
}

#[derive(Debug, Clone)]
pub struct GridCell {
    pub zone: u16,
    pub capacity: u16,
    pub max_speed: f64,
}

/// Static venue structure plus a name -> zone index lookup.
///
/// Occupancy is runtime state and lives with the simulation world, not here.
#[derive(Debug, Clone)]
pub struct VenueMap {
    cells: Vec<Option<GridCell>>, // None = structural (non-walkable)
    pub zones: Vec<Zone>,
    zone_by_name: BTreeMap<String, u16>,
    /// Vertical links between floors; each pair is (floor-1 cell, floor-2 cell).
    pub stairs: Vec<(CellRef, CellRef)>,
    pub entrance_cells: Vec<CellRef>,
    pub vip_channel_cells: Vec<CellRef>,
}

impl VenueMap {
    pub fn new(
        cells: Vec<Option<GridCell>>,
        zones: Vec<Zone>,
        stairs: Vec<(CellRef, CellRef)>,
        entrance_cells: Vec<CellRef>,
        vip_channel_cells: Vec<CellRef>,
    ) -> Self {
        let zone_by_name = zones
            .iter()
            .enumerate()
            .map(|(i, z)| (z.name.clone(), i as u16))
            .collect();
        VenueMap {
            cells,
            zones,
            zone_by_name,
            stairs,
            entrance_cells,
            vip_channel_cells,
        }
    }

    #[inline]
    pub fn cell(&self, c: CellRef) -> Option<&GridCell> {
        self.cells[c.index()].as_ref()
    }

    #[inline]
    pub fn cell_at(&self, idx: usize) -> Option<&GridCell> {
        self.cells[idx].as_ref()
    }

    #[inline]
    pub fn is_walkable(&self, c: CellRef) -> bool {
        self.cells[c.index()].is_some()
    }

    pub fn zone_id(&self, name: &str) -> Result<u16> {
        self.zone_by_name
            .get(name)
            .copied()
            .ok_or_else(|| SimError::UnknownZone(name.to_string()))
    }

    pub fn zone(&self, id: u16) -> &Zone {
        &self.zones[id as usize]
    }

    pub fn zone_of(&self, c: CellRef) -> Option<u16> {
        self.cell(c).map(|g| g.zone)
    }

    /// Permission check: may `ptype` enter `zone`?
    pub fn permitted(&self, ptype: PersonType, zone: &str) -> Result<bool> {
        let id = self.zone_id(zone)?;
        Ok(self.zones[id as usize].allows(ptype))
    }

    #[inline]
    pub fn permitted_cell(&self, ptype: PersonType, c: CellRef) -> bool {
        match self.cell(c) {
            Some(g) => self.zones[g.zone as usize].allows(ptype),
            None => false,
        }
    }

    pub fn walkable_cells(&self) -> impl Iterator<Item = CellRef> + '_ {
        (0..CELL_COUNT).filter_map(|i| self.cells[i].as_ref().map(|_| CellRef::from_index(i)))
    }

    /// Entrance cells a person of `ptype` uses (VIPs take the dedicated channel).
    pub fn entrances_for(&self, ptype: PersonType) -> &[CellRef] {
        if ptype == PersonType::VipGuest {
            &self.vip_channel_cells
        } else {
            &self.entrance_cells
        }
    }

    /// Uncongested seconds needed to cross one cell.
    #[inline]
    pub fn min_dwell(&self, c: CellRef) -> i64 {
        match self.cell(c) {
            Some(g) if g.max_speed > 0.0 => (CELL_SIZE_M / g.max_speed).ceil() as i64,
            _ => i64::MAX / 4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sid_examples() {
        assert_eq!(sid_of(1, 15, 7).unwrap(), 10715);
        assert_eq!(sid_of(2, 0, 0).unwrap(), 20000);
        assert_eq!(sid_of(1, 18, 8).unwrap(), 10818);
        assert!(sid_of(3, 0, 0).is_err());
        assert!(sid_of(1, 31, 0).is_err());
        assert!(sid_of(1, 0, 17).is_err());
    }

    #[test]
    fn sid_is_injective_over_all_cells() {
        let mut seen = std::collections::HashSet::new();
        for floor in 1..=2 {
            for y in 0..17 {
                for x in 0..31 {
                    let sid = sid_of(floor, x, y).unwrap();
                    assert!(seen.insert(sid), "collision at {floor},{x},{y}");
                    assert_eq!(
                        cell_of_sid(sid).unwrap(),
                        CellRef::new(floor as u8, x as u8, y as u8)
                    );
                }
            }
        }
        assert_eq!(seen.len(), CELL_COUNT);
    }

    #[test]
    fn cell_index_roundtrip() {
        for idx in 0..CELL_COUNT {
            assert_eq!(CellRef::from_index(idx).index(), idx);
        }
    }
}
