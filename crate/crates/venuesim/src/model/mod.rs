//! Entity models: personnel, activities, and the venue grid.

pub mod activity;
pub mod person;
pub mod venue;

pub use activity::{Activity, ActivityKind, Permission};
pub use person::{
    duty_role, BehaviorStatus, DutyStint, Gender, MotionStatus, Person, PersonType,
    ALL_PERSON_TYPES,
};
pub use venue::{
    cell_of_sid, sid_of, sid_of_cell, CellRef, GridCell, VenueMap, Zone, CELLS_PER_FLOOR,
    CELL_COUNT, CELL_SIZE_M, FLOORS, GRID_H, GRID_W,
};
