pub mod bounds;
pub mod distance;
pub mod expansion;
pub mod pmf;
pub mod sample;
pub mod sweep;
