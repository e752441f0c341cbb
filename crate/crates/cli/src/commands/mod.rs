pub mod attack;
pub mod code_stats;
pub mod density;
pub mod simulate;
