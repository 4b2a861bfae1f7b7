pub mod corr;
pub mod estimate;
pub mod simulate;
pub mod validate;
