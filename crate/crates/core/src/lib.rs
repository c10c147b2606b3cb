pub mod algebra;
pub mod cli;
pub mod cohft;
pub mod descendants;
pub mod diffpoly;
pub mod dispersionless;
pub mod psdo;
pub mod strata;
