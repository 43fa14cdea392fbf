pub mod lowrank;
pub mod cli;
pub mod io;
pub mod nn;
pub mod tensor;
