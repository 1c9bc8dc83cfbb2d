pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod exact;
pub mod padic;
pub mod random_mod;
pub mod real;
pub mod report;
pub mod theorems;
