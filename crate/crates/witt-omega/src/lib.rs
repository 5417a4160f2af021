//! Exact computations with Witt vectors of finite fields, divided power
//! modules, Omega powers, transfers and mod-p² liftings of algebras.

pub mod chainring;
pub mod cli;
pub mod gamma;
pub mod omega;
pub mod poly;
pub mod suite;
pub mod tense;
pub mod transfer;
pub mod wmodule;
pub mod wrinkle;
