//! Descent data, stacks and local fibrations over finite sites.

pub mod bound;
pub mod cli;
pub mod descent;
pub mod error;
pub mod factor;
pub mod fincat;
pub mod fixtures;
pub mod hofib;
pub mod laws;
pub mod pstack;
pub mod site;
pub mod validation;

pub use error::{Error, Result};
