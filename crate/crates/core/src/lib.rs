pub mod bargmann;
pub mod error;
pub mod fock;
pub mod heisenberg;
pub mod moyal;
pub mod nctorus;
pub mod numerics;
pub mod schrodinger;
pub mod starexp;
pub mod verify;

pub use error::{Error, Result};
