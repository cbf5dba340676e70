//! Integer lattices and row spans: Hermite, Smith and Howell normal forms.

mod dual;
mod hnf;
mod howell;
mod matrix;
mod snf;

pub use dual::{separating_functional, solve_upper_left, Functional};
pub use hnf::{hermite_normal_form, Hnf};
pub use howell::{howell_form, HowellForm};
pub use matrix::Matrix;
pub use snf::{smith_normal_form, Snf};
