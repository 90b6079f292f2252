//! Prime fields, vectors, characters, Fourier transforms and polynomials.

pub mod field;
pub mod fourier;
pub mod poly;
pub mod vector;

pub use field::{field_arith, is_prime, ArithOp, FieldElement, Fq};
pub use fourier::{
    character, code_character_sum, fourier_transform, roots_of_unity, ComplexFunction, Direction,
};
pub use vector::{decode_index, encode_index, FieldVector};
