//! Binary linear block codes for δ-error-correcting delivery: the
//! shortest-length table, code constructors, column-wise concatenated
//! encoding and syndrome decoding.

mod code;
mod concat;
mod table;

pub use code::{
    build_code, identity_code, patterns, repetition_code, shortened_hamming, CodeWire, LinearCode,
    DISTANCE_CHECK_LENGTH, MAX_LENGTH, MAX_TABLE_ENTRIES,
};
pub use concat::{concat_encode, syndrome_decode};
pub use table::{
    griesmer_bound, length_lower_bound, lookup_code_length, repetition_length,
    sphere_packing_bound, CodeLengthTable,
};
