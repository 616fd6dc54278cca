//! Dense linear algebra over F₂ on bit-packed rows.

mod dump;
mod echelon;
mod matrix;

pub use dump::{read_dump, write_dump, MAGIC as DUMP_MAGIC};
pub use echelon::{EchelonBasis, Elimination};
pub use matrix::{
    last_word_mask, packed_bytes, rank_of_source, rank_streamed, words_per_row, F2Matrix, MemoryBudget, RowSource,
    DEFAULT_BUDGET_BYTES,
};
