//! Collective spin operators of `N` spin-½ sites.

mod irrep;
mod oracle;
mod trace;
mod word;

pub use irrep::{apply_word_in_irrep, irrep_multiplicity, sectors, IrrepImage, IrrepSpec};
pub use oracle::{dense_oracle_trace, DEFAULT_ORACLE_CAP};
pub use trace::{
    normalized_trace, normalized_trace_with, word_traces, Arithmetic, TraceOptions, TraceResult, TraceValue,
    DEFAULT_MAX_WORK,
};
pub(crate) use trace::Compiled;
pub use word::{SpinLetter, SpinPolynomial, SpinWord};
