//! Building blocks of the `susy-chain` binary: configuration, verification
//! checks, and the output documents (including the bundled CSV reader).

pub mod checks;
pub mod config;
pub mod output;
