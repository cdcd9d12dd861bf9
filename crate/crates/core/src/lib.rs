//! Sandboxed interpreter for a restricted Python-like language, a hardened
//! runtime (freelist allocator, codemap skiplist, exact float formatting,
//! compression codec), an abstract-interpretation memory-safety checker
//! for a small IR, and a two-arm benchmark harness.

pub mod bench;
pub mod collections;
pub mod interp;
pub mod memcheck;
pub mod runtime;
pub mod sandbox;
