//! IO, networking, file formats, and the CLI for the `pir-core` library.

pub mod cli;
pub mod client;
pub mod dbfile;
pub mod jsonio;
pub mod manifest;
pub mod server;
pub mod wire;
