pub mod analysis;
pub mod cli;
pub mod colorspace;
pub mod embedding;
pub mod imaging;
pub mod ingestion;
pub mod plot;
pub mod store;
