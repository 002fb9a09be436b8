pub mod phoneme;
pub mod lexicon;
pub mod homograph;
pub mod ezafe;
pub mod config;
pub mod service;
pub mod pipeline;
pub mod metrics;
pub mod bench;
pub mod corpus_gen;
