//! Corpus ingestion, reference-set construction and persistence.

mod corpus;
mod reference;
mod store;

pub use corpus::{read_corpus, read_corpus_from, write_corpus, CorpusRecord};
pub use reference::{apply_history_cut, build_reference_set, rebuild_for_length, BuildReport};
pub use store::{
    config_hash, decode_reference_set, encode_reference_set, export_json, load_reference_set,
    save_reference_set, FORMAT_VERSION,
};
