//! Loaders and indexes for the reference wordnet, the bilingual dictionary,
//! tagged corpora and link files.

mod corpus;
mod dictionary;
mod links;
mod pos;
mod wordnet;

pub use corpus::{Document, PosProfile, Sentence, TaggedCorpus, Token};
pub use dictionary::BilingualDictionary;
pub use links::{
    load_seed_links, write_labeled_links, write_links, Label, LinkKey, SeedLink, SeedLinks,
};
pub(crate) use links::read_link_rows;
pub use pos::Pos;
pub use wordnet::{PolysemyScope, Synset, WordnetIndex};
