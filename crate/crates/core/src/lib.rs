//! Linear-chain conditional random fields for named-entity recognition.
//!
//! The crate covers the whole tagging pipeline:
//!
//! * [`corpus`]: column-format corpora (surface, POS, chunk, NE label) and the BIO scheme.
//! * [`gazetteer`]: multi-token name lists with longest leftmost matching.
//! * [`features`]: sparse per-token feature vectors (context words, affixes, POS/chunk,
//!   sentence boundaries, digits, token position, nearest verb, gazetteer flags,
//!   capitalization).
//! * [`crf`]: lattice construction, forward-backward, L-BFGS training, Viterbi decoding
//!   and the binary model container.
//! * [`eval`]: exact-match entity-level precision, recall and F-measure.
//! * [`synthetic`]: seeded toy corpora used by the test and benchmark suites.

pub mod corpus;
pub mod crf;
pub mod error;
pub mod eval;
pub mod features;
pub mod gazetteer;
pub mod synthetic;

pub use corpus::{Corpus, CorpusStats, Sentence, Token};
pub use crf::{
    train, viterbi, Lattice, Marginals, Model, TrainParams, TrainReport, Trainer,
};
pub use error::{Error, Result};
pub use eval::{EntitySpan, EvalReport, Prf};
pub use features::{FeatureConfig, FeatureVector};
pub use gazetteer::{GazFlag, Gazetteer, GazetteerMode};
