//! emorank ranks basic emotions for short texts (news titles, tweets,
//! captions) by measuring how strongly each content word co-occurs with
//! each emotion word of a psychological model in a document corpus.
//!
//! The pipeline: preprocess a sentence into content words, fetch document
//! counts from a provider (local inverted index, count fixture, or live
//! search-engine scraper), score word/emotion proximity (Confidence, PMI,
//! NGD, PMING), assemble L1-normalized emotion vectors per term, aggregate
//! them per sentence (Average and Max), and rank the emotions. Rankings
//! can be scored against human annotations with Pearson r, Spearman rho,
//! and Kendall tau-b.

pub mod assets;
pub mod emomodel;
pub mod evaluate;
pub mod freqsource;
pub mod output;
pub mod pipeline;
pub mod preprocess;
pub mod proximity;
pub mod radar;
pub mod ranking;

pub use emomodel::{builtin_models, load_model, EmotionModel};
pub use freqsource::{CountProvider, FrequencyTriple, QueryBudget};
pub use preprocess::{filter_tokens, tokenize, LanguageProfile, TokenList};
pub use proximity::{proximity, MeasureKind, PmingContext};
pub use ranking::{aggregate, process_sentence, rank, Aggregate, EmotionVector, SentenceResult};
