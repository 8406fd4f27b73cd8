//! Corpus-to-embedding toolkit built around one idea: word embeddings become
//! interpretable once they are centered with frequency weights, and centered
//! vectors compose under AND / OR / NOT set operations.
//!
//! The crate covers the full pipeline: tokenize and count a corpus, train
//! SGNS or GloVe embeddings, center them, compose queries, and evaluate both
//! against synthetic closed-form models and against trained vectors.

pub mod corpus;
pub mod datasets;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod logic;
pub mod postprocess;
pub mod stats;
pub mod train;

pub use corpus::{
    build_vocab, count_cooccurrences, make_or_corpus, read_or_specs, tokenize, write_or_specs,
    CooccurrenceCounts, OrWordSpec, Vocabulary, Weighting,
};
pub use datasets::{read_phrases, read_sts, read_triples, PhraseItem, TripleItem};
pub use embedding::{load_embeddings, save_embeddings, EmbeddingSet};
pub use error::{Error, Result};
pub use eval::{
    aggregates, epsilon_scaling_probe, histogram, mrr, pca_project, pearson, pmi_error_samples,
    rank_of, sentence_vector, sts_eval, topn_accuracy, Aggregates, EvalReport, OovPolicy,
    OriginSpec, PcaProjection, RankResult, ScalingProbe, StsItem, TopNEntry,
};
pub use logic::{
    and_compose, conditional_embed, nearest_neighbors, not_compose, or_compose, parse_expression,
    set_vector, ConditionalEmbedding, Expression, Neighbor, SetWeighting, WordSet,
};
pub use postprocess::{
    abtt, abtt_default_components, center_freq, center_freq_weighted, center_uniform, freq_mean,
    CenteringMode, CenteringReport,
};
pub use stats::{
    factorization_identity_residual, joint_from_counts, kl_error_terms, pmi, pmi_delta,
    synth_and_row, synth_and_row_from_matrix, synth_glove_model, synth_model_from_params,
    synth_model_with_mode, AndRow, ErrorTerms, JointDistribution, NegativeSamplingDist, SynthMode,
    SyntheticModel,
};
pub use train::{glove_objective, init_embeddings, train_glove, train_sgns, TrainConfig};
