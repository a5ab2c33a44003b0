//! Centralized and decentralized collaborative learning under Byzantine
//! clients, at desk scale.
//!
//! Centralized runs keep one global model that a server updates with the
//! aggregate of the client gradients. Decentralized runs keep one model per
//! client; in every iteration the clients run approximate agreement on their
//! gradients and each steps with its own agreed vector.

mod dataset;
mod model;
mod split;
mod train;

pub use dataset::{
    generate_blobs, generate_blobs_in, load_csv_dataset, parse_csv_dataset, write_csv_dataset, Dataset, Sample, BLOB_DIM,
};
pub use model::{param_count, Model, ModelKind, MAX_HIDDEN};
pub use split::{split_data, SplitKind};
pub use train::{
    batch_seed, centralized_round, decentralized_round, run_learning, sub_rounds, AggregationRule, Architecture,
    CentralizedState, DecentralizedState, IterationRecord, LearningConfig, LearningSetup, LearningTrace,
};
