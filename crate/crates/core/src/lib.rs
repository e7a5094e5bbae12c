//! Online orthogonal vectors: data structures, reductions and lower-bound
//! constructions.
//!
//! Bit vectors map coordinate `j` to bit `j % 64` of word `j / 64`. Coordinate
//! sets are ranked in colex order. All randomness comes from a seeded
//! SplitMix64 stream, so every build is reproducible.

pub mod avgcase;
pub mod bits;
pub mod candidates;
pub mod codec;
pub mod combinatorics;
pub mod engine;
pub mod error;
pub mod hardness;
pub mod instance;
pub mod oracle;
pub mod partition;
pub mod reductions;
pub mod worstcase;

pub use avgcase::{avg_build, choose_t_avg, AvgStructure};
pub use bits::{is_orthogonal, BitVec, CoordSet};
pub use codec::{decode_structure, encode_structure, ContainerParams};
pub use engine::{AvgThreshold, BuildOnlineOv, Engine, EngineConfig, OnlineOv, QueryStats};
pub use error::{Error, Result};
pub use instance::{sample_instance, OVInstance};
pub use oracle::{build_full_bitmap, linear_scan_query, FullBitmap};
pub use partition::{pseudorandom_partition, PartitionResult};
pub use worstcase::{ov_onl, ov_pre, WorstNode, WorstStructure};
