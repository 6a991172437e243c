//! File formats, result serialization and seeded random streams.

mod instance;
mod results;
mod rng;

pub use instance::{parse_instance, read_instance, serialize_instance, MAGIC};
pub use results::{parse_results, write_results, ResultRow};
pub use rng::{derive_rng, StreamRng};
