pub mod gauss;
pub mod quad;
pub mod root;
pub mod stats;

pub use quad::{integrate, integrate_abs, integrate_split, sign_changes, Quad};
pub use root::brent;
pub use stats::{proportion_half_width, substream, RunningStats};
