//! One module per subcommand. Each takes the parsed flags plus the config
//! bag, resolves flag > config > default per option, and returns a
//! [`crate::output::Table`] ready to render.

pub mod advantage;
pub mod bounds;
pub mod dataset_stats;
pub mod fidelity;
pub mod nn_curve;
pub mod pipeline;
