//! Multitask multiobjective evolutionary optimization.
//!
//! Given `K` related settings of one problem family, the optimizers in this
//! crate produce one nondominated archive per setting in a single pass. The
//! collection of archives is a [`SetOfParetoSets`].
//!
//! | Module | Contents |
//! |---|---|
//! | [`pareto`] | dominance, nondominated sorting, crowding distance, bounded archives |
//! | [`problems`] | truss, hatch cover, welded beam and inventory tasks, unified encoding |
//! | [`variation`] | SBX crossover and polynomial mutation in the unit cube |
//! | [`algorithms`] | NSGA-II, MO-MFEA, MO-MFEA-II and EMT-ET |
//! | [`metrics`] | 2-D hypervolume, cumulative hypervolume, relative mean-minimum distance |
//! | [`analysis`] | PCA projection and tabular decision/objective views |

pub mod algorithms;
pub mod analysis;
pub mod error;
pub mod metrics;
pub mod normal;
pub mod pareto;
pub mod problems;
pub mod rng;
pub mod variation;

pub use error::{Error, Result};
pub use pareto::{DecisionVector, Individual, ParetoArchive, SetOfParetoSets};
pub use problems::{ProblemSuite, TaskDefinition};
