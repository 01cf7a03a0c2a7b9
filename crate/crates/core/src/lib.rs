//! Model-free tail probability bounds built from the sample maximum, with
//! Monte Carlo checks and GPD / location-Pareto comparison fits.

pub mod bounds;
pub mod dists;
pub mod error;
pub mod evtfit;
pub mod montecarlo;
pub mod quad;
pub mod returns;
pub mod rng;
pub mod special;
pub mod table;

pub use bounds::{SortedSample, TailBoundReport};
pub use dists::{DistributionSpec, Moment, TailFunction};
pub use error::{Error, Result};
pub use evtfit::{GpdFit, ThresholdScan};
pub use returns::{PriceSeries, ReturnsSeries};
