//! Classifying maps given by charts, their differentials, pull-back frames,
//! second fundamental forms and Wirtinger statistics.

mod chart;
mod extremize;
mod frame;
mod sff;

pub(crate) use chart::richardson;
pub use chart::{ChartMap, ImmersionChart};
pub use extremize::{shape_norm, sphere_grid, wirtinger_max, Biquadratic, Extremum, SphereGrid, WirtingerMax};
pub use frame::{point_frame, PointFrame};
pub use sff::{second_fundamental_form, SecondFF};
