//! Crate-wide error type for the model-level operations.

use crate::geometry::GeometryError;
use crate::numerics::NumericsError;
use crate::subsets::SubsetError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Subsets(#[from] SubsetError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    /// The all-jammers limit forms are undefined without helpers.
    #[error("operation requires at least one helper node")]
    NoHelpers,
    /// Even selecting every helper cannot push the warden's error above the
    /// covertness floor.
    #[error(
        "covertness constraint infeasible: limiting min average detection error {xi_limit} \
         is below the target {target}"
    )]
    Infeasible { xi_limit: f64, target: f64 },
}
