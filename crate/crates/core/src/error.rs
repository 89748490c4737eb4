use thiserror::Error;

use crate::closedform::ClosedFormError;
use crate::numerics::NumericsError;
use crate::optimizer::OptimizerError;
use crate::repdata::RepDataError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    RepData(#[from] RepDataError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl Error {
    /// True for errors caused by caller input rather than by the search.
    pub fn is_invalid_input(&self) -> bool {
        !matches!(self, Error::Optimizer(OptimizerError::BudgetExhausted { .. }))
    }
}
