//! Modal reduction on `(0, L)` with Dirichlet conditions, time integration,
//! and characteristic-root analysis.

mod integrate;
mod modal;
mod quadrature;
mod roots;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub use integrate::{
    integrate, parseval_norm, project, reconstruct, simulate, synthesize, Method, ModeTrajectory,
    StepControl, Trajectory, DIVERGENCE_THRESHOLD,
};
pub use modal::{
    eigenvalues, reduce, Auxiliary, HistoryConfig, HistorySpec, ModalProblem, ModeHistory,
};
pub use quadrature::{adaptive_simpson, history_integral, integrate_quadrature_oracle};
pub use roots::{
    backward_error, characteristic_polynomial, characteristic_roots, mgt_hurwitz, modal_roots,
    polynomial_roots, routh_hurwitz, spectral_abscissa, ComplexOut, ModeRoots, RootSet,
    RESIDUAL_TOLERANCE,
};

use crate::error::Result;
use crate::law::EvolutionEquation;

/// Seventeen significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A float serialized as a JSON number with 17 significant digits
/// (`null` when not finite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// One modal problem per mode `k = 1..=modes`, each with its own history.
pub fn reduce_modes(
    eq: &EvolutionEquation,
    length: f64,
    modes: usize,
    history: &HistorySpec,
) -> Result<Vec<ModalProblem>> {
    eigenvalues(length, modes)
        .into_iter()
        .enumerate()
        .map(|(i, l)| reduce(eq, l, &history.for_mode(i + 1)))
        .collect()
}
