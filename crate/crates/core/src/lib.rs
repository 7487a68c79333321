//! Simulation and numerical verification toolkit for Lambda-coalescents and
//! the continuous-state branching processes they couple to: collision rates,
//! coming-down-from-infinity criteria, the speed function `v(t)`, lookdown
//! particle systems, the explicit pathwise coupling, and the regularity
//! indices of the underlying Lévy measure.

pub mod error;
pub mod measure;
pub mod numeric;
pub mod speed;

pub use error::{Error, Result};
pub use measure::{LambdaMeasure, MeasureComponent, NuView, PowerPiece, SchweinsbergReport, SumVerdict};
pub use speed::{GreyReport, GreyVerdict, PsiSource, SpeedTable};
