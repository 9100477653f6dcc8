//! Numerical toolkit for the curve shortening flow of closed plane curves.
//!
//! The crate covers discrete curve geometry ([`curve`]), support functions of
//! ovals ([`support`]), verification of the self-shrinker relation and the
//! support-function ODE ([`shrinker`]), the flow itself ([`flow`]), Bonnesen's
//! inradius/circumradius inequality ([`bonnesen`]) and area-bisecting chord
//! symmetrization ([`symmetrize`]).

pub mod bonnesen;
pub mod curve;
pub mod error;
pub mod flow;
pub mod geom;
pub mod io;
pub mod shapes;
pub mod shrinker;
pub mod support;
pub mod symmetrize;

pub use bonnesen::{bonnesen_chain, BonnesenReport};
pub use curve::{ClosedCurve, FrenetData};
pub use error::{Error, Result};
pub use flow::{FlowState, FlowTrajectory, SimilarityProfile};
pub use geom::Vec2;
pub use shrinker::{verify_shrinker, ShrinkerReport};
pub use support::{DerivativeMode, SupportFunction, WidthFunction};
pub use symmetrize::{ChordCut, SymmetrizedPair};
