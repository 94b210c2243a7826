//! Finite-deformation plane-strain solids in mixed lubricated contact.
//!
//! A Neo-Hookean bulk is coupled to an averaged Reynolds film with Patir-Cheng
//! flow factors and a penalty cavitation model, and to a regularized asperity
//! contact law enforced with dual mortar multipliers. Everything is solved
//! monolithically with a semi-smooth Newton method.

pub mod ad;
pub mod contact;
pub mod coupled;
pub mod error;
pub mod lubrication;
pub mod material;
pub mod mesh;
pub mod quadrature;
pub mod solid;
pub mod mortar;
pub mod sparse;

pub use contact::{ContactStatus, RegularizationParams};
pub use coupled::{CoupledState, InterfaceParams, Loading, LubricatedContact, Residuals, SolverParams, StepReport};
pub use error::{Error, Result};
pub use lubrication::{flow_factors, FlowFactors, FluidParams};
pub use material::NeoHookean;
pub use mesh::{Mesh, SurfaceChain};
pub use mortar::RigidPlane;
pub use solid::{DofMap, Solid, SolidState, Stepper, TimeIntegrator};
