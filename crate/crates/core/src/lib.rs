//! Coalition-restricted equilibria for resource selection games.
//!
//! The crate is organised around the objects that appear when reasoning about
//! which coalitions may deviate from an allocation:
//!
//! - [`rsg`]: resource selection games, allocations and the derived quantities
//!   (minmaxcost, quotas, resource types, beta values, low/high resources).
//! - [`game`]: generic strategic-form games, used as an independent reference
//!   for the resource-game stability oracle.
//! - [`coalition`], [`structure`], [`embedding`], [`hierarchy`]: coalition
//!   structures and their classes (partition, laminar, contiguous, centralized)
//!   together with the witnesses that certify membership.
//! - [`stability`]: exact c-/C-stability oracles, the two-resource
//!   characterization and the gamma/beta bookkeeping.
//! - [`construction`], [`two_color`], [`search`]: equilibrium constructors and
//!   the exhaustive search baseline.
//! - [`fixtures`], [`refute`]: the non-existence instances and their certificates.
//! - [`sample`]: seeded random games and structures.
//! - [`instance`], [`solve`], [`reproduce`]: file format and the drivers used by
//!   the command-line tool.
//!
//! Agents are numbered from 1, resources from 0.

pub mod coalition;
pub mod combinatorics;
pub mod construction;
pub mod embedding;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod hierarchy;
pub mod instance;
pub mod rational;
pub mod refute;
pub mod reproduce;
pub mod rsg;
pub mod sample;
pub mod search;
pub mod solve;
pub mod stability;
pub mod structure;
pub mod two_color;

pub use coalition::{AgentId, Coalition, CoalitionStructure};
pub use error::{Error, Result};
pub use rational::Cost;
pub use rsg::{Allocation, ResourceId, ResourceType, Rsg, RsgDerived};
