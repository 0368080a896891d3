//! HTTP sessions over a case file: assert or retract facts, adjust priors
//! and mode, and get the recomputed model comparison after every change.

pub mod http;
pub mod session;

pub use http::{router, router_with, SessionStore};
pub use session::{Mutation, Session, SessionError, SessionReport};
