pub mod classify;
pub mod cli;
pub mod exprlang;
pub mod geometry;
pub mod identities;
pub mod jets;
pub mod lifts;
pub mod models;
pub mod sampling;
