//! A small first-person visual reinforcement-learning platform.
//!
//! The [`engine`] advances a grid world at 35 tics per simulated second,
//! [`render`] raycasts RGB and depth observations, [`scenario`] parses
//! configs and scenario files, [`env`] is the episode facade with frame
//! skipping and control modes, and [`deepq`] trains convolutional Q-networks
//! against it.

pub mod deepq;
pub mod engine;
pub mod recording;
pub mod env;
pub mod render;
pub mod scenario;
pub mod spectate;
